"""Generalized Gell-Mann generator basis of su(d) and the control-vector map.

A ``d``-dimensional unitary is parametrized by a real vector ``p`` of
length ``d**2 - 1`` through ``U(p) = exp(-i * sum_j p[j] * g[j])`` where the
``g[j]`` are the generalized Gell-Mann matrices.  The generator ordering is
fixed (see :func:`build_basis`) and identified by :data:`BASIS_ORDER` in
serialized control vectors, since reordering the basis permutes parameter
meaning.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .linalg import exp_minus_i
from .validation import check_control_vector

__all__ = [
    "BASIS_ORDER",
    "build_basis",
    "cached_basis",
    "canonicalize",
    "unitary_from_controls",
    "parameter_count",
    "controls_to_dict",
    "controls_from_dict",
]

# Ordering-convention tag recorded in serialized control vectors.
BASIS_ORDER = "sym-antisym-diag-v1"


def build_basis(d) -> np.ndarray:
    """Build the ordered generalized Gell-Mann basis for su(d).

    Ordering convention ``sym-antisym-diag-v1``:

    1. symmetric pair matrices ``|j><k| + |k><j|`` for all ``j < k`` in
       lexicographic ``(j, k)`` order,
    2. antisymmetric pair matrices ``-i|j><k| + i|k><j|`` in the same order,
    3. diagonal matrices ``sqrt(2/(l(l+1))) * diag(1,...,1,-l,0,...,0)`` for
       ``l = 1..d-1``.

    Every generator is traceless Hermitian with ``Tr(g_a g_b) = 2 delta_ab``;
    for ``d = 2`` this yields exactly the Pauli matrices (X, Y, Z).

    Returns a read-only array of shape ``(d**2 - 1, d, d)``.
    """
    d = int(d)
    if d < 2:
        raise ValueError(f"generator basis requires dimension >= 2, got {d}")
    mats = np.zeros((d * d - 1, d, d), dtype=complex)
    idx = 0
    for j in range(d):
        for k in range(j + 1, d):
            mats[idx, j, k] = 1.0
            mats[idx, k, j] = 1.0
            idx += 1
    for j in range(d):
        for k in range(j + 1, d):
            mats[idx, j, k] = -1.0j
            mats[idx, k, j] = 1.0j
            idx += 1
    for l in range(1, d):
        scale = np.sqrt(2.0 / (l * (l + 1)))
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats[idx] = scale * np.diag(diag)
        idx += 1
    mats.flags.writeable = False
    return mats


@lru_cache(maxsize=None)
def cached_basis(d) -> np.ndarray:
    """Shared read-only basis for dimension ``d`` (safe across threads)."""
    return build_basis(d)


def canonicalize(p) -> np.ndarray:
    """Wrap each component of a raw parameter vector into [-pi, pi)."""
    p = check_control_vector(p)
    return np.mod(p + np.pi, 2.0 * np.pi) - np.pi


def unitary_from_controls(p, basis=None) -> np.ndarray:
    """Map a control vector to its unitary ``exp(-i p . G)``.

    ``basis`` defaults to the cached basis of the dimension implied by
    ``len(p) = d**2 - 1``.
    """
    p = check_control_vector(p)
    if basis is None:
        d = int(round(np.sqrt(p.shape[0] + 1)))
        if d * d - 1 != p.shape[0]:
            raise ValueError(f"control vector length {p.shape[0]} is not d**2 - 1 for any d")
        basis = cached_basis(d)
    if p.shape[0] != basis.shape[0]:
        raise ValueError(
            f"control vector length {p.shape[0]} does not match basis size {basis.shape[0]}"
        )
    H = np.tensordot(p, basis, axes=1)
    return exp_minus_i(H)


def parameter_count(n) -> int:
    """Total learnable parameter count for two controllable n-qubit unitaries."""
    n = int(n)
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    return 2 * (4**n - 1)


def controls_to_dict(p, d) -> dict:
    """Serialize a control vector with its dimension and ordering tag."""
    p = check_control_vector(p, d=d)
    return {"d": int(d), "basis_order": BASIS_ORDER, "values": [float(v) for v in p]}


def controls_from_dict(obj) -> np.ndarray:
    """Inverse of :func:`controls_to_dict`; rejects unknown ordering tags."""
    order = obj.get("basis_order", BASIS_ORDER)
    if order != BASIS_ORDER:
        raise ValueError(f"unsupported generator ordering {order!r}; expected {BASIS_ORDER!r}")
    return check_control_vector(obj["values"], d=int(obj["d"]))
