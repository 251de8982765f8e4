"""Boolean functions, their phase oracles, and training-set construction.

An n-bit Boolean function is held as its full truth table.  Its oracle is
the diagonal unitary that tags basis state ``|k>`` with the phase
``(-1)**x(k)`` -- no ancilla qubit is used anywhere.  Training sets pair the
two constant functions with a collection of balanced functions (all of them
for small n, a seeded uniform sample above that).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .validation import check_qubit_count

__all__ = [
    "BooleanFunction",
    "FunctionClass",
    "classify",
    "constant_functions",
    "oracle_phases",
    "oracle_unitary",
    "enumerate_balanced",
    "TrainingSet",
    "build_training_set",
    "default_policy",
]

# enumerate_balanced caps at C(16, 8) = 12870 tables.
MAX_ENUMERATION_BITS = 4

DEFAULT_SAMPLE_COUNT = 64


class FunctionClass(enum.Enum):
    CONSTANT = "constant"
    BALANCED = "balanced"
    NEITHER = "neither"


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table of an n-bit Boolean function; ``table[k] = x(k)``."""

    n: int
    table: tuple

    def __post_init__(self):
        n = check_qubit_count(self.n)
        table = tuple(int(b) for b in self.table)
        if len(table) != 2**n:
            raise ValueError(f"table length {len(table)} != 2**{n}")
        if any(b not in (0, 1) for b in table):
            raise ValueError("truth table entries must be 0 or 1")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_string(cls, bits: str) -> "BooleanFunction":
        """Parse the bitstring form; the first character is ``x(0)``."""
        n = (len(bits) - 1).bit_length()
        return cls(n=max(n, 1), table=tuple(int(c) for c in bits))

    def to_string(self) -> str:
        return "".join(str(b) for b in self.table)

    def __str__(self):
        return self.to_string()


def classify(f: BooleanFunction) -> FunctionClass:
    """Classify a function as constant, balanced, or neither."""
    weight = sum(f.table)
    if weight in (0, len(f.table)):
        return FunctionClass.CONSTANT
    if 2 * weight == len(f.table):
        return FunctionClass.BALANCED
    return FunctionClass.NEITHER


def constant_functions(n):
    """The two constant functions (all zeros, all ones) on n bits."""
    n = check_qubit_count(n)
    d = 2**n
    return BooleanFunction(n, (0,) * d), BooleanFunction(n, (1,) * d)


def oracle_phases(f: BooleanFunction) -> np.ndarray:
    """Diagonal of the phase oracle: ``(-1)**x(k)`` as a real vector."""
    return 1.0 - 2.0 * np.asarray(f.table, dtype=float)


def oracle_unitary(f: BooleanFunction) -> np.ndarray:
    """Dense phase-oracle matrix ``diag((-1)**x(k))``.

    The result is simultaneously diagonal, unitary, Hermitian, and
    involutory.
    """
    return np.diag(oracle_phases(f)).astype(complex)


def enumerate_balanced(n) -> list:
    """All balanced functions on n bits, in lexicographic table order."""
    n = check_qubit_count(n)
    if n > MAX_ENUMERATION_BITS:
        raise ValueError(
            f"enumerating balanced functions is capped at n <= {MAX_ENUMERATION_BITS} "
            f"(C(32, 16) and beyond are impractical); use sampled training sets instead"
        )
    d = 2**n
    half = d // 2
    out = []
    for m in range(2**d):
        if m.bit_count() == half:
            table = tuple((m >> (d - 1 - i)) & 1 for i in range(d))
            out.append(BooleanFunction(n, table))
    return out


def _n_balanced(n) -> int:
    from math import comb

    return comb(2**n, 2 ** (n - 1))


def default_policy(n) -> str:
    """Training-set policy used when none is given: full below 4 bits."""
    return "full" if n <= 3 else "sample"


@dataclass
class TrainingSet:
    """Input-target pairs: two constants (target 'c') plus balanced ('b').

    ``holdout_balanced`` is a disjoint set kept aside for generalization
    checks; it is empty under the full-enumeration policy.
    """

    n: int
    constants: list
    balanced: list
    holdout_balanced: list = field(default_factory=list)
    policy: str = "full"
    sample_count: int | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "policy": self.policy,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "constants": [f.to_string() for f in self.constants],
            "balanced": [f.to_string() for f in self.balanced],
            "holdout_balanced": [f.to_string() for f in self.holdout_balanced],
        }

    @classmethod
    def from_dict(cls, obj) -> "TrainingSet":
        return cls(
            n=int(obj["n"]),
            constants=[BooleanFunction.from_string(s) for s in obj["constants"]],
            balanced=[BooleanFunction.from_string(s) for s in obj["balanced"]],
            holdout_balanced=[
                BooleanFunction.from_string(s) for s in obj.get("holdout_balanced", [])
            ],
            policy=obj.get("policy", "full"),
            sample_count=obj.get("sample_count"),
            seed=obj.get("seed"),
        )


def _sample_balanced(n, count, rng) -> list:
    """Draw ``count`` distinct balanced tables uniformly (reject duplicates)."""
    d = 2**n
    half = d // 2
    seen = set()
    out = []
    while len(out) < count:
        ones = tuple(sorted(rng.choice(d, size=half, replace=False).tolist()))
        if ones in seen:
            continue
        seen.add(ones)
        table = [0] * d
        for k in ones:
            table[k] = 1
        out.append(BooleanFunction(n, tuple(table)))
    return out


def build_training_set(n, policy=None, sample_count=DEFAULT_SAMPLE_COUNT, seed=0) -> TrainingSet:
    """Build a training set for the n-bit constant-vs-balanced problem.

    ``policy="full"`` (n <= 3) enumerates every balanced function and leaves
    the holdout empty.  ``policy="sample"`` draws ``sample_count`` distinct
    balanced functions uniformly with the seeded generator, plus a disjoint
    holdout of ``min(sample_count, 64)`` more.  The construction is
    deterministic given ``(n, policy, sample_count, seed)``.
    """
    n = check_qubit_count(n)
    if policy is None:
        policy = default_policy(n)
    c0, c1 = constant_functions(n)
    if policy == "full":
        if n > 3:
            raise ValueError(
                f"full enumeration policy is limited to n <= 3, got n = {n}; "
                f"use policy='sample'"
            )
        return TrainingSet(
            n=n,
            constants=[c0, c1],
            balanced=enumerate_balanced(n),
            holdout_balanced=[],
            policy="full",
            sample_count=None,
            seed=None,
        )
    if policy != "sample":
        raise ValueError(f"unknown training policy {policy!r}; expected 'full' or 'sample'")
    count = int(sample_count)
    holdout = min(count, 64)
    available = _n_balanced(n)
    if count + holdout > available:
        raise ValueError(
            f"cannot sample {count} balanced functions plus a {holdout}-function holdout: "
            f"only {available} balanced functions exist for n = {n}"
        )
    rng = np.random.default_rng(seed)
    drawn = _sample_balanced(n, count + holdout, rng)
    return TrainingSet(
        n=n,
        constants=[c0, c1],
        balanced=drawn[:count],
        holdout_balanced=drawn[count:],
        policy="sample",
        sample_count=count,
        seed=int(seed),
    )
