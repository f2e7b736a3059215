"""Degree sequences: constructors, feasibility, tail statistics and closed-form predictors."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.special import gammaln


class LayerCollisionWarning(UserWarning):
    """Two layers of a layered construction rounded to the same degree."""


@dataclass(frozen=True, eq=False)
class DegreeSequence:
    """Immutable degree sequence indexed by vertex label ``0..n-1``.

    ``thinned`` sequences (output of :func:`thin`) may contain zeros; all
    other sequences require positive degrees. Feasibility is not enforced
    here, use :func:`validate`.
    """

    degrees: np.ndarray
    thinned: bool = False
    name: str = ""
    notes: tuple = field(default=())

    def __post_init__(self):
        arr = np.array(self.degrees, dtype=np.int64).reshape(-1)
        if arr.size and arr.min() < (0 if self.thinned else 1):
            raise ValueError("degrees must be positive" if not self.thinned else "degrees must be non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "degrees", arr)

    @property
    def n(self) -> int:
        return int(self.degrees.size)

    @property
    def m(self) -> int:
        """Sum of degrees (twice the number of edges when feasible)."""
        return int(self.degrees.sum())

    @property
    def order(self) -> np.ndarray:
        """Vertex labels in non-increasing degree order (stable)."""
        return np.argsort(-self.degrees, kind="stable")

    def sorted_degrees(self) -> np.ndarray:
        return self.degrees[self.order]

    def multiset(self) -> list[tuple[int, int]]:
        """``(degree, count)`` pairs, degree descending."""
        values, counts = np.unique(self.degrees, return_counts=True)
        return [(int(v), int(c)) for v, c in zip(values[::-1], counts[::-1])]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, DegreeSequence):
            return NotImplemented
        return self.thinned == other.thinned and np.array_equal(self.degrees, other.degrees)

    def __hash__(self):
        return hash((self.thinned, self.degrees.tobytes()))

    def __repr__(self):
        if self.n <= 12:
            body = ",".join(map(str, self.degrees.tolist()))
        else:
            body = " ".join(f"{d}x{c}" for d, c in self.multiset())
        return f"DegreeSequence({body})"

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines += [f"{d} {c}" for d, c in self.multiset()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DegreeSequence":
        rows = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("#")]
        n, m = int(rows[0][0]), int(rows[0][1])
        pairs = [(int(d), int(c)) for d, c in rows[1:]]
        pairs.sort(key=lambda dc: -dc[0])
        degrees = np.repeat([d for d, _ in pairs], [c for _, c in pairs]).astype(np.int64)
        if degrees.size != n or int(degrees.sum()) != m:
            raise ValueError(f"header says n={n}, m={m}; body has n={degrees.size}, m={int(degrees.sum())}")
        return cls(degrees, thinned=bool(degrees.size and degrees.min() == 0))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "DegreeSequence":
        return cls.from_text(Path(path).read_text())


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    reason: str  # ok | odd_sum | degree_too_large | erdos_gallai_violated
    index: int | None = None  # first violating k (1-based) for erdos_gallai_violated

    def __str__(self):
        if self.feasible:
            return "feasible"
        if self.reason == "erdos_gallai_violated":
            return f"infeasible: {self.reason}({self.index})"
        return f"infeasible: {self.reason}"


@dataclass(frozen=True)
class TailStats:
    cutoff: int
    members: np.ndarray
    size: int
    mass: int


def _as_seq(seq) -> DegreeSequence:
    return seq if isinstance(seq, DegreeSequence) else DegreeSequence(seq)


def validate(seq) -> FeasibilityReport:
    """Decide graphicality with the Erdős–Gallai inequalities in O(n log n)."""
    seq = _as_seq(seq)
    d = seq.sorted_degrees()
    n = d.size
    if n == 0:
        return FeasibilityReport(True, "ok")
    if int(d.sum()) % 2:
        return FeasibilityReport(False, "odd_sum")
    if d[0] > n - 1:
        return FeasibilityReport(False, "degree_too_large")
    # sum_{i<=k} d_i <= k(k-1) + sum_{i>k} min(d_i, k) for k = 1..n
    prefix = np.cumsum(d)
    asc = d[::-1]
    asc_prefix = np.concatenate(([0], np.cumsum(asc)))
    k = np.arange(1, n + 1)
    # within the tail d[k:], entries < k contribute d_i, the rest contribute k
    n_small_total = np.searchsorted(asc, k, side="left")  # count of all d_i < k
    n_small_tail = np.minimum(n_small_total, n - k)
    small_sum = asc_prefix[n_small_tail]
    rhs = k * (k - 1) + small_sum + k * (n - k - n_small_tail)
    bad = np.nonzero(prefix > rhs)[0]
    if bad.size:
        return FeasibilityReport(False, "erdos_gallai_violated", int(bad[0]) + 1)
    return FeasibilityReport(True, "ok")


def regular(n: int, d: int) -> DegreeSequence:
    if not 1 <= d <= n - 1:
        raise ValueError(f"degree {d} out of range [1, {n - 1}]")
    if (n * d) % 2:
        raise ValueError(f"n*d = {n * d} is odd")
    return DegreeSequence(np.full(n, d, dtype=np.int64), name=f"regular:{n},{d}")


def _floor_power(n: int, exponent: Fraction) -> int:
    """Exact ``floor(n ** exponent)`` for a non-negative rational exponent."""
    exponent = Fraction(exponent)
    if exponent == 0 or n == 1:
        return 1
    a, b = exponent.numerator, exponent.denominator
    target = n ** a
    x = int(math.floor(math.exp(math.log(n) * a / b)))
    while x > 0 and x ** b > target:
        x -= 1
    while (x + 1) ** b <= target:
        x += 1
    return x


def _fix_parity(degrees: np.ndarray) -> np.ndarray:
    if int(degrees.sum()) % 2:
        # bump the first vertex of minimum degree; descending order survives
        idx = int(np.nonzero(degrees == degrees.min())[0][0])
        degrees[idx] += 1
    return degrees


def onion(n: int, k: int) -> DegreeSequence:
    """Layered sequence with ``floor(n/2^i)`` vertices of degree ``floor(n^(1-2^-i))``.

    Leftover vertices join layer ``k``. Vertices are labelled from the
    innermost (highest degree) layer outwards.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 2 ** k:
        raise ValueError(f"n={n} is smaller than 2^k={2 ** k}")
    counts = [n // 2 ** i for i in range(1, k + 1)]
    counts[-1] += n - sum(counts)
    degs = [_floor_power(n, 1 - Fraction(1, 2 ** i)) for i in range(1, k + 1)]
    degrees = np.repeat(degs[::-1], counts[::-1]).astype(np.int64)
    degrees = _fix_parity(degrees)
    if degrees.max() > n - 1:
        raise ValueError(f"onion({n},{k}) produces degree {degrees.max()} > n-1")
    return DegreeSequence(degrees, name=f"onion:{n},{k}")


def multi_jump_exponents(i: int) -> tuple[Fraction, Fraction]:
    """``(alpha_i, beta_i)`` of the multi-jump construction; ``alpha_0 = 0``."""
    if i == 0:
        return Fraction(0), Fraction(0)
    return 1 - Fraction(11, 8 * 5 ** (i + 1)), Fraction(1, 5 ** (i + 1))


def multi_jump(n: int, k: int) -> DegreeSequence:
    """Layer ``i`` gets ``floor(n^a_i) - floor(n^a_{i-1})`` vertices of degree ``max(2, floor(n^b_i))``.

    The cumulative count of layer vertices before layer 1 is taken as 0 so
    the sequence has exactly ``n`` vertices; everything else has degree 1.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    tops = [0] + [_floor_power(n, multi_jump_exponents(i)[0]) for i in range(1, k + 1)]
    counts = [tops[i] - tops[i - 1] for i in range(1, k + 1)]
    if min(counts) <= 0:
        raise ValueError(f"n={n} too small: layer populations {counts}")
    degs = [max(2, _floor_power(n, multi_jump_exponents(i)[1])) for i in range(1, k + 1)]
    notes = ()
    if len(set(degs)) < len(degs):
        notes = (f"layer collision: degrees {degs}",)
        warnings.warn(f"multi_jump({n},{k}): layers share degrees {degs}", LayerCollisionWarning, stacklevel=2)
    degrees = np.concatenate([np.repeat(degs, counts), np.ones(n - tops[k], dtype=np.int64)]).astype(np.int64)
    if int(degrees.sum()) % 2:
        ones = np.nonzero(degrees == 1)[0]
        degrees[ones[0] if ones.size else -1] += 1
    if degrees.max() > n - 1:
        raise ValueError(f"multi_jump({n},{k}) produces degree {degrees.max()} > n-1")
    return DegreeSequence(degrees, name=f"multijump:{n},{k}", notes=notes)


def tail(seq, d: int) -> TailStats:
    """Vertices of degree at least ``d`` and their total degree."""
    if d < 0:
        raise ValueError("cutoff must be non-negative")
    seq = _as_seq(seq)
    members = np.nonzero(seq.degrees >= d)[0]
    return TailStats(d, members, int(members.size), int(seq.degrees[members].sum()))


def molloy_reed_pc(seq) -> float:
    seq = _as_seq(seq)
    d = seq.degrees
    num = int(d.sum())
    den = int((d * (d - 1)).sum())
    if den == 0:
        raise ValueError("sum d(d-1) is zero (all degrees <= 1)")
    return num / den


def binomial_tail(trials: int, p: float, k: int) -> float:
    """``P(Bin(trials, p) >= k)`` by direct summation of the upper pmf terms."""
    if k <= 0:
        return 1.0
    if k > trials or p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0
    j = np.arange(k, trials + 1)
    logpmf = (gammaln(trials + 1) - gammaln(j + 1) - gammaln(trials - j + 1)
              + j * math.log(p) + (trials - j) * math.log1p(-p))
    return float(min(1.0, np.exp(logpmf).sum()))


def n_k_stat(seq, d: int, p: float, k: int) -> float:
    """Expected number of vertices of degree below ``d`` that keep at least ``k`` edges."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    seq = _as_seq(seq)
    low = seq.degrees[seq.degrees < d]
    values, counts = np.unique(low, return_counts=True)
    return float(sum(int(c) * binomial_tail(int(v), p, k) for v, c in zip(values, counts)))


def thin(seq, p: float, rng: np.random.Generator) -> DegreeSequence:
    """Independent ``Bin(d_i, p)`` thinning conditioned on an even sum (by rejection)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    seq = _as_seq(seq)
    while True:
        draw = rng.binomial(seq.degrees, p)
        if int(draw.sum()) % 2 == 0:
            return DegreeSequence(draw, thinned=True, name=f"thin({seq.name or 'seq'},{p})")


def step_f(alpha: float) -> float:
    """``2 ** ceil(log2(alpha))`` on ``(0, 1]``, exact at powers of two."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    mant, exp = math.frexp(alpha)  # alpha = mant * 2**exp, mant in [0.5, 1)
    return math.ldexp(1.0, exp - 1 if mant == 0.5 else exp)


def parse_sequence(text: str) -> DegreeSequence:
    """Parse ``3,3,2,2``, ``regular:n,d``, ``onion:n,k``, ``multijump:n,k`` or a file path."""
    text = text.strip()
    if ":" in text and not Path(text).exists():
        kind, _, args = text.partition(":")
        vals = [int(float(a)) for a in args.split(",")]
        builders = {"regular": regular, "onion": onion, "multijump": multi_jump, "multi_jump": multi_jump}
        if kind not in builders or len(vals) != 2:
            raise ValueError(f"unknown sequence spec {text!r}")
        return builders[kind](*vals)
    if Path(text).is_file():
        return DegreeSequence.load(text)
    return DegreeSequence([int(x) for x in text.replace(" ", "").split(",") if x])
