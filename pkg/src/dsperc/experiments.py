"""Percolation sweeps over p, jump detection, threshold checks and the
closed-form component-size predictors."""

from __future__ import annotations

import io
import json
import math
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .components import component_stats
from .degseq import DegreeSequence, _as_seq, multi_jump_exponents, n_k_stat, onion, step_f, tail, validate
from .percolate import percolate, two_stage
from .sampler import GuardError, InfeasibleSequence, SimpleGraph, sample_uniform

CSV_HEADER = "alpha_or_p,trials,mean_L1_frac,std_L1_frac,min,max,mean_second_frac,prediction"
TRIALS_HEADER = "trial,p,L1,n_components,second_largest"
MAX_WORK = 5 * 10**10  # edge-percolations per sweep


@dataclass(frozen=True)
class TrialRecord:
    grid_index: int
    trial: int
    p: float
    L1: int
    n_components: int
    second: int
    tracked: float | None = None  # fraction of the tracked set inside the largest component


@dataclass
class SweepResult:
    grid: np.ndarray  # values of the swept parameter (p, or alpha for onion curves)
    p_values: np.ndarray
    n: int
    records: list
    metadata: dict = field(default_factory=dict)
    predictions: list | None = None
    label: str = "p"

    def trials_at(self, i: int) -> list:
        return [r for r in self.records if r.grid_index == i]

    def L1_values(self, i: int) -> np.ndarray:
        return np.array([r.L1 for r in self.trials_at(i)], dtype=np.int64)

    def mean_L1(self) -> np.ndarray:
        return np.array([math.fsum(self.L1_values(i)) / len(self.trials_at(i)) for i in range(len(self.grid))])

    def summary(self, i: int) -> dict:
        recs = self.trials_at(i)
        frac = np.array([r.L1 for r in recs], dtype=float) / self.n
        second = np.array([r.second for r in recs], dtype=float) / self.n
        k = len(recs)
        mean = math.fsum(frac) / k
        std = math.sqrt(math.fsum((frac - mean) ** 2) / (k - 1)) if k > 1 else 0.0
        return {"trials": k, "mean": mean, "std": std, "min": float(frac.min()), "max": float(frac.max()),
                "mean_second": math.fsum(second) / k}

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(CSV_HEADER + "\n")
        for i, x in enumerate(self.grid):
            s = self.summary(i)
            pred = "" if self.predictions is None else repr(float(self.predictions[i]))
            out.write(f"{float(x)!r},{s['trials']},{s['mean']!r},{s['std']!r},{s['min']!r},{s['max']!r},"
                      f"{s['mean_second']!r},{pred}\n")
        return out.getvalue()

    def trials_csv(self) -> str:
        out = io.StringIO()
        out.write(TRIALS_HEADER + "\n")
        for r in self.records:
            out.write(f"{r.trial},{r.p!r},{r.L1},{r.n_components},{r.second}\n")
        return out.getvalue()

    def metadata_json(self) -> str:
        return json.dumps(self.metadata, indent=2, sort_keys=True)


@dataclass(frozen=True)
class JumpReport:
    jumps: list  # (lo, hi, ratio)
    c: float

    def __len__(self):
        return len(self.jumps)


def _describe(seq: DegreeSequence) -> dict:
    desc = {"name": seq.name, "n": seq.n, "m": seq.m}
    if not seq.name:
        desc["multiset"] = seq.multiset()
    return desc


def _versions() -> dict:
    import numba
    return {"dsperc": __version__, "numpy": np.__version__, "numba": numba.__version__,
            "python": platform.python_version()}


def _run_trial(seq, host, p, gi, t, seed, resample, burn_in, track):
    if resample:
        host = sample_uniform(seq, np.random.default_rng([seed, 2, gi, t]), burn_in)
    rng = np.random.default_rng([seed, 1, gi, t])
    stats = component_stats(percolate(host, p, rng), keep_roots=track is not None)
    frac = None
    if track is not None and track.any():
        frac = float(np.count_nonzero(stats.largest_members() & track) / np.count_nonzero(track))
    return TrialRecord(gi, t, float(p), stats.L1, stats.count, stats.second_largest, frac)


def sample_host(seq, seed: int, burn_in: int | None = None) -> SimpleGraph:
    """The host graph :func:`sweep` uses for ``seed`` when graphs are not resampled."""
    return sample_uniform(_as_seq(seq), np.random.default_rng([seed, 0]), burn_in)


def sweep(seq, p_grid, trials: int, seed: int, resample_graph: bool = False, *, burn_in: int | None = None,
          threads: int = 1, host: SimpleGraph | None = None, track: np.ndarray | None = None,
          grid=None, max_work: float = MAX_WORK) -> SweepResult:
    """Percolate a uniform host graph ``trials`` times per probability in ``p_grid``.

    Trial ``t`` at grid index ``i`` draws from the stream seeded by
    ``(seed, 1, i, t)`` (and resamples its host from ``(seed, 2, i, t)``),
    so results do not depend on ``threads``.
    """
    seq = _as_seq(seq)
    rep = validate(seq)
    if not rep.feasible:
        raise InfeasibleSequence(str(rep))
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p_grid = np.asarray(p_grid, dtype=float)
    grid = p_grid if grid is None else np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    if np.any((p_grid < 0) | (p_grid > 1)):
        raise ValueError("probabilities must lie in [0, 1]")
    work = seq.m // 2 * trials * len(p_grid)
    if work > max_work:
        raise GuardError(f"sweep would percolate {work:.3g} edges (limit {max_work:.3g})")
    if not resample_graph and host is None:
        host = sample_host(seq, seed, burn_in)
    tasks = [(gi, t) for gi in range(len(p_grid)) for t in range(trials)]

    def job(task):
        gi, t = task
        return _run_trial(seq, host, p_grid[gi], gi, t, seed, resample_graph, burn_in, track)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(job, tasks))
    else:
        records = [job(task) for task in tasks]
    records.sort(key=lambda r: (r.grid_index, r.trial))
    meta = {"seed": seed, "sequence": _describe(seq), "grid": grid.tolist(), "p_values": p_grid.tolist(),
            "trials": trials, "resample_graph": resample_graph, "burn_in": burn_in, "versions": _versions()}
    return SweepResult(grid, p_grid, seq.n, records, meta)


def onion_curve(n: int, k: int, alpha_grid, trials: int, seed: int, **kwargs) -> SweepResult:
    """Sweep ``onion(n, k)`` at ``p = n^(alpha-1)`` next to the step-function prediction."""
    seq = onion(n, k)
    alphas = np.asarray(alpha_grid, dtype=float)
    p_values = np.power(float(n), alphas - 1.0)
    sw = sweep(seq, p_values, trials, seed, grid=alphas, **kwargs)
    sw.label = "alpha"
    sw.predictions = [step_f(a) for a in alphas]
    sw.metadata["kind"] = "onion_curve"
    sw.metadata["beyond_truncation"] = [bool(a < 2.0 ** -k) for a in alphas]
    return sw


def jumps_in_curve(grid, values, c: float) -> JumpReport:
    if c <= 1:
        raise ValueError("jump factor must exceed 1")
    out = []
    for lo, hi, a, b in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        ratio = b / a if a > 0 else math.inf
        if ratio >= c:
            out.append((float(lo), float(hi), float(ratio)))
    return JumpReport(out, c)


def detect_jumps(sw: SweepResult, c: float) -> JumpReport:
    """Adjacent grid points where the mean largest component grows by a factor >= ``c``."""
    return jumps_in_curve(list(sw.grid), list(sw.mean_L1()), c)


@dataclass(frozen=True)
class Theorem7Bound:
    value: float
    omega: float
    applicable: bool
    reason: str
    size: int
    mass: int


def theorem7_bound(seq, d: int, p: float) -> Theorem7Bound:
    """``max(|S| + (1 + 2 w^(-1/3)) p d(S), 2 ln n / ln w)`` with ``w = min(1/(dp), p d(S))``."""
    seq = _as_seq(seq)
    st = tail(seq, d)
    if st.size == 0:
        return Theorem7Bound(math.nan, math.nan, False, "no vertex of degree >= d", 0, 0)
    if not p * d < 1:
        return Theorem7Bound(math.nan, math.nan, False, "requires p*d < 1", st.size, st.mass)
    if not p * st.mass > 1:
        return Theorem7Bound(math.nan, math.nan, False, "requires p*d(S) > 1", st.size, st.mass)
    omega = min(1.0 / (d * p), p * st.mass)
    core = st.size + (1.0 + 2.0 * omega ** (-1.0 / 3.0)) * p * st.mass
    small = 2.0 * math.log(seq.n) / math.log(omega)
    return Theorem7Bound(max(core, small), omega, True, "ok", st.size, st.mass)


def theorem6_bounds(seq, d: int, p: float, omega: float) -> tuple[float, float]:
    """``(|S| + N_1(d, p), |S| + N_omega(d, p))`` without the o(1) factors."""
    if omega < 1:
        raise ValueError("omega must be >= 1")
    seq = _as_seq(seq)
    size = tail(seq, d).size
    upper = size + n_k_stat(seq, d, p, 1)
    lower = size + n_k_stat(seq, d, p, math.ceil(omega))
    return upper, lower


@dataclass(frozen=True)
class JumpPrediction:
    i: int
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    threshold_exponent: Fraction  # p threshold is n ** threshold_exponent
    order_exponent: Fraction  # supercritical L1 >= n ** order_exponent
    threshold: float
    order: float


def multi_jump_predict(n: float, k: int) -> list[JumpPrediction]:
    if k < 1:
        raise ValueError("k must be >= 1")
    out = []
    for i in range(1, k + 1):
        a, b = multi_jump_exponents(i)
        thr = 1 - a - 2 * b
        order = 1 - b
        out.append(JumpPrediction(i, a, b, a + 2 * b - 1, thr, order,
                                  float(n) ** float(thr), float(n) ** float(order)))
    return out


@dataclass
class ThresholdReport:
    d: int
    factor: float
    delta_hat: float
    p_low: float
    p_high: float | None
    low_mean: float
    high_mean: float | None
    s_fractions: np.ndarray | None
    low: SweepResult
    high: SweepResult | None

    @property
    def s_fraction_mean(self) -> float | None:
        return None if self.s_fractions is None else float(np.mean(self.s_fractions))


def verify_threshold(seq, d: int, factor: float, trials: int, seed: int, **kwargs) -> ThresholdReport:
    """Percolate at ``1/(factor d)`` and ``factor/d``; track how much of ``S_n(d)`` the giant holds."""
    if factor <= 1:
        raise ValueError("factor must exceed 1")
    seq = _as_seq(seq)
    st = tail(seq, d)
    if kwargs.get("host") is None and not kwargs.get("resample_graph", False):
        kwargs["host"] = sample_host(seq, seed, kwargs.get("burn_in"))
    p_low = 1.0 / (factor * d)
    low = sweep(seq, [p_low], trials, seed, **kwargs)
    low_mean = low.summary(0)["mean"]
    if st.size == 0:
        return ThresholdReport(d, factor, 0.0, p_low, None, low_mean, None, None, low, None)
    p_high = min(1.0, factor / d)
    track = np.zeros(seq.n, dtype=bool)
    track[st.members] = True
    high = sweep(seq, [p_high], trials, seed + 1, track=track, **kwargs)
    fracs = np.array([r.tracked for r in high.records])
    return ThresholdReport(d, factor, st.size / seq.n, p_low, p_high, low_mean,
                           high.summary(0)["mean"], fracs, low, high)


def coupled_gap(host: SimpleGraph, p1: float, p2: float, trials: int, seed: int) -> np.ndarray:
    """``(L1(p2) - L1(p1)) / n`` on two-stage coupled samples, one value per trial."""
    out = np.empty(trials)
    for t in range(trials):
        s = two_stage(host, p1, p2, np.random.default_rng([seed, 3, t]))
        out[t] = (component_stats(s.g2, False).L1 - component_stats(s.g1, False).L1) / host.n
    return out
