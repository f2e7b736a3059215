"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``. The onion criterion
samples a 6.4M-edge host and takes a few minutes.
"""

import itertools
import json
import math
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from dsperc.branching import (MeanMatrix, TwoTypeSpec, cap_hit_fraction, gw_progeny_many,
                              mean_matrix, progeny_tail_bound, spectral_radius)
from dsperc.cli import run
from dsperc.components import almost_balanced_min_cut, extract_core, two_cut_pair_census
from dsperc.degseq import DegreeSequence, onion, regular, validate
from dsperc.experiments import (detect_jumps, multi_jump_predict, onion_curve, sample_host, sweep,
                                theorem7_bound, verify_threshold)
from dsperc.percolate import BLUE, GREEN, RED, percolate, second_stage_probability, two_stage
from dsperc.sampler import SimpleGraph, enumerate_all, sample_uniform, sample_uniform_batch


@pytest.fixture
def verdict(request, capsys):
    """Print ``ACCEPTANCE <id> PASS|FAIL: detail`` past pytest's capture, then assert."""
    start = time.perf_counter()

    def report(ok, detail, limit, setup=0.0):
        took = time.perf_counter() - start + setup
        ok = bool(ok) and took < limit
        with capsys.disabled():
            print(f"\nACCEPTANCE {request.node.name[5:]} {'PASS' if ok else 'FAIL'}: {detail} "
                  f"[{took:.1f}s, limit {limit:.0f}s]")
        assert ok, detail

    return report


def key_arr(edges):
    return tuple(map(tuple, edges[np.lexsort((edges[:, 1], edges[:, 0]))].tolist()))


def test_c01_sampler_uniformity(verdict):
    rng = np.random.default_rng(101)
    ok, parts = True, []
    for degrees in [(1, 1, 1, 1), (2, 2, 2, 2)]:
        seq = DegreeSequence(degrees)
        graphs = [key_arr(g.edges) for g in enumerate_all(seq)]
        counts = Counter(key_arr(e) for e in sample_uniform_batch(seq, 30_000, rng))
        freqs = np.array([counts[g] for g in graphs]) / 30_000
        pval = chisquare([counts[g] for g in graphs]).pvalue
        ok &= len(graphs) == 3 and set(counts) == set(graphs)
        ok &= bool(np.all(np.abs(freqs - 1 / 3) <= 0.03)) and pval > 1e-3
        parts.append(f"{degrees}: freqs={np.round(freqs, 4).tolist()} chi2 p={pval:.3g}")
    verdict(ok, "; ".join(parts), 60)


def test_c02_two_matchings(verdict):
    (host,) = enumerate_all(DegreeSequence((3, 3, 2, 2)))
    edges = [tuple(e) for e in host.edges.tolist()]
    ok = True
    support = None
    for p in (Fraction(1, 10), Fraction(1, 2), Fraction(9, 10)):
        law = Counter()
        for mask in itertools.product((0, 1), repeat=5):
            blue = [e for e, b in zip(edges, mask) if b]
            deg = Counter(v for e in blue for v in e)
            if len(blue) == 2 and all(deg[v] == 1 for v in range(4)):
                law[tuple(blue)] += p ** 2 * (1 - p) ** 3
        total = sum(law.values())
        cond = {k: v / total for k, v in law.items()}
        support = sorted(cond)
        ok &= len(cond) == 2 and all(v == Fraction(1, 2) for v in cond.values())
    rng = np.random.default_rng(202)
    g = sample_uniform(DegreeSequence((3, 3, 2, 2)), rng)
    hits = Counter()
    for _ in range(100_000):
        c = percolate(g, 0.5, rng)
        if c.blue_count == 2 and np.all(c.blue_degrees() == 1):
            hits[key_arr(c.blue().edges)] += 1
    n_hit = sum(hits.values())
    freqs = {k: v / n_hit for k, v in hits.items()}
    ok &= len(freqs) == 2 and all(abs(f - 0.5) <= 0.02 for f in freqs.values())
    verdict(ok, f"exact support={support} (each 1/2 at p=1/10,1/2,9/10); "
                f"MC p=0.5 freqs={[round(f, 4) for f in freqs.values()]} over {n_hit} matchings", 60)


def test_c03_regular_threshold(verdict):
    sw = sweep(regular(10**4, 10), [0.5 / 9, 2 / 9], 20, seed=103)
    low, high = sw.summary(0)["mean"], sw.summary(1)["mean"]
    jumps = detect_jumps(sw, 5)
    verdict(low < 0.02 and high > 0.3 and len(jumps) == 1,
            f"mean L1/n low={low:.4f} high={high:.4f} jumps={len(jumps)}", 120)


@pytest.fixture(scope="module")
def onion_host():
    start = time.perf_counter()
    host = sample_host(onion(2**14, 2), 104)
    return host, time.perf_counter() - start


def test_c04_onion_step_curve(verdict, onion_host):
    host, sampling = onion_host
    sw = onion_curve(2**14, 2, [0.15, 0.35, 0.7], 10, seed=104, host=host)
    m = [sw.summary(i)["mean"] for i in range(3)]
    ok = m[2] > 0.85 and 0.45 <= m[1] <= 0.80 and m[0] < 0.20
    verdict(ok, f"mean L1/n at alpha=0.7: {m[2]:.4f}, 0.35: {m[1]:.4f}, 0.15: {m[0]:.4f} "
                f"(predicted f = 1, 0.5, 0.25; 0.15 flagged beyond truncation; host sampling {sampling:.0f}s)",
            15 * 60, setup=sampling)


def test_onion_threshold_s_fraction(onion_host):
    # S-fraction at the layer-2 degree; shares the host sampled above
    seq = onion(2**14, 2)
    d = int(seq.degrees.min())
    rep = verify_threshold(seq, d, 8, 10, seed=105, host=onion_host[0])
    assert rep.s_fraction_mean > 0.8


def test_c05_theorem7_bound(verdict):
    seq = DegreeSequence([1000] * 100 + [3] * (10**5 - 100))
    b = theorem7_bound(seq, 1000, 1e-4)
    omega = min(1 / (1000 * 1e-4), 1e-4 * 100 * 1000)
    independent = max(100 + (1 + 2 * omega ** (-1 / 3)) * 1e-4 * 100_000, 2 * math.log(1e5) / math.log(omega))
    sw = sweep(seq, [1e-4], 100, seed=105)
    within = int(np.count_nonzero(sw.L1_values(0) <= b.value))
    ok = b.applicable and abs(b.value - independent) < 1e-9 and abs(b.value - 119.3) < 0.05 and within >= 90
    verdict(ok, f"bound={b.value:.4f} (recomputed {independent:.4f}); {within}/100 trials with L1 <= bound, "
                f"max L1={sw.L1_values(0).max()}", 300)


def test_c06_s_fraction(verdict):
    rep = verify_threshold(regular(10**4, 50), 50, 10, 20, seed=106)
    good = int(np.count_nonzero(rep.s_fractions > 0.9))
    verdict(good >= 18, f"p={rep.p_high}: S-fraction > 0.9 in {good}/20 trials "
                        f"(min {rep.s_fractions.min():.4f})", 120)


def _random_graph(n, q, rng):
    pairs = [e for e in itertools.combinations(range(n), 2) if rng.random() < q]
    return SimpleGraph(n, pairs or None)


def _core_instance(rng):
    while True:
        n = int(rng.integers(20, 200))
        delta = float(rng.uniform(0.05, 1.0))
        hubs = int(np.ceil(delta * n))
        d_c = int(rng.integers(1, min(hubs, n - 1) + 1))
        degrees = rng.integers(1, d_c + 1, size=n)
        degrees[:hubs] = rng.integers(d_c, n, size=hubs)
        if degrees.sum() % 2:
            degrees[0] += 1 if degrees[0] < n - 1 else -1
        seq = DegreeSequence(rng.permutation(degrees))
        if validate(seq).feasible and np.count_nonzero(seq.degrees >= d_c) >= delta * n:
            return sample_uniform(seq, rng, burn_in=10 * seq.m), delta, d_c


def _cut_oracle(g):
    n, edges = g.n, g.edges.tolist()
    lo = -(-9 * n // 20)
    best = None
    for size in range(lo, n - lo + 1):
        for side in itertools.combinations(range(n), size):
            s = set(side)
            cross = sum((u in s) != (v in s) for u, v in edges)
            best = cross if best is None else min(best, cross)
    return best


def test_c07_structural_lemmas(verdict):
    rng = np.random.default_rng(107)
    core_bad = 0
    for _ in range(1000):
        g, delta, d_c = _core_instance(rng)
        core_bad += extract_core(g, delta * d_c / 4).n < delta * g.n / 2
    census_bad = census_checked = 0
    for n in range(1, 7):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            g = SimpleGraph(n, [pairs[i] for i in range(len(pairs)) if mask >> i & 1] or None)
            census_bad += two_cut_pair_census(g) > 8 * n * n
            census_checked += 1
    for _ in range(1000):
        n = int(rng.integers(7, 60))
        g = _random_graph(n, rng.uniform(0, 0.3), rng)
        census_bad += two_cut_pair_census(g) > 8 * n * n
        census_checked += 1
    cut_bad = cut_checked = 0
    for n in range(2, 9):
        for _ in range(60):
            g = _random_graph(n, rng.uniform(0, 1), rng)
            expect = _cut_oracle(g)
            if expect is None:  # odd n < 11 admits no almost balanced split
                continue
            cut_bad += almost_balanced_min_cut(g) != expect
            cut_checked += 1
    verdict(core_bad == census_bad == cut_bad == 0,
            f"core violations {core_bad}/1000; census violations {census_bad}/{census_checked}; "
            f"cut mismatches {cut_bad}/{cut_checked}", 600)


def test_c08_coupling(verdict):
    exact_ok = True
    pairs = list(itertools.combinations(range(5), 2))
    for p1, p2 in [(Fraction(1, 5), Fraction(1, 2)), (Fraction(0), Fraction(3, 4)), (Fraction(2, 3), Fraction(5, 6))]:
        q = second_stage_probability(p1, p2)
        law = {BLUE: p1, GREEN: (1 - p1) * q, RED: (1 - p1) * (1 - q)}
        # the law of a stage outcome depends only on the edge count, so one graph per size covers all graphs
        for m in range(6):
            two = Counter()
            for states in itertools.product((BLUE, GREEN, RED), repeat=m):
                w = Fraction(1)
                for s in states:
                    w *= law[s]
                two[tuple(s != RED for s in states)] += w
            for kept in itertools.product((False, True), repeat=m):
                k = sum(kept)
                exact_ok &= two[kept] == p2 ** k * (1 - p2) ** (m - k)
    rng = np.random.default_rng(108)
    g = sample_uniform(DegreeSequence([4] * 10), rng)
    p1, p2, runs = 0.3, 0.55, 100_000
    two_law, direct_law = Counter(), Counter()
    nested = 0
    for _ in range(runs):
        s = two_stage(g, p1, p2, rng)
        nested += not np.any(s.g1.mask & ~s.g2.mask)
        two_law[s.g2.m_edges] += 1
        direct_law[percolate(g, p2, rng).blue_count] += 1
    exact = {k: math.comb(20, k) * p2 ** k * (1 - p2) ** (20 - k) for k in range(21)}
    tv_two = 0.5 * sum(abs(two_law[k] / runs - exact[k]) for k in range(21))
    tv_direct = 0.5 * sum(abs(two_law[k] - direct_law[k]) for k in range(21)) / runs
    ok = exact_ok and g.m_edges == 20 and tv_two <= 0.02 and tv_direct <= 0.02 and nested == runs
    verdict(ok, f"exact equality on <=5 edges: {exact_ok}; TV(g2, Bin)={tv_two:.4f}, "
                f"TV(g2, direct)={tv_direct:.4f}; g1<=g2 in {nested}/{runs}", 120)


def _series(d, p, tmax):
    g = np.zeros(tmax + 1)
    for _ in range(tmax + 1):
        fg = np.zeros(tmax + 1)
        fg[0] = 1.0
        base = g * p
        base[0] += 1 - p
        for _ in range(d):
            fg = np.convolve(fg, base)[: tmax + 1]
        g = np.concatenate(([0.0], fg[:tmax]))
    return g


def test_c09_branching(verdict):
    rng = np.random.default_rng(109)
    tvs = []
    for d, p in [(1, 0.3), (2, 0.2), (2, 0.3), (3, 0.1), (3, 0.3)]:
        exact = _series(d, p, 300)
        exact = np.append(exact, max(0.0, 1 - exact.sum()))
        t = gw_progeny_many(d, p, 10**7, 100_000, rng)
        emp = np.bincount(np.minimum(t, 301), minlength=302) / 100_000
        tvs.append(0.5 * np.abs(emp - exact).sum())
    # P(T > t) <= exp(-t I) across (lambda, t); plus the P(T >= 20) example at d=2, p=0.05
    tail_total = tail_bad = 0
    for d, p in [(2, 0.05), (3, 0.1), (4, 0.2), (10, 0.08), (5, 0.15)]:
        t = gw_progeny_many(d, p, 10**6, 200_000, rng)
        for s in range(0, 41):
            tail_total += 1
            tail_bad += np.mean(t > s) > progeny_tail_bound(d * p, s)
    t = gw_progeny_many(2, 0.05, 10**6, 10**6, rng)
    tail_total += 1
    tail_bad += np.mean(t >= 20) > progeny_tail_bound(0.1, 20)
    raw = spectral_radius(MeanMatrix(2, 3, 1, 2))
    class_bad = 0
    for rho in (0.3, 0.5, 0.8, 1.6, 2.0, 3.0):
        spec = TwoTypeSpec(2, 3, 1, 2, rho / raw)
        frac = cap_hit_fraction(spec, 10**4, 10**4, rng)
        r = spectral_radius(mean_matrix(spec))
        class_bad += (r < 0.9 and frac >= 0.05) or (r > 1.5 and frac <= 0.05)
    ok = max(tvs) <= 0.01 and tail_bad == 0 and class_bad == 0
    verdict(ok, f"max TV={max(tvs):.4f}; tail violations {tail_bad}/{tail_total}; "
                f"classification mismatches {class_bad}/6", 180)


def test_c10_multi_jump_exponents(verdict):
    hand = {1: (0.945, 0.04, 0.025), 2: (0.989, 0.008, 0.005),
            3: (0.9978, 0.0016, 0.001), 4: (0.99956, 0.00032, 0.0002)}
    worst = 0.0
    for r in multi_jump_predict(10**6, 4):
        a, b, g = hand[r.i]
        worst = max(worst, abs(float(r.alpha) - a), abs(float(r.beta) - b), abs(float(r.gamma) - g),
                    abs(float(r.gamma) - 1 / (8 * 5 ** r.i)), abs(float(r.threshold_exponent) + g),
                    abs(float(r.order_exponent) - (1 - b)))
    verdict(worst < 5e-13, f"largest deviation from hand values {worst:.2e} (k <= 4)", 60)


def test_c11_determinism(verdict, tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    start = ["sweep", "--seq", "regular:3000,4", "--p-grid", "0.2,0.3,0.5", "--trials", "8",
             "--seed", "111", "--threads", "1", "--out", str(out)]
    codes = [run(start)]
    sidecar = str(out) + ".json"
    replays = []
    for threads in ("1", "2", "4"):
        target = tmp_path / f"replay{threads}.csv"
        codes.append(run(["replay", sidecar, "--out", str(target), "--threads", threads]))
        replays.append(target.read_bytes() == out.read_bytes())
    seed = json.loads(open(sidecar).read())["config"]["args"]["seed"]
    capsys.readouterr()
    verdict(codes == [0] * 4 and all(replays) and seed == 111,
            f"replays identical for threads 1,2,4: {replays}", 60)
