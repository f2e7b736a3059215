"""Command-line front end.

Exit status: 0 success, 1 usage error, 2 infeasible sequence or size guard.
Experiment subcommands write a CSV plus a ``<csv>.json`` sidecar whose
``config`` block replays the run: ``dsperc replay out.csv.json``.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import branching, components, degseq, experiments, percolate, sampler

MAX_EDGES = 10**8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    subcommand: str
    args: dict

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        return cls(data["subcommand"], dict(data["args"]))


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise argparse.ArgumentTypeError(f"not an integer: {text}")
    return int(value)


def _seq(args) -> degseq.DegreeSequence:
    try:
        seq = degseq.parse_sequence(args.seq)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from exc
    except ValueError as exc:
        raise UsageError(f"bad sequence {args.seq!r}: {exc}") from exc
    if seq.m // 2 > MAX_EDGES and not getattr(args, "force", False):
        raise sampler.GuardError(f"{seq.m // 2} edges exceeds {MAX_EDGES}; pass --force")
    return seq


def _graph(args, rng) -> sampler.SimpleGraph:
    if getattr(args, "graph", None):
        try:
            return sampler.SimpleGraph.load(args.graph)
        except OSError as exc:
            raise UsageError(str(exc)) from exc
    if not args.seq:
        raise UsageError("need --graph or --seq")
    return sampler.sample_uniform(_seq(args), rng, args.burn_in)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_outputs(sw: experiments.SweepResult, args, config: RunConfig) -> None:
    out = Path(args.out)
    out.write_text(sw.to_csv())
    if args.trials_out:
        Path(args.trials_out).write_text(sw.trials_csv())
    side = {"config": config.to_json(), "metadata": sw.metadata}
    Path(str(out) + ".json").write_text(json.dumps(side, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out} and {out}.json")


# subcommands ---------------------------------------------------------------

def cmd_feasible(args) -> int:
    rep = degseq.validate(_seq(args))
    print(rep)
    return 0 if rep.feasible else 2


def cmd_gen(args) -> int:
    _emit(_seq(args).to_text(), args.out)
    return 0


def cmd_sample(args) -> int:
    seq = _seq(args)
    g = sampler.sample_uniform(seq, np.random.default_rng(args.seed), args.burn_in)
    _emit(g.to_text(), args.out)
    return 0


def cmd_enumerate(args) -> int:
    graphs = sampler.enumerate_all(_seq(args))
    chunks = [g.to_text() for g in graphs]
    _emit("\n".join(chunks) + f"# {len(graphs)} graphs\n", args.out)
    return 0


def cmd_percolate(args) -> int:
    rng = np.random.default_rng(args.seed)
    g = _graph(args, rng)
    c = percolate.percolate(g, args.p, rng)
    if args.out:
        c.save(args.out)
    st = components.component_stats(c)
    print(f"n={g.n} edges={g.m_edges} blue={c.blue_count} L1={st.L1} "
          f"second={st.second_largest} components={st.count}")
    return 0


def _sweep_kwargs(args) -> dict:
    return {"burn_in": args.burn_in, "threads": args.threads or os.cpu_count() or 1}


def cmd_sweep(args, config) -> int:
    sw = experiments.sweep(_seq(args), _floats(args.p_grid), args.trials, args.seed,
                           args.resample, **_sweep_kwargs(args))
    _write_outputs(sw, args, config)
    return 0


def cmd_onion_curve(args, config) -> int:
    sw = experiments.onion_curve(args.n, args.k, _floats(args.alpha_grid), args.trials, args.seed,
                                 resample_graph=args.resample, **_sweep_kwargs(args))
    _write_outputs(sw, args, config)
    for a, beyond in zip(sw.grid, sw.metadata["beyond_truncation"]):
        if beyond:
            print(f"alpha={a}: beyond truncation depth k={args.k}")
    return 0


def cmd_verify_threshold(args, config) -> int:
    rep = experiments.verify_threshold(_seq(args), args.d, args.factor, args.trials, args.seed,
                                       resample_graph=args.resample, **_sweep_kwargs(args))
    low = rep.low.summary(0)
    lines = ["alpha_or_p,trials,mean_L1_frac,std_L1_frac,min,max,mean_second_frac,s_fraction"]
    lines.append(f"{rep.p_low!r},{low['trials']},{low['mean']!r},{low['std']!r},{low['min']!r},"
                 f"{low['max']!r},{low['mean_second']!r},")
    if rep.high is not None:
        hi = rep.high.summary(0)
        lines.append(f"{rep.p_high!r},{hi['trials']},{hi['mean']!r},{hi['std']!r},{hi['min']!r},"
                     f"{hi['max']!r},{hi['mean_second']!r},{rep.s_fraction_mean!r}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    meta = dict(rep.low.metadata, delta_hat=rep.delta_hat, d=args.d, factor=args.factor)
    Path(args.out + ".json").write_text(json.dumps({"config": config.to_json(), "metadata": meta},
                                                   indent=2, sort_keys=True) + "\n")
    print(f"delta_hat={rep.delta_hat:.4f} low p={rep.p_low:.4g}: mean L1/n={rep.low_mean:.4f}")
    if rep.high is not None:
        print(f"high p={rep.p_high:.4g}: mean L1/n={rep.high_mean:.4f} S-fraction={rep.s_fraction_mean:.4f}")
    print(f"wrote {args.out} and {args.out}.json")
    return 0


def cmd_predict(args) -> int:
    if args.what == "multi-jump":
        print("i,alpha,beta,gamma,threshold_exponent,threshold_p,order_exponent,order")
        for r in experiments.multi_jump_predict(args.n, args.k):
            print(f"{r.i},{float(r.alpha):.12f},{float(r.beta):.12f},{float(r.gamma):.12f},"
                  f"{float(r.threshold_exponent):.12f},{r.threshold:.6g},{float(r.order_exponent):.12f},{r.order:.6g}")
        return 0
    seq = _seq(args)
    if args.what == "pc":
        print(repr(degseq.molloy_reed_pc(seq)))
    elif args.what == "theorem7":
        b = experiments.theorem7_bound(seq, args.d, args.p)
        print(f"bound={b.value!r} omega={b.omega!r} applicable={b.applicable} reason={b.reason}")
    elif args.what == "theorem6":
        upper, lower = experiments.theorem6_bounds(seq, args.d, args.p, args.omega)
        print(f"upper={upper!r} lower={lower!r}")
    return 0


def cmd_census(args) -> int:
    g = _graph(args, np.random.default_rng(args.seed))
    count = components.two_cut_pair_census(g)
    print(f"census={count} bound={8 * g.n ** 2}")
    return 0


def cmd_progeny(args) -> int:
    rng = np.random.default_rng(args.seed)
    t = branching.gw_progeny_many(args.d, args.p, args.cap, args.runs, rng)
    print(f"mean={t.mean()!r} cap_hits={int(np.count_nonzero(t >= args.cap))}")
    return 0


# parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dsperc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_seq(p, required=True):
        p.add_argument("--seq", required=required,
                       help="3,3,2,2 | regular:n,d | onion:n,k | multijump:n,k | file")
        p.add_argument("--force", action="store_true", help=f"allow more than {MAX_EDGES} edges")

    def with_seed(p):
        p.add_argument("--seed", type=_int, default=None)
        p.add_argument("--burn-in", type=_int, default=None, help="attempted switches (default 30*m)")

    def with_sweep(p):
        p.add_argument("--trials", type=_int, default=10)
        p.add_argument("--resample", action="store_true", help="fresh host graph per trial")
        p.add_argument("--threads", type=_int, default=None)
        p.add_argument("--out", default=f"{p.prog.split()[-1]}.csv")
        p.add_argument("--trials-out", default=None)

    p = sub.add_parser("feasible"); with_seq(p)
    p = sub.add_parser("gen"); with_seq(p); p.add_argument("--out")
    p = sub.add_parser("sample"); with_seq(p); with_seed(p); p.add_argument("--out")
    p = sub.add_parser("enumerate"); with_seq(p); p.add_argument("--out")
    p = sub.add_parser("percolate"); with_seq(p, False); with_seed(p)
    p.add_argument("--graph"); p.add_argument("--p", type=float, required=True); p.add_argument("--out")
    p = sub.add_parser("sweep"); with_seq(p); with_seed(p); with_sweep(p)
    p.add_argument("--p-grid", required=True)
    p = sub.add_parser("onion-curve"); with_seed(p); with_sweep(p)
    p.add_argument("--n", type=_int, required=True); p.add_argument("--k", type=_int, required=True)
    p.add_argument("--alpha-grid", required=True)
    p = sub.add_parser("verify-threshold"); with_seq(p); with_seed(p); with_sweep(p)
    p.add_argument("--d", type=_int, required=True); p.add_argument("--factor", type=float, default=10.0)
    p = sub.add_parser("predict")
    p.add_argument("what", choices=["multi-jump", "theorem7", "theorem6", "pc"])
    p.add_argument("--n", type=float); p.add_argument("--k", type=_int, default=1)
    p.add_argument("--seq"); p.add_argument("--force", action="store_true")
    p.add_argument("--d", type=_int); p.add_argument("--p", type=float)
    p.add_argument("--omega", type=float, default=1.0)
    p = sub.add_parser("census"); with_seq(p, False); with_seed(p); p.add_argument("--graph")
    p = sub.add_parser("progeny")
    p.add_argument("--d", type=_int, required=True); p.add_argument("--p", type=float, required=True)
    p.add_argument("--cap", type=_int, default=10**6); p.add_argument("--runs", type=_int, default=10**4)
    p.add_argument("--seed", type=_int, default=None)
    p = sub.add_parser("replay", help="re-run an experiment from its JSON sidecar")
    p.add_argument("sidecar"); p.add_argument("--out"); p.add_argument("--threads", type=_int)
    return ap


COMMANDS = {"feasible": cmd_feasible, "gen": cmd_gen, "sample": cmd_sample, "enumerate": cmd_enumerate,
            "percolate": cmd_percolate, "predict": cmd_predict, "census": cmd_census, "progeny": cmd_progeny}
EXPERIMENTS = {"sweep": cmd_sweep, "onion-curve": cmd_onion_curve, "verify-threshold": cmd_verify_threshold}
# flags that never change results and are therefore not replayed
_VOLATILE = ("out", "trials_out", "threads", "command")


def _replay_args(args) -> argparse.Namespace:
    try:
        side = json.loads(Path(args.sidecar).read_text())
        config = RunConfig.from_json(side["config"])
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read sidecar {args.sidecar}: {exc}") from exc
    if config.subcommand not in EXPERIMENTS:
        raise UsageError(f"sidecar holds a non-replayable command {config.subcommand!r}")
    out = args.out or (args.sidecar[: -len(".json")] if args.sidecar.endswith(".json") else args.sidecar + ".csv")
    return argparse.Namespace(**config.args, command=config.subcommand, out=out, trials_out=None,
                              threads=args.threads)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            args = _replay_args(args)
        if args.command in COMMANDS:
            if getattr(args, "seed", "absent") is None:
                args.seed = secrets.randbits(63)
            return COMMANDS[args.command](args)
        if args.seed is None:
            args.seed = secrets.randbits(63)
        config = RunConfig(args.command, {k: v for k, v in vars(args).items() if k not in _VOLATILE})
        return EXPERIMENTS[args.command](args, config)
    except (sampler.InfeasibleSequence, sampler.GuardError) as exc:
        print(f"dsperc: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, OSError) as exc:
        print(f"dsperc: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
