"""Command line interface.

Subcommands: gen, learn, stabilize, verify, src-check, experiment, table1.
Exit code 0 means every checked row passed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .coalitions import LabeledSample, Partition, iter_coalitions, members
from .core import blocking_probability, blocks, consistent_with_sample
from .distributions import dist_from_spec, draw_labeled
from .games import (
    anonymous_i1,
    anonymous_i2,
    b_game_alpha,
    gen_anonymous,
    gen_friend_graph,
    gen_pair_values,
    gen_size_decreasing,
    instance_from_json,
    instance_to_json,
    make_profile,
)
from .harness import EXPERIMENTS, ExperimentConfig, run_experiment, table1_suite
from .hcn import Var, CardEq, conj, format_first_match_net, format_net, parse_net
from .learners import (
    NEG_INF,
    learn_anonymous,
    learn_hcn_kdl,
    learn_hcn_linear,
    learn_w_games,
    linear_rules,
)
from .stabilizers import (
    check_src,
    stabilize_bottom_responsive,
    stabilize_enemy_aversion,
    stabilize_w_games,
)

import random


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _load_sample(path: str, n: int | None = None) -> LabeledSample:
    return LabeledSample.from_jsonl(_read(path), n)


def _infer_n(sample: LabeledSample, explicit: int | None) -> int:
    if explicit:
        return explicit
    return max(e.coalition.bit_length() for e in sample)


def _sentinel_rows(table) -> list[list]:
    return [[None if v is NEG_INF else (str(v) if isinstance(v, Fraction) else v)
             for v in row] for row in table.rows]


# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    rng = random.Random(args.seed)
    tag = args.game_class
    if tag == "anon-i1":
        tag, inst = "anonymous", anonymous_i1()
    elif tag == "anon-i2":
        tag, inst = "anonymous", anonymous_i2()
    elif tag in ("as", "fractional", "w", "b"):
        inst = gen_pair_values(rng, tag, args.n)
    elif tag == "anonymous":
        inst = gen_anonymous(rng, args.n, single_peaked=args.single_peaked)
    elif tag in ("ea", "fa"):
        inst = gen_friend_graph(rng, args.n, friend_prob=args.friend_prob)
    elif tag == "size-decreasing":
        inst = gen_size_decreasing(rng, args.n)
    else:
        print(f"unknown class {tag!r}", file=sys.stderr)
        return 2
    _write(args.out, instance_to_json(tag, inst) + "\n")
    print(f"wrote {tag} instance (n={inst.n}) to {args.out}")

    if args.sample_out:
        profile = make_profile(args.game_class if args.game_class in ("ea", "fa") else tag, inst)
        spec = json.loads(args.dist) if args.dist else {"kind": "uniform", "n": inst.n}
        dist = dist_from_spec(spec)
        sample = draw_labeled(dist, profile, rng, args.m)
        _write(args.sample_out, sample.to_jsonl())
        print(f"wrote {args.m} labeled draws to {args.sample_out}")
    return 0


def cmd_learn(args) -> int:
    sample = _load_sample(args.sample)
    n = _infer_n(sample, args.n)
    tag = args.game_class

    if tag == "anonymous":
        table = learn_anonymous(sample, n)
        _write(args.out, json.dumps({"class": "anonymous-hypothesis", "n": n,
                                     "values": _sentinel_rows(table)}) + "\n")
    elif tag == "w":
        pv = learn_w_games(n, sample)
        _write(args.out, json.dumps({"class": "w-hypothesis", "n": n,
                                     "values": _sentinel_rows(pv)}) + "\n")
    elif tag in ("as", "fractional", "hcn-linear"):
        chunks = []
        for i in range(n):
            if tag == "as":
                formulas = [Var(j) for j in range(n) if j != i]
            elif tag == "fractional":
                formulas = [conj(Var(j), CardEq(k))
                            for k in range(2, n + 1) for j in range(n) if j != i]
            else:
                template = parse_net(_read(args.formulas))
                formulas = [r.condition for r in template.rules_for(i)]
            beta = learn_hcn_linear(formulas, sample, i)
            rules = linear_rules(formulas, beta)
            chunks.append((i, rules))
        from .hcn import HedonicNet

        net = HedonicNet(n, tuple(tuple(r) for _, r in chunks))
        _write(args.out, format_net(net))
    elif tag in ("b", "hcn-kdl"):
        k = args.k if args.k is not None else 1
        discount = b_game_alpha(n) if tag == "b" else 0
        parts = []
        for i in range(n):
            net = learn_hcn_kdl(k, sample, i, per_member_discount=discount, n=n)
            parts.append(format_first_match_net(net, n))
        _write(args.out, "".join(parts))
    else:
        print(f"unknown learner class {tag!r}", file=sys.stderr)
        return 2
    print(f"wrote hypothesis for class {tag} (n={n}) to {args.out}")
    return 0


def cmd_stabilize(args) -> int:
    sample = _load_sample(args.sample)
    n = _infer_n(sample, args.n)
    if args.game_class == "bottom-responsive":
        if not args.singletons:
            print("bottom-responsive stabilization needs --singletons", file=sys.stderr)
            return 2
        singles = json.loads(_read(args.singletons))
        pi = stabilize_bottom_responsive(n, sample, singles)
    elif args.game_class == "enemy-aversion":
        pi = stabilize_enemy_aversion(n, sample)
    elif args.game_class == "w":
        guard = 63 if args.unsafe_n else 12
        outcome = stabilize_w_games(n, sample, args.eps, args.delta,
                                    Fraction(args.lam), partition_guard=guard)
        if outcome.core_empty:
            print("core reported empty")
            return 1
        pi = outcome.partition
        print(f"regime: {outcome.regime}")
    else:
        print(f"unknown stabilizer class {args.game_class!r}", file=sys.stderr)
        return 2
    _write(args.out, pi.to_json() + "\n")
    print(f"wrote partition {pi} to {args.out}")
    return 0


def cmd_verify(args) -> int:
    tag, inst = instance_from_json(_read(args.instance))
    if args.kind:
        tag = args.kind
    profile = make_profile(tag, inst)
    pi = Partition.from_json(_read(args.partition), n=inst.n)
    blockers = [s for s in iter_coalitions(inst.n) if blocks(s, pi, profile)]
    print(f"partition: {pi}")
    print(f"blocking coalitions: {len(blockers)}"
          + (f" (first: {members(blockers[0])})" if blockers else ""))
    ok = not blockers
    if args.dist:
        dist = dist_from_spec(json.loads(_read(args.dist)))
        bp = blocking_probability(pi, profile, dist)
        print(f"exact blocking probability: {bp} ({float(bp):.6f})")
        if args.eps is not None:
            ok = bp < Fraction(str(args.eps))
            print(f"eps-PAC stable at eps={args.eps}: {ok}")
    if args.sample:
        sample = _load_sample(args.sample, inst.n)
        consistent = consistent_with_sample(pi, sample, profile)
        print(f"consistent with sample ({len(sample)} entries): {consistent}")
        ok = ok and consistent
    return 0 if ok else 1


def cmd_src_check(args) -> int:
    profiles = []
    for path in args.instances:
        tag, inst = instance_from_json(_read(path))
        profiles.append(make_profile(tag, inst))
    dist = dist_from_spec(json.loads(_read(args.support)))
    verdict = check_src(profiles, dist.support())
    out = {
        "kind": verdict.kind,
        "witness": verdict.witness,
        "consistent_counts": list(verdict.consistent_counts),
        "common_partition": (json.loads(verdict.common_partition.to_json())
                             if verdict.common_partition else None),
    }
    text = json.dumps(out, indent=2)
    print(text)
    if args.out:
        _write(args.out, text + "\n")
    return 0


def cmd_experiment(args) -> int:
    if args.config:
        config = ExperimentConfig.from_json(_read(args.config))
        if args.id:
            config.experiment = args.id
    else:
        if not args.id:
            print("need --id or --config", file=sys.stderr)
            return 2
        config = ExperimentConfig(
            experiment=args.id, n=args.n, eps=args.eps, delta=args.delta,
            lam=args.lam, m=args.m, trials=args.trials, seed=args.seed,
            dist=json.loads(args.dist) if args.dist else None, out=args.out,
            unsafe_n=args.unsafe_n,
        )
    if args.out:
        config.out = args.out
    report = run_experiment(config)
    agg = report.aggregate
    print(f"{config.experiment}: {agg['successes']}/{agg['rows']} rows passed "
          f"(success fraction {agg['success_fraction']:.3f}, "
          f"wall time {agg['wall_time_s']:.1f}s)")
    if config.out:
        print(f"wrote {config.out}.csv and {config.out}.json")
    return 0 if report.passed else 1


def cmd_table1(args) -> int:
    report = table1_suite(trials=args.trials, seed=args.seed)
    for row in report.rows:
        status = "PASS" if row["success"] else "FAIL"
        print(f"{status}  {row['metric']:40s} {row['value']}")
    if args.out:
        with open(args.out + ".csv", "w") as fh:
            fh.write(report.to_csv())
        with open(args.out + ".json", "w") as fh:
            fh.write(report.to_json())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hedonic-pac",
        description="PAC learning and stabilization of hedonic games with exact oracles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a game instance (and optionally a sample)")
    p.add_argument("--class", dest="game_class", required=True,
                   help="as|fractional|w|b|anonymous|ea|fa|size-decreasing|anon-i1|anon-i2")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--friend-prob", type=float, default=0.5)
    p.add_argument("--single-peaked", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--sample-out", help="also draw and label a sample")
    p.add_argument("--m", type=int, default=50, help="sample size for --sample-out")
    p.add_argument("--dist", help="distribution spec JSON (default uniform)")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("learn", help="fit a consistent hypothesis to a sample")
    p.add_argument("--class", dest="game_class", required=True,
                   help="as|fractional|anonymous|w|b|hcn-linear|hcn-kdl")
    p.add_argument("--sample", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, help="conjunction size bound for hcn-kdl")
    p.add_argument("--formulas", help="net file carrying the known formulas (hcn-linear)")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_learn)

    p = sub.add_parser("stabilize", help="produce a sample-consistent partition")
    p.add_argument("--class", dest="game_class", required=True,
                   help="bottom-responsive|enemy-aversion|w")
    p.add_argument("--sample", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--eps", type=float, default=0.3)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--lambda", dest="lam", default="1")
    p.add_argument("--singletons", help="JSON list of known singleton values")
    p.add_argument("--unsafe-n", action="store_true",
                   help="lift the exact-regime partition guard (slow!)")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_stabilize)

    p = sub.add_parser("verify", help="check a partition against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--kind", help="override the evaluator tag (e.g. ea vs fa)")
    p.add_argument("--partition", required=True)
    p.add_argument("--dist", help="distribution spec JSON file for exact blocking probability")
    p.add_argument("--eps", type=float)
    p.add_argument("--sample", help="also check sample consistency")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("src-check", help="sample-resistant-core check on a family")
    p.add_argument("--instances", nargs="+", required=True)
    p.add_argument("--support", required=True, help="distribution spec JSON file")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_src_check)

    p = sub.add_parser("experiment", help="run a registered experiment")
    p.add_argument("--id", choices=sorted(EXPERIMENTS))
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--n", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--m", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", help="distribution spec JSON (inline)")
    p.add_argument("--out", help="output path prefix for CSV + JSON")
    p.add_argument("--unsafe-n", action="store_true",
                   help="lift the enumeration guards (slow!)")
    p.set_defaults(fn=cmd_experiment)

    p = sub.add_parser("table1", help="reproduce the learnability/stabilizability table")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path prefix")
    p.set_defaults(fn=cmd_table1)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as err:
        # covers guard violations, malformed inputs, unlearnable samples,
        # and file problems; tracebacks are for bugs, not bad inputs
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
