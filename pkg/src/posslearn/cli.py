"""Command-line entry point: ``posslearn <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from .data import Dataset, derive_rng, read_dataset, write_dataset
from .exact import SeparationProblem, stratify_separable
from .heuristic import IterationRecord, LearnConfig, learn
from .logic import Clause, ParseError
from .mapinf import WeightedClauseTheory, generate_dataset
from .possibilistic import DefaultRule, PossTheory, covers, evaluate
from .vc import build_shatter_instance, is_shattered, vc_lower_bound, vc_subset_bound, vc_upper_bound
from .zranking import to_poss_theory, z_ordering

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NONE = 3  # learn-exact: no separating stratification


class CliError(Exception):
    pass


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write_or_print(path: Optional[str], text: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def read_theory(path: str) -> PossTheory:
    return PossTheory.from_text(_read(path))


def read_clauses(path: str) -> List[Clause]:
    """Clause list; a leading weight or HARD column (tab separated) is ignored."""
    out = []
    for lineno, raw in enumerate(_read(path).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        text = raw.rsplit("\t", 1)[-1]
        try:
            out.append(Clause.parse(text))
        except ParseError as e:
            raise ParseError(f"{path}:{lineno}: {e}") from None
    return out


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return args.global_seed


# --- subcommands -----------------------------------------------------------------------


def cmd_learn_heur(args) -> int:
    data = read_dataset(args.train)
    hard = frozenset(read_clauses(args.hard)) if args.hard else frozenset()
    cfg = LearnConfig(iterations=args.iters, timeout=args.timeout_secs, sample_size=args.sample_size,
                      rng_seed=_seed(args), hard_constraints=hard, worker_count=args.workers,
                      method=args.method)
    err = sys.stderr
    err.write("iteration\terrors\tn\tsample_error\tstrata\tclauses\n")

    def report(r: IterationRecord):
        err.write(f"{r.iteration}\t{r.errors}\t{r.n}\t{r.sample_error:.6g}\t{r.n_strata}\t{r.n_clauses}\n")
        err.flush()

    t = learn(data.examples, cfg, on_iteration=report)
    _write_or_print(args.out, t.to_text())
    return EXIT_OK


def cmd_learn_exact(args) -> int:
    pool = read_clauses(args.theory)
    data = read_dataset(args.train)
    p = SeparationProblem.from_examples(pool, data.examples)
    t = stratify_separable(p)
    if t is None:
        print("NONE")
        return EXIT_NONE
    _write_or_print(args.out, t.to_text())
    if args.out:
        print("FOUND")
    return EXIT_OK


def cmd_zrank(args) -> int:
    d = read_dataset(args.defaults)
    if d.negatives:
        print(f"posslearn zrank: warning: label column ignored; {len(d.negatives)} negative "
              "example(s) skipped", file=sys.stderr)
    rules = [e.rule for e in d.positives]
    t = to_poss_theory(z_ordering(rules))
    _write_or_print(args.out, t.to_text())
    return EXIT_OK


def cmd_query(args) -> int:
    t = read_theory(args.theory)
    r = DefaultRule.parse(args.default)
    print("+" if covers(t, r, method=args.method) == 1 else "-")
    return EXIT_OK


def cmd_eval(args) -> int:
    t = read_theory(args.theory)
    d = read_dataset(args.data)
    sys.stdout.write(evaluate(t, d.examples, method=args.method).to_tsv())
    return EXIT_OK


def cmd_gen_map(args) -> int:
    m = WeightedClauseTheory.from_text(_read(args.weighted))
    seed = _seed(args)
    train = generate_dataset(m, args.k, args.n_train, derive_rng(seed, "gen-map:train"))
    test = generate_dataset(m, args.k, args.n_test, derive_rng(seed, "gen-map:test"))
    write_dataset(args.out_train, Dataset(train))
    write_dataset(args.out_test, Dataset(test))
    return EXIT_OK


def cmd_vc(args) -> int:
    if args.bounds:
        n, k, m = args.bounds
        print("vc_upper\tvc_lower\tvc_subset")
        lower = vc_lower_bound(n, k) if k <= n else float("nan")
        print(f"{vc_upper_bound(n, k):.6g}\t{lower:.6g}\t{vc_subset_bound(n, m, k):.6g}")
    if args.shatter is not None:
        ok = is_shattered(build_shatter_instance(args.shatter))
        print("PASS" if ok else "FAIL")
        if not ok:
            return EXIT_FAIL
    return EXIT_OK


# --- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="posslearn",
                                 description="Learn and query stratified possibilistic theories.")
    ap.add_argument("--seed", dest="global_seed", type=int, default=0,
                    help="seed for every random choice (default 0)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, default=None, help="overrides the global --seed")
    methods = argparse.ArgumentParser(add_help=False)
    methods.add_argument("--method", choices=["auto", "naive", "pruned", "worlds"], default="auto")

    p = sub.add_parser("learn-heur", parents=[seeded, methods], help="greedy learner")
    p.add_argument("--train", required=True)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--timeout-secs", type=float, default=None)
    p.add_argument("--sample-size", type=int, default=10)
    p.add_argument("--hard", help="file of hard clauses, one per line")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_learn_heur)

    p = sub.add_parser("learn-exact", help="exact separating stratification")
    p.add_argument("--theory", required=True, help="clause pool")
    p.add_argument("--train", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_learn_exact)

    p = sub.add_parser("zrank", help="Z-ordering of positive defaults as a theory")
    p.add_argument("--defaults", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_zrank)

    p = sub.add_parser("query", parents=[methods], help="does a theory cover a default?")
    p.add_argument("--theory", required=True)
    p.add_argument("--default", required=True)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("eval", parents=[methods], help="training/test error of a theory")
    p.add_argument("--theory", required=True)
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen-map", parents=[seeded], help="label random defaults by MAP entailment")
    p.add_argument("--weighted", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--n-train", type=int, default=1000)
    p.add_argument("--n-test", type=int, default=1000)
    p.add_argument("--out-train", required=True)
    p.add_argument("--out-test", required=True)
    p.set_defaults(func=cmd_gen_map)

    p = sub.add_parser("vc", help="VC bounds and shattering check")
    p.add_argument("--bounds", type=int, nargs=3, metavar=("N", "K", "M"))
    p.add_argument("--shatter", type=int, metavar="N")
    p.set_defaults(func=cmd_vc)
    return ap


def run_cli(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if args.command == "vc" and not args.bounds and args.shatter is None:
            ap.error("vc needs --bounds or --shatter")
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ParseError, ValueError, KeyError, OSError, CliError) as e:
        print(f"posslearn {args.command}: error: {e}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run_cli())
