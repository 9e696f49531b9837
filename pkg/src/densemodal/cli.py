"""Command line front end: solve, oracle, translate and corpus subcommands.

Exit codes: 0 the question was answered (the verdict is on stdout), 64
usage error, 65 parse error, 70 a runtime self-check failed.  Verdicts
never map to nonzero exit codes, so scripts can tell UNSAT from failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .errors import InvariantError
from .formula import (
    BIMODAL,
    Formula,
    Not,
    ParseError,
    UNIMODAL,
    all_formulas,
    atom_names,
    parse,
    render,
)
from .kde import build_index, counter_model, fixpoint, frame_model, kde_sat
from .kdeab import BoundPolicy, SAT, sat_set
from .oracle import (
    KripkeModel,
    bounded_search,
    is_dense,
    model_check,
    model_json_text,
    search_is_bimodal,
    truth_set,
)
from .translate import fresh_atom, relativize

_CORPUS_ATOMS = ("p", "q", "r", "s")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="densemodal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="decide satisfiability or validity")
    solve.add_argument("--logic", choices=("kde", "kdeab"), required=True)
    solve.add_argument("--mode", choices=("sat", "valid"), required=True)
    solve.add_argument("--model", metavar="PATH", help="write the witness or countermodel JSON here")
    solve.add_argument("--bound", choices=("lasso", "counter"), default="lasso")
    solve.add_argument("--no-memo", action="store_true")
    solve.add_argument("--stats", action="store_true")
    solve.add_argument("formula")
    solve.set_defaults(func=_cmd_solve)

    oracle = sub.add_parser("oracle", help="exhaustive bounded model search")
    oracle.add_argument(
        "--class",
        dest="frame_class",
        choices=("all", "dense", "weakly-dense"),
        default="all",
    )
    oracle.add_argument("--max-worlds", type=int, default=3)
    oracle.add_argument("formula")
    oracle.set_defaults(func=_cmd_oracle)

    translate = sub.add_parser("translate", help="relativize boxes through a fresh guard atom")
    translate.add_argument("--fresh", metavar="ATOM")
    translate.add_argument("formula")
    translate.set_defaults(func=_cmd_translate)

    corpus = sub.add_parser("corpus", help="run the cross-validation suite on an enumerated corpus")
    corpus.add_argument("--logic", choices=("kde", "kdeab"), required=True)
    corpus.add_argument("--max-size", type=int, required=True)
    corpus.add_argument("--atoms", type=int, required=True)
    corpus.add_argument("--oracle-worlds", type=int, required=True)
    corpus.set_defaults(func=_cmd_corpus)

    return parser


def _write_model(path: str, model: KripkeModel, include_rb: bool) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(model_json_text(model, include_rb) + "\n")


def _cmd_solve(args) -> int:
    lang = UNIMODAL if args.logic == "kde" else BIMODAL
    phi = parse(args.formula, lang)
    if args.logic == "kde":
        return _solve_kde(args, phi)
    return _solve_kdeab(args, phi)


def _solve_kde(args, phi: Formula) -> int:
    if args.mode == "valid":
        frame, iterations = fixpoint(phi)
        last = build_index(phi).n - 1
        valid = all(p[last] == 1 for p in frame.profiles)
        print("VALID" if valid else "INVALID")
        if args.stats:
            print(json.dumps(
                {
                    "edges": len(frame.rel),
                    "iterations": iterations,
                    "profiles": len(frame.profiles),
                },
                sort_keys=True,
            ))
        if args.model and not valid:
            model = counter_model(phi)
            if model is None or model_check(model, model.root, phi):
                raise InvariantError("countermodel does not falsify the formula")
            if not is_dense(model):
                raise InvariantError("countermodel frame is not dense")
            _write_model(args.model, model, include_rb=False)
        return 0
    result = kde_sat(phi)
    print(result.verdict)
    if args.stats:
        frame, iterations = fixpoint(phi)
        print(json.dumps(
            {
                "edges": len(frame.rel),
                "iterations": iterations,
                "profiles": len(frame.profiles),
            },
            sort_keys=True,
        ))
    if result.witness is not None:
        if not model_check(result.witness, result.witness.root, phi):
            raise InvariantError("witness fails model_check")
        if not is_dense(result.witness):
            raise InvariantError("witness frame is not dense")
        if args.model:
            _write_model(args.model, result.witness, include_rb=False)
    return 0


def _solve_kdeab(args, phi: Formula) -> int:
    policy = BoundPolicy(mode=args.bound)
    memo = not args.no_memo
    query = phi if args.mode == "sat" else Not(phi)
    result = sat_set({query}, policy=policy, memo=memo)
    if args.mode == "sat":
        print(result.verdict)
    else:
        print("VALID" if result.verdict != SAT else "INVALID")
    if args.stats:
        print(json.dumps(result.stats.as_dict(), sort_keys=True))
    if args.model and result.witness is not None:
        _write_model(args.model, result.witness, include_rb=True)
    return 0


def _parse_either_mode(text: str) -> Formula:
    try:
        return parse(text, UNIMODAL)
    except ParseError as unimodal_error:
        try:
            return parse(text, BIMODAL)
        except ParseError:
            raise unimodal_error


def _cmd_oracle(args) -> int:
    phi = _parse_either_mode(args.formula)
    frame_class = args.frame_class.replace("-", "_")
    model = bounded_search(
        {phi},
        frame_class,
        max_worlds=args.max_worlds,
        max_atoms=max(1, len(atom_names(phi))),
    )
    if model is None:
        print("NONE-WITHIN-BOUND")
        return 0
    print("FOUND")
    print(model_json_text(model, include_rb=search_is_bimodal({phi}, frame_class)))
    return 0


def _cmd_translate(args) -> int:
    phi = parse(args.formula, UNIMODAL)
    guard = args.fresh if args.fresh is not None else fresh_atom(phi)
    print(render(relativize(guard, phi), UNIMODAL))
    return 0


def _corpus_names(count: int) -> tuple[str, ...]:
    if not 1 <= count <= len(_CORPUS_ATOMS):
        raise ValueError(f"--atoms must be between 1 and {len(_CORPUS_ATOMS)}")
    return _CORPUS_ATOMS[:count]


def run_kde_corpus(max_size: int, atoms: int, oracle_worlds: int) -> tuple[list[str], bool]:
    """Cross-validate the dense-logic solver against the oracle.

    Checks, for every unimodal formula up to the size bound: the fixpoint
    frame is nonempty and dense, every profile satisfies exactly its bits,
    SAT witnesses check out, and the oracle never finds a dense model for a
    formula the solver rejects.
    """
    names = _corpus_names(atoms)
    formulas = all_formulas(max_size, names)
    sat_count = 0
    oracle_found = 0
    failures: list[str] = []
    for phi in formulas:
        ix = build_index(phi)
        frame, _ = fixpoint(phi)
        if not frame.profiles:
            failures.append(f"empty fixpoint: {phi}")
            continue
        base = frame_model(frame, ix, min(frame.profiles))
        if not is_dense(base):
            failures.append(f"fixpoint frame not dense: {phi}")
        order = sorted(frame.profiles)
        ids = {p: i for i, p in enumerate(order)}
        for i, entry in enumerate(ix.entries):
            holds = truth_set(base, entry)
            for p in order:
                if (ids[p] in holds) != (p[i] == 1):
                    failures.append(f"profile bit mismatch: {phi} at entry {i}")
                    break
        result = kde_sat(phi)
        if result.verdict == SAT:
            sat_count += 1
            witness = result.witness
            if not model_check(witness, witness.root, phi) or not is_dense(witness):
                failures.append(f"bad witness: {phi}")
        found = bounded_search({phi}, "dense", max_worlds=oracle_worlds, max_atoms=atoms)
        if found is not None:
            oracle_found += 1
            if result.verdict != SAT:
                failures.append(f"oracle found a dense model but solver said UNSAT: {phi}")
    lines = [
        f"corpus kde: max-size={max_size} atoms={atoms} oracle-worlds={oracle_worlds}",
        f"formulas: {len(formulas)}",
        f"solver sat: {sat_count} unsat: {len(formulas) - sat_count}",
        f"oracle found: {oracle_found} none-within-bound: {len(formulas) - oracle_found}",
        f"violations: {len(failures)}",
    ]
    lines.extend(f"  {f}" for f in failures[:20])
    return lines, not failures


def run_kdeab_corpus(max_size: int, atoms: int, oracle_worlds: int) -> tuple[list[str], bool]:
    """Cross-validate the weak-density solver against the oracle.

    One direction is exact: whenever the oracle finds a weakly dense model
    within the bound, the solver must answer SAT.  The other direction is a
    complete certificate: every SAT verdict ships a witness that is checked
    internally, so a bad one raises and is counted here.
    """
    names = _corpus_names(atoms)
    formulas = all_formulas(max_size, names, modalities=("a", "b"))
    sat_count = 0
    oracle_found = 0
    failures: list[str] = []
    for phi in formulas:
        try:
            result = sat_set({phi})
        except InvariantError as exc:
            failures.append(f"witness verification failed: {phi}: {exc}")
            continue
        if result.verdict == SAT:
            sat_count += 1
        found = bounded_search(
            {phi}, "weakly_dense", max_worlds=oracle_worlds, max_atoms=atoms
        )
        if found is not None:
            oracle_found += 1
            if result.verdict != SAT:
                failures.append(
                    f"oracle found a weakly dense model but solver said UNSAT: {phi}"
                )
    lines = [
        f"corpus kdeab: max-size={max_size} atoms={atoms} oracle-worlds={oracle_worlds}",
        f"formulas: {len(formulas)}",
        f"solver sat: {sat_count} unsat: {len(formulas) - sat_count}",
        f"oracle found: {oracle_found} none-within-bound: {len(formulas) - oracle_found}",
        f"violations: {len(failures)}",
    ]
    lines.extend(f"  {f}" for f in failures[:20])
    return lines, not failures


def _cmd_corpus(args) -> int:
    runner = run_kde_corpus if args.logic == "kde" else run_kdeab_corpus
    lines, ok = runner(args.max_size, args.atoms, args.oracle_worlds)
    for line in lines:
        print(line)
    print("CORPUS PASS" if ok else "CORPUS FAIL")
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 64
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 65
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 64
    except (InvariantError, AssertionError) as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 70
