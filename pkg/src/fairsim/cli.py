"""Command-line front end.

Exit codes: 0 holds, 1 fails, 2 inconclusive, 3 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import formats
from .game import START, build_simulation_game, solve_parity
from .matrixsim import ApproxSequences, check_forward, search_sequences, verify_matrix_fair_sim
from .nbta import (
    AutomatonError,
    check_fair_simulation,
    initial_condition,
    largest_fair_simulation,
    solution_relation,
)
from .oracle import (
    LassoWord,
    cylinder_inclusion,
    nbw_inclusion_bounded,
    nbw_lasso_member,
    tree_prefix_inclusion,
)
from .pbwa import PbwaError, cylinder_prob
from .suite import random_suite

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"
EXIT = {HOLDS: 0, FAILS: 1, INCONCLUSIVE: 2}
USAGE_ERROR = 3


@dataclass
class CheckReport:
    verdict: str
    condition: str | None = None
    payload: object = None
    seconds: float = 0.0
    config: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT[self.verdict]

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "condition": self.condition,
            "payload": _jsonable(self.payload),
            "seconds": round(self.seconds, 6),
            "config": _jsonable(self.config),
            "notes": self.notes,
        }

    def render(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        if self.condition:
            lines.append(f"condition: {self.condition}")
        if self.payload is not None:
            lines.append(f"payload: {_show(self.payload)}")
        lines += [f"note: {n}" for n in self.notes]
        lines.append("config: " + ", ".join(f"{k}={_show(v)}" for k, v in self.config.items()))
        lines.append(f"time: {self.seconds:.3f}s")
        return "\n".join(lines)


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        items = [_jsonable(x) for x in v]
        return sorted(items, key=repr) if isinstance(v, (set, frozenset)) else items
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    return str(v)


def _show(v) -> str:
    if isinstance(v, (set, frozenset)):
        return "{" + ", ".join(sorted(map(_show, v))) + "}"
    if isinstance(v, tuple):
        return "(" + ", ".join(map(_show, v)) + ")"
    if isinstance(v, list):
        return "".join("\n  " + _show(x) for x in v)
    return str(v)


def _relation_lines(R) -> list:
    return sorted(f"{x} {y}" for x, y in R)


def check_nd(args) -> CheckReport:
    X = formats.parse_automaton(args.lhs, "nbta")
    Y = formats.parse_automaton(args.rhs, "nbta")
    config = {"lhs": args.lhs, "rhs": args.rhs, "method": args.method, "relation": args.relation}
    report = CheckReport(HOLDS, config=config)
    verdicts = {}
    if args.method in ("fixpoint", "both"):
        if args.relation:
            R = formats.load_relation(args.relation, X, Y)
            res = check_fair_simulation(X, Y, R)
            verdicts["fixpoint"] = res.holds
            if res.holds:
                report.payload = _relation_lines(R)
            else:
                report.condition = res.condition
                report.payload = {"witness": _show(res.witness), "detail": res.detail}
        else:
            R = largest_fair_simulation(X, Y)
            verdicts["fixpoint"] = R is not None
            if R is not None:
                report.payload = _relation_lines(R)
            else:
                res = initial_condition(X, Y, solution_relation(X, Y))
                report.condition = res.condition
                report.payload = {"witness": _show(res.witness), "detail": res.detail}
    if args.method in ("game", "both"):
        game = build_simulation_game(X, Y)
        sol = solve_parity(game)
        verdicts["game"] = sol.winner[(START,)] == 0
        if args.dump_game:
            report.notes.append("game:\n" + game.dump(sol.winner))
        if "fixpoint" not in verdicts:
            if not verdicts["game"]:
                report.condition = "odd-wins"
                report.payload = {"odd_strategy": {_show(k): _show(v) for k, v in sol.strategy.items() if game.owner[k] == 1}}
            else:
                report.payload = {"even_region_size": len(sol.even_region)}
    if len(set(verdicts.values())) > 1:
        report.notes.append(f"methods disagree: {verdicts}")
        report.verdict = FAILS
        report.condition = "method-disagreement"
        return report
    report.verdict = HOLDS if all(verdicts.values()) else FAILS
    return report


def _print_seqs(seqs: ApproxSequences) -> dict:
    out = {
        "bound": seqs.bound,
        "seq11": [_jsonable(m) for m in seqs.seq11],
        "seq12": [_jsonable(m) for m in seqs.seq12],
    }
    if seqs.omega:
        out["limit11"] = _jsonable(seqs.limit11)
        out["limit12"] = _jsonable(seqs.limit12)
        out["ratio"] = str(seqs.ratio)
    return out


def check_prob(args) -> CheckReport:
    X = formats.parse_automaton(args.lhs, "pbwa")
    Y = formats.parse_automaton(args.rhs, "pbwa")
    A, seqs = formats.load_mat(args.matrix, X, Y)
    config = {
        "lhs": args.lhs,
        "rhs": args.rhs,
        "matrix": args.matrix,
        "search": args.search,
        "iteration_cap": args.iteration_cap,
    }
    report = CheckReport(HOLDS, config=config)
    if args.search or seqs is None:
        if seqs is None and not args.search:
            report.notes.append("no sequences in the witness file; searching")
        found = search_sequences(X, Y, A, args.iteration_cap)
        if found is None:
            pre = check_forward(X, Y, A)
            if not pre:
                report.verdict = FAILS
                report.condition = pre.condition
                report.payload = {"letter": pre.letter, "entry": pre.entry, "detail": pre.detail}
                return report
            report.verdict = INCONCLUSIVE
            report.condition = "search"
            report.notes.append("no certified approximation sequences found; this is not a refutation")
            return report
        seqs = found
    v = verify_matrix_fair_sim(X, Y, A, seqs)
    if v:
        report.payload = _print_seqs(seqs)
    else:
        report.verdict = FAILS
        report.condition = v.condition
        report.payload = {"letter": v.letter, "entry": v.entry, "detail": v.detail}
    return report


def lang_prob(args) -> CheckReport:
    P = formats.parse_automaton(args.automaton, "pbwa")
    word = tuple(args.word) if " " not in args.word else tuple(args.word.split())
    unknown = [a for a in word if a not in P.alphabet]
    if unknown:
        raise PbwaError(f"letters {unknown} not in the alphabet")
    p = cylinder_prob(P, word)
    return CheckReport(HOLDS, payload=p, config={"automaton": args.automaton, "word": args.word})


def _lasso(text: str) -> LassoWord:
    stem, sep, loop = text.partition(":")
    if not sep:
        raise ValueError("lasso must be written stem:loop")
    return LassoWord(tuple(stem), tuple(loop))


def oracle_cmd(args) -> CheckReport:
    config = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
    if args.oracle == "lasso":
        X = formats.parse_automaton(args.lhs, "nbta")
        if args.word:
            ok = nbw_lasso_member(X, _lasso(args.word))
            return CheckReport(HOLDS if ok else FAILS, None if ok else "not-member", str(_lasso(args.word)), config=config)
        Y = formats.parse_automaton(args.rhs, "nbta")
        w = nbw_inclusion_bounded(X, Y, args.stem_bound, args.loop_bound)
        if w is None:
            return CheckReport(HOLDS, config=config, notes=["bounded check only"])
        return CheckReport(FAILS, "lasso-counterexample", str(w), config=config)
    if args.oracle == "prefix":
        X = formats.parse_automaton(args.lhs, "nbta")
        Y = formats.parse_automaton(args.rhs, "nbta")
        t = tree_prefix_inclusion(X, Y, args.depth)
        if t is None:
            return CheckReport(HOLDS, config=config, notes=["prefix inclusion is necessary, not sufficient"])
        return CheckReport(FAILS, "prefix-counterexample", str(t), config=config)
    X = formats.parse_automaton(args.lhs, "pbwa")
    Y = formats.parse_automaton(args.rhs, "pbwa")
    w = cylinder_inclusion(X, Y, args.max_length)
    if w is None:
        return CheckReport(HOLDS, config=config, notes=["bounded check only"])
    return CheckReport(
        FAILS,
        "cylinder-counterexample",
        {"word": "".join(w), "lhs": cylinder_prob(X, w), "rhs": cylinder_prob(Y, w)},
        config=config,
    )


def suite_cmd(args) -> CheckReport:
    s = random_suite(args.seed, args.count, args.max_states)
    return CheckReport(
        HOLDS if s.ok else FAILS,
        None if s.ok else "property-violation",
        s.lines(),
        config={"seed": args.seed, "count": args.count, "max_states": args.max_states},
    )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fairsim", description="Fair simulation checks for Büchi automata.")
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    sub = p.add_subparsers(dest="command", required=True)

    nd = sub.add_parser("check-nd", help="fair simulation between tree automata")
    nd.add_argument("--lhs", required=True, help="simulated automaton (.nbta)")
    nd.add_argument("--rhs", required=True, help="simulating automaton (.nbta)")
    nd.add_argument("--relation", help="candidate relation (.rel); default: the largest one")
    nd.add_argument("--method", choices=("fixpoint", "game", "both"), default="both")
    nd.add_argument("--dump-game", action="store_true", help="print positions with owners, priorities and winners")
    nd.set_defaults(func=check_nd)

    pr = sub.add_parser("check-prob", help="matrix fair simulation between probabilistic word automata")
    pr.add_argument("--lhs", required=True)
    pr.add_argument("--rhs", required=True)
    pr.add_argument("--matrix", required=True, help="witness (.mat)")
    pr.add_argument("--search", action="store_true", help="search approximation sequences")
    pr.add_argument("--iteration-cap", type=int, default=64)
    pr.set_defaults(func=check_prob)

    lp = sub.add_parser("lang-prob", help="probability of the cylinder of a finite word")
    lp.add_argument("--automaton", required=True)
    lp.add_argument("--word", required=True, help="letters, concatenated or space separated")
    lp.set_defaults(func=lang_prob)

    orc = sub.add_parser("oracle", help="bounded language oracles")
    osub = orc.add_subparsers(dest="oracle", required=True)
    la = osub.add_parser("lasso", help="lasso membership (--word stem:loop) or bounded inclusion (--rhs)")
    la.add_argument("--lhs", required=True)
    la.add_argument("--rhs")
    la.add_argument("--word")
    la.add_argument("--stem-bound", type=int, default=3)
    la.add_argument("--loop-bound", type=int, default=3)
    pf = osub.add_parser("prefix", help="depth-bounded tree prefix inclusion")
    pf.add_argument("--lhs", required=True)
    pf.add_argument("--rhs", required=True)
    pf.add_argument("--depth", type=int, default=3)
    cy = osub.add_parser("cylinder", help="cylinder probability inclusion up to a word length")
    cy.add_argument("--lhs", required=True)
    cy.add_argument("--rhs", required=True)
    cy.add_argument("--max-length", type=int, default=6)
    for q in (la, pf, cy):
        q.set_defaults(func=oracle_cmd)

    st = sub.add_parser("suite", help="seeded random cross-validation and soundness run")
    st.add_argument("--seed", type=int, default=1)
    st.add_argument("--count", type=int, default=100)
    st.add_argument("--max-states", type=int, default=4)
    st.set_defaults(func=suite_cmd)
    return p


def run_check(argv=None) -> tuple[CheckReport | None, int]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return None, 0 if e.code == 0 else USAGE_ERROR
    if args.command == "oracle" and args.oracle == "lasso" and not (args.word or args.rhs):
        print("error: oracle lasso needs --word or --rhs", file=sys.stderr)
        return None, USAGE_ERROR
    start = time.perf_counter()
    try:
        report = args.func(args)
    except (formats.FormatError, AutomatonError, PbwaError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return None, USAGE_ERROR
    report.seconds = time.perf_counter() - start
    print(json.dumps(report.as_dict(), indent=2) if args.json else report.render())
    return report, report.exit_code


def main(argv=None) -> int:
    return run_check(argv)[1]


if __name__ == "__main__":
    sys.exit(main())
