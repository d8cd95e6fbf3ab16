"""Command-line surface: factor, enumerate, table, verify-rules, oracle, refine, valuation.

Exit codes: 0 success / strong form, 1 usage or check failure, 2 stopped,
3 budget exceeded or incomplete.  The default step budget can be overridden
with the STARFACTOR_BUDGET environment variable.  JSON output is canonical
(sorted keys, fixed separators), so parsing and re-serializing a report is
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import engine
from .words import E, R, ParseError, eval_word, format_word, matrix_of, parse_word
from .engine import (
    Always6a,
    Always6b,
    Scripted,
    STOPPED,
    STRONG_FORM,
    factor_run,
    rule_rhs,
    split_strong,
)
from .enumerator import (
    REFERENCE_DIAGONAL_COUNTS,
    count_table,
    enumerate_factorizations,
)
from .directed import (
    DirectedSeq,
    crosscheck_opposite,
    crosscheck_same,
    directed,
)
from .fans import UNIT_CONE, build_common_refinement, fan_to_text, verify_refinement
from .valuations import (
    ContainmentError,
    TieError,
    Valuation,
    run_along_valuation,
    search_b_nontermination,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_STOPPED = 2
EXIT_BUDGET = 3

BUDGET_ENV = "STARFACTOR_BUDGET"


def _default_budget(fallback: int) -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return fallback
    try:
        value = int(raw)
        if value < 0:
            raise ValueError
        return value
    except ValueError:
        raise SystemExit(f"invalid {BUDGET_ENV} value {raw!r}")


def _emit_json(payload) -> None:
    print(json.dumps(payload, sort_keys=True, separators=(",", ":")))


def _outcome_payload(outcome: engine.RunOutcome) -> dict:
    steps = [
        {
            "position": step.position,
            "rule": str(step.rule),
            "after": None if step.after is None else format_word(step.after),
        }
        for step in outcome.trace
    ]
    return {
        "status": outcome.status,
        "result": None if outcome.result is None else format_word(outcome.result),
        "choices": list(outcome.choices),
        "steps": steps,
    }


def _status_exit(status: str) -> int:
    if status == STRONG_FORM:
        return EXIT_OK
    if status == STOPPED:
        return EXIT_STOPPED
    return EXIT_BUDGET


# -- subcommands -----------------------------------------------------------------


def cmd_factor(args) -> int:
    try:
        word = parse_word(args.word)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.choices is not None:
        policy = Scripted(args.choices.split(","))
    elif args.policy == "always6b":
        policy = Always6b()
    else:
        policy = Always6a()
    budget = args.budget if args.budget is not None else _default_budget(engine.DEFAULT_BUDGET)
    outcome = factor_run(word, args.alg, policy, budget=budget)
    if args.format == "json":
        _emit_json(_outcome_payload(outcome))
    else:
        print(f"status: {outcome.status}  steps: {outcome.steps}")
        if outcome.result is not None:
            t_part, s_part, perms = split_strong(outcome.result)
            print(f"result: {format_word(outcome.result)}")
            print(f"T: {format_word(t_part) or '(empty)'}")
            print(f"S: {format_word(s_part) or '(empty)'}")
            print(f"perms: {format_word(perms) or '(none)'}")
        else:
            print(f"word: {format_word(outcome.word)}")
        if args.trace:
            for step in outcome.trace:
                after = "(stop)" if step.after is None else format_word(step.after)
                print(f"{step.position}\t{step.rule}\t{after}")
    return _status_exit(outcome.status)


def cmd_enumerate(args) -> int:
    try:
        word = parse_word(args.word)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    budget = args.budget if args.budget is not None else _default_budget(10**5)
    res = enumerate_factorizations(word, budget_per_branch=budget)
    if args.format == "json":
        _emit_json(
            {
                "completed": [
                    {"choices": list(f.choices), "result": format_word(f.word)}
                    for f in res.completed
                ],
                "stopped": res.stopped_count,
                "exceeded": res.exceeded_count,
                "distinct_results": res.distinct_results,
                "incomplete": res.incomplete,
            }
        )
    else:
        for f in res.completed:
            tag = ",".join(f.choices) or "-"
            print(f"[{tag}] {format_word(f.word)}")
        print(
            f"completed: {res.completed_count}  stopped: {res.stopped_count}  "
            f"exceeded: {res.exceeded_count}  distinct: {res.distinct_results}"
        )
    if res.exceeded_count or res.incomplete:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_table(args) -> int:
    rows = list(range(1, args.max + 1))
    if args.long:
        rows += [r for r in (20, 30, 40) if r > args.max]
    budget = args.budget if args.budget is not None else _default_budget(10**5)
    table = count_table(max(rows), budget_per_branch=budget, rows=rows)
    if args.format == "csv":
        print("m,n,completed,stopped,distinct_results")
        for row in table:
            print(",".join(str(x) for x in row))
    elif args.format == "json":
        _emit_json(
            [
                {"m": m, "n": n, "completed": c, "stopped": s, "distinct_results": d}
                for (m, n, c, s, d) in table
            ]
        )
    else:
        print(f"{'m':>4} {'n':>4} {'completed':>10} {'stopped':>8} {'distinct':>9}")
        for m, n, c, s, d in table:
            print(f"{m:>4} {n:>4} {c:>10} {s:>8} {d:>9}")
    if args.check_paper:
        bad = []
        for m, n, c, _s, _d in table:
            expected = REFERENCE_DIAGONAL_COUNTS.get(m)
            if expected is not None and c != expected:
                bad.append((m, c, expected))
        if bad:
            for m, got, expected in bad:
                print(f"mismatch at m=n={m}: got {got}, reference {expected}", file=sys.stderr)
            return EXIT_USAGE
        checked = [m for m, *_ in table if m in REFERENCE_DIAGONAL_COUNTS]
        print(f"reference check passed for m=n in {checked}")
    return EXIT_OK


def cmd_verify_rules(args) -> int:
    failures = []
    checks = 0
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i == j:
                continue
            k = 6 - i - j
            # rule 1 is a stop marker, not an equation: its sides must differ
            checks += 1
            if eval_word((E(i, j, -1), E(j, i))) == eval_word(()):
                failures.append(f"rule 1 at ({i},{j}) collapses to the identity")
            for alg in ("A", "B"):
                for num in ("2", "3", "4", "5", "6a", "6b"):
                    checks += 1
                    lhs_right = {
                        "2": E(i, j),
                        "3": E(k, j),
                        "4": E(j, k),
                        "5": E(k, i),
                        "6a": E(i, k),
                        "6b": E(i, k),
                    }[num]
                    lhs = (E(i, j, -1), lhs_right)
                    rhs = rule_rhs(alg, num, i, j)
                    if eval_word(lhs) != eval_word(rhs):
                        failures.append(f"{alg}:{num} at ({i},{j}) is not a matrix identity")
            # rule 7: conjugation contract of the permutation letter
            p = matrix_of(R(k, j, i))
            rot = {i: j, j: k, k: i}
            for l in (1, 2, 3):
                for m_ in (1, 2, 3):
                    if l == m_:
                        continue
                    for sign in (1, -1):
                        checks += 1
                        lhs_m = p * eval_word((E(l, m_, sign),))
                        rhs_m = eval_word((E(rot[l], rot[m_], sign),)) * p
                        if lhs_m != rhs_m:
                            failures.append(
                                f"rule 7 at R({k},{j},{i}), E({l},{m_},{sign}) fails"
                            )
    if args.format == "json":
        _emit_json({"checks": checks, "failures": failures})
    else:
        print(f"{checks} rule identities checked")
        for f in failures:
            print(f"FAIL {f}")
        if not failures:
            print("all rule identities hold")
    return EXIT_OK if not failures else EXIT_USAGE


def cmd_oracle(args) -> int:
    """Directed-sequence closed forms cross-checked against the engine."""
    bound = args.max_exponent
    problems = []
    runs = 0
    exponents = range(bound + 1)
    for i in (1, 2, 3):
        for jdir in (1, 2, 3):
            if jdir == i:
                continue
            k = 6 - i - jdir
            for m in exponents:
                for n in exponents:
                    for p in exponents:
                        for q in exponents:
                            runs += 1
                            s = directed(i, {jdir: m, k: n})
                            t = directed(jdir, {i: p, k: q})
                            ok, msg = crosscheck_opposite(s, t)
                            if not ok:
                                problems.append(
                                    f"opposite i={i} j={jdir} {(m, n, p, q)}: {msg}"
                                )
    for i in (1, 2, 3):
        for m in exponents:
            for n in exponents:
                for p in exponents:
                    for q in exponents:
                        runs += 1
                        ok, msg = crosscheck_same(DirectedSeq(i, m, n), DirectedSeq(i, p, q))
                        if not ok:
                            problems.append(f"same i={i} {(m, n, p, q)}: {msg}")
    print(f"{runs} oracle cross-checks")
    for pr in problems:
        print(f"FAIL {pr}")
    if not problems:
        print("closed forms agree with the engine")
    return EXIT_OK if not problems else EXIT_USAGE


def cmd_refine(args) -> int:
    m, n = args.m, args.n
    v1, v2, v3 = UNIT_CONE.rays
    left = []
    prev = v2
    for t in range(m):
        left.append((v1, prev))
        prev = tuple(a + b for a, b in zip(v1, prev))
    right = []
    prev = v3
    for t in range(n):
        right.append((v1, prev))
        prev = tuple(a + b for a, b in zip(v1, prev))
    try:
        result = build_common_refinement(UNIT_CONE, left, right)
    except RuntimeError as exc:
        print(f"refinement failed: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    report = verify_refinement(result.fan, UNIT_CONE, left, right, samples=args.samples, seed=args.seed)
    if args.format == "json":
        _emit_json(
            {
                "cones": [[list(r) for r in c.rays] for c in result.fan.cones],
                "counts": {
                    "cones": len(result.fan),
                    "factorizations": result.factorization_total,
                    "per_word": [
                        {"word": format_word(w), "completed": c} for w, c in result.per_word
                    ],
                },
                "checks": [
                    {"name": name, "passed": passed, "detail": detail}
                    for name, passed, detail in report.checks
                ],
            }
        )
    else:
        print(fan_to_text(result.fan), end="")
        print(f"cones: {len(result.fan)}  factorizations: {result.factorization_total}")
        for word, c in result.per_word:
            print(f"  {format_word(word)}: {c}")
        for name, passed, detail in report.checks:
            print(f"check {name}: {'pass' if passed else 'FAIL'} ({detail})")
    return EXIT_OK if report.ok else EXIT_USAGE


def cmd_valuation(args) -> int:
    budget = args.budget if args.budget is not None else _default_budget(10**4)
    if args.search:
        witness = search_b_nontermination(
            words=[parse_word(args.word)] if args.word else None,
            budget=budget,
            max_samples=args.samples,
            seed=args.seed,
        )
        if witness is None:
            print("no non-terminating valuation found within the sample budget")
            return EXIT_USAGE
        print("non-terminating valuation witness:")
        print(witness.to_json())
        return EXIT_OK
    if not args.word or not args.val:
        print("valuation runs need --word and --val", file=sys.stderr)
        return EXIT_USAGE
    try:
        word = parse_word(args.word)
        valuation = Valuation.parse(args.val, perturbed=args.perturb)
    except (ParseError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        outcome, policy = run_along_valuation(word, args.alg, valuation, budget=budget)
    except (TieError, ContainmentError) as exc:
        print(f"valuation error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    payload = _outcome_payload(outcome)
    payload["trajectory"] = [
        {"position": pos, "coords": [str(x[0]) for x in coords], "choice": choice}
        for pos, coords, choice in policy.trajectory
    ]
    if args.format == "json":
        _emit_json(payload)
    else:
        print(f"status: {outcome.status}  steps: {outcome.steps}")
        if outcome.result is not None:
            print(f"result: {format_word(outcome.result)}")
        for pos, coords, choice in policy.trajectory:
            pretty = ", ".join(str(x[0]) for x in coords)
            print(f"at {pos}: coords ({pretty}) -> {choice}")
    return _status_exit(outcome.status)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starfactor",
        description="Strong-factorization rewriting on words of elementary matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factor", help="run one factorization to strong form")
    p.add_argument("word")
    p.add_argument("--alg", choices=("A", "B"), default="A")
    p.add_argument("--policy", choices=("always6a", "always6b"), default="always6a")
    p.add_argument("--choices", help="comma-separated scripted 6a/6b choices")
    p.add_argument("--budget", type=int)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("enumerate", help="enumerate all factorizations of a word")
    p.add_argument("word")
    p.add_argument("--budget", type=int)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("table", help="factorization counts for m = n rows")
    p.add_argument("--max", type=int, default=5)
    p.add_argument(
        "--long",
        action="store_true",
        help="include the m = n = 20, 30, 40 rows (minutes each; 40 takes longest)",
    )
    p.add_argument("--budget", type=int)
    p.add_argument("--check-paper", action="store_true", help="compare against the built-in reference counts")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify-rules", help="check every rewrite rule as a matrix identity")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_verify_rules)

    p = sub.add_parser("oracle", help="cross-check directed closed forms against the engine")
    p.add_argument("--max-exponent", type=int, default=2)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("refine", help="build and verify a common refinement")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=20230817)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("valuation", help="run along a valuation, or search for non-termination")
    p.add_argument("--alg", choices=("A", "B"), default="A")
    p.add_argument("--word")
    p.add_argument("--val", help='three exact rationals "p/q,p/q,p/q"')
    p.add_argument("--perturb", action="store_true")
    p.add_argument("--budget", type=int)
    p.add_argument("--search", action="store_true")
    p.add_argument("--samples", type=int, default=10**4)
    p.add_argument("--seed", type=int, default=20230817)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_valuation)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except BrokenPipeError:
        return EXIT_OK
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
