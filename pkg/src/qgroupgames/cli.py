"""Command-line front end and the JSON file formats.

Game file::

    {"dimension": 7, "initial": 0, "target_p1": 6, "target_p2": 0,
     "schedule": {"type": "noncanonical", "m": 2},
     "group_a": {"kind": "unitary"},
     "group_b": {"kind": "generated", "generators": [{"gate": "T", "i": 0, "j": 1}],
                 "closure_cap": 1000}}

Gate terms are ``{"gate": "I"}``, ``{"gate": "T", "i": 0, "j": 6}``,
``{"gate": "QFT"}``, ``{"gate": "QFT_DAG"}``,
``{"gate": "MATRIX", "rows": [[[re, im], ...], ...]}`` and
``{"gate": "COMPOSE", "terms": [...]}`` (matrix-product order).  The bare
strings ``"I"``, ``"QFT"`` and ``"QFT_DAG"`` are accepted as shorthand.

Exit codes: 0 success, 1 usage or parse error, 2 indeterminate result,
3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Any

import numpy as np

from . import __version__
from .automaton import explore, to_dot, transposition_family
from .game import (
    GameSpec,
    Schedule,
    ScheduleKind,
    Strategy,
    StrategyError,
    interleave,
    measure,
    play,
    validate,
)
from .groups import (
    ActionGroup,
    DEFAULT_CLOSURE_CAP,
    GroupKind,
    IndeterminateError,
    invariant_subspace,
    reachable_invariant,
)
from .linalg import (
    UnitaryMatrix,
    compose_all,
    identity,
    qft,
    qft_dagger,
    transposition,
)
from .strategy import DEFAULT_SEARCH_CAP, Status, find_strong, find_weak
from .table import verify_table

EXIT_OK, EXIT_USAGE, EXIT_INDETERMINATE, EXIT_INTERNAL = 0, 1, 2, 3
TOOL = "qgroupgames"


class ParseError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


# -- parsing --------------------------------------------------------------------

def _get(obj: dict, key: str, path: str):
    if not isinstance(obj, dict):
        raise ParseError(path, "expected an object")
    if key not in obj:
        raise ParseError(f"{path}.{key}", "missing required key")
    return obj[key]


def _int(x, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(path, f"expected an integer, got {x!r}")
    return x


def _complex(x, path: str) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if (isinstance(x, list) and len(x) == 2
            and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in x)):
        return complex(x[0], x[1])
    raise ParseError(path, f"expected a number or an [re, im] pair, got {x!r}")


def parse_term(obj: Any, n: int, path: str = "term") -> UnitaryMatrix:
    if isinstance(obj, str):
        obj = {"gate": obj}
    gate = _get(obj, "gate", path)
    try:
        if gate == "I":
            return identity(n)
        if gate == "T":
            i = _int(_get(obj, "i", path), f"{path}.i")
            j = _int(_get(obj, "j", path), f"{path}.j")
            return transposition(n, i, j)
        if gate == "QFT":
            return qft(n)
        if gate == "QFT_DAG":
            return qft_dagger(n)
        if gate == "MATRIX":
            rows = _get(obj, "rows", path)
            if not isinstance(rows, list) or len(rows) != n:
                raise ParseError(f"{path}.rows", f"expected {n} rows")
            m = np.empty((n, n), dtype=np.complex128)
            for r, row in enumerate(rows):
                if not isinstance(row, list) or len(row) != n:
                    raise ParseError(f"{path}.rows[{r}]", f"expected {n} entries")
                for c, x in enumerate(row):
                    m[r, c] = _complex(x, f"{path}.rows[{r}][{c}]")
            return UnitaryMatrix(m)
        if gate == "COMPOSE":
            terms = _get(obj, "terms", path)
            if not isinstance(terms, list) or not terms:
                raise ParseError(f"{path}.terms", "expected a nonempty list")
            return compose_all([parse_term(t, n, f"{path}.terms[{k}]")
                                for k, t in enumerate(terms)])
    except ParseError:
        raise
    except (ValueError, IndexError) as exc:
        raise ParseError(path, str(exc)) from None
    raise ParseError(f"{path}.gate", f"unknown gate {gate!r}")


def term_to_json(u: UnitaryMatrix) -> Any:
    return _term_json(u.term, u)


def _term_json(t, u: UnitaryMatrix | None = None) -> Any:
    if t is None:
        return {"gate": "MATRIX",
                "rows": [[[float(z.real), float(z.imag)] for z in row] for row in u.entries]}
    head = t[0]
    if head == "T":
        return {"gate": "T", "i": t[1], "j": t[2]}
    if head == "COMPOSE":
        return {"gate": "COMPOSE", "terms": [_term_json(f) for f in t[1]]}
    return {"gate": head}


def parse_group(obj: Any, n: int, path: str) -> ActionGroup:
    kind = _get(obj, "kind", path)
    cap = obj.get("closure_cap", DEFAULT_CLOSURE_CAP)
    cap = _int(cap, f"{path}.closure_cap")
    if cap < 1:
        raise ParseError(f"{path}.closure_cap", "must be positive")
    if kind == "symmetric":
        return ActionGroup.symmetric(n, closure_cap=cap)
    if kind == "unitary":
        return ActionGroup.unitary(n)
    if kind == "generated":
        gens = obj.get("generators", [])
        if not isinstance(gens, list):
            raise ParseError(f"{path}.generators", "expected a list")
        return ActionGroup.generated([parse_term(g, n, f"{path}.generators[{k}]")
                                      for k, g in enumerate(gens)], closure_cap=cap, n=n)
    raise ParseError(f"{path}.kind", f"unknown group kind {kind!r}")


def group_to_json(g: ActionGroup) -> dict:
    out: dict = {"kind": g.kind.value}
    if g.kind is GroupKind.GENERATED:
        out["generators"] = [term_to_json(x) for x in g.generators]
    if g.kind is not GroupKind.UNITARY and g.closure_cap != DEFAULT_CLOSURE_CAP:
        out["closure_cap"] = g.closure_cap
    return out


def parse_game(obj: Any) -> GameSpec:
    n = _int(_get(obj, "dimension", "game"), "game.dimension")
    if n < 1:
        raise ParseError("game.dimension", "must be positive")
    q0 = _int(_get(obj, "initial", "game"), "game.initial")
    qa = _int(_get(obj, "target_p1", "game"), "game.target_p1")
    qb = _int(_get(obj, "target_p2", "game"), "game.target_p2")
    for key, v in (("initial", q0), ("target_p1", qa), ("target_p2", qb)):
        if not 0 <= v < n:
            raise ParseError(f"game.{key}", f"index {v} out of range for dimension {n}")
    if qa == qb:
        raise ParseError("game.target_p2", "must differ from target_p1")
    sched = _get(obj, "schedule", "game")
    stype = _get(sched, "type", "game.schedule")
    try:
        kind = ScheduleKind(stype)
    except ValueError:
        raise ParseError("game.schedule.type", f"unknown schedule type {stype!r}") from None
    m = _int(_get(sched, "m", "game.schedule"), "game.schedule.m")
    if m < 1:
        raise ParseError("game.schedule.m", "must be at least 1")
    ga = parse_group(_get(obj, "group_a", "game"), n, "game.group_a")
    gb = parse_group(_get(obj, "group_b", "game"), n, "game.group_b")
    return GameSpec(n, q0, qa, qb, Schedule(kind, m), ga, gb)


def game_to_json(spec: GameSpec) -> dict:
    return {
        "dimension": spec.n, "initial": spec.q0,
        "target_p1": spec.qa, "target_p2": spec.qb,
        "schedule": {"type": spec.schedule.kind.value, "m": spec.schedule.m},
        "group_a": group_to_json(spec.group_a), "group_b": group_to_json(spec.group_b),
    }


def spec_hash(spec: GameSpec) -> str:
    text = json.dumps(game_to_json(spec), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def parse_strategy(obj: Any, spec: GameSpec, path: str = "strategy",
                   player: int | None = None) -> Strategy:
    owner = _int(_get(obj, "player", path), f"{path}.player")
    if owner not in (1, 2):
        raise ParseError(f"{path}.player", "must be 1 or 2")
    if player is not None and owner != player:
        raise ParseError(f"{path}.player", f"expected a strategy for player {player}")
    moves = _get(obj, "moves", path)
    if not isinstance(moves, list):
        raise ParseError(f"{path}.moves", "expected a list")
    s = Strategy(owner, tuple(parse_term(t, spec.n, f"{path}.moves[{k}]")
                              for k, t in enumerate(moves)))
    v = validate(spec, s)
    if v is not None:
        where = f"{path}.moves" if v.index is None else f"{path}.moves[{v.index}]"
        raise ParseError(where, v.message)
    return s


def strategy_to_json(s: Strategy | None) -> dict | None:
    if s is None:
        return None
    return {"player": s.owner, "moves": [term_to_json(u) for u in s.moves]}


def parse_alphabet(obj: Any, n: int, path: str = "alphabet") -> tuple[list, list]:
    out = []
    for key in ("player1", "player2"):
        entries = _get(obj, key, path)
        if not isinstance(entries, list) or not entries:
            raise ParseError(f"{path}.{key}", "expected a nonempty list")
        moves = []
        for k, e in enumerate(entries):
            where = f"{path}.{key}[{k}]"
            if isinstance(e, dict) and "family" in e:
                if e["family"] != "transpositions":
                    raise ParseError(f"{where}.family", f"unknown family {e['family']!r}")
                moves.extend(transposition_family(n))
                continue
            u = parse_term(e, n, where)
            label = e.get("label", u.label) if isinstance(e, dict) else u.label
            moves.append((str(label), u))
        out.append(moves)
    return out[0], out[1]


def _load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(path, exc.strerror or str(exc)) from None
    except json.JSONDecodeError as exc:
        raise ParseError(path, f"invalid JSON ({exc.msg} at line {exc.lineno})") from None


def load_game(path: str) -> GameSpec:
    obj = _load_json(path)
    try:
        return parse_game(obj)
    except ParseError as exc:
        raise ParseError(f"{path}:{exc.path}", exc.message) from None


# -- reports --------------------------------------------------------------------

def _amps(a) -> list:
    return [[round(float(z.real), 12) + 0.0, round(float(z.imag), 12) + 0.0] for z in a]


def _report(command: str, spec: GameSpec | None = None, **body) -> dict:
    out = {"tool": TOOL, "version": __version__, "command": command}
    if spec is not None:
        out["spec_hash"] = spec_hash(spec)
    out.update(body)
    return out


def _emit(report: dict) -> None:
    json.dump(report, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")


def verdict_to_json(v) -> dict:
    return {
        "player": v.player, "strength": v.strength, "status": v.status.value,
        "method": v.method.value if v.method else None,
        "witness": strategy_to_json(v.witness),
        "witness_labels": [u.label for u in v.witness.moves] if v.witness else None,
        "co_witness": strategy_to_json(v.co_witness),
        "evidence": v.evidence, "reason": v.reason,
    }


# -- commands -------------------------------------------------------------------

def cmd_play(args) -> int:
    spec = load_game(args.game)
    s1 = parse_strategy(_load_json(args.strategy_p1), spec, args.strategy_p1, player=1)
    s2 = parse_strategy(_load_json(args.strategy_p2), spec, args.strategy_p2, player=2)
    p = play(spec, s1, s2)
    out = measure(p, spec)
    if abs(out.distribution.sum() - 1.0) > 1e-9:
        raise AssertionError("final distribution is not normalized")
    _emit(_report("play", spec,
                  moves=[u.label for u in interleave(spec, s1, s2)],
                  trajectory=[_amps(st.amps) for st in p.trajectory],
                  distribution=[round(float(x), 12) for x in out.distribution],
                  verdict=out.verdict.value))
    return EXIT_OK


def cmd_analyze(args) -> int:
    spec = load_game(args.game)
    players = [args.player] if args.player else [1, 2]
    fn = find_strong if args.strength == "strong" else find_weak
    verdicts = [fn(spec, p, search_cap=args.cap) for p in players]
    _emit(_report("analyze", spec, search_cap=args.cap,
                  verdicts=[verdict_to_json(v) for v in verdicts]))
    if any(v.status is Status.INDETERMINATE for v in verdicts):
        return EXIT_INDETERMINATE
    return EXIT_OK


def cmd_verify_theorems(args) -> int:
    report = verify_table(args.max_n, args.max_m)
    _emit(_report("verify-theorems", table=report.to_dict()))
    return EXIT_OK if report.passed else EXIT_INTERNAL


def cmd_invariants(args) -> int:
    spec = load_game(args.game)
    gb = spec.group_b
    basis = invariant_subspace(gb)
    body: dict = {"group_b": gb.describe(), "dimension": len(basis),
                  "basis": [_amps(v.amps) for v in basis]}
    if gb.kind is GroupKind.UNITARY:
        body["note"] = "U(n) fixes no nonzero vector for n >= 2; the invariant subspace is empty"
    code = EXIT_OK
    try:
        found = reachable_invariant(spec.group_a, gb, spec.q0)
    except IndeterminateError as exc:
        found = None
        body["reachable"] = None
        body["reason"] = str(exc)
        code = EXIT_INDETERMINATE
    else:
        if found is None:
            body["reachable"] = None
            body["reason"] = "no reachable invariant state"
        else:
            u, psi = found
            body["reachable"] = {"move": term_to_json(u), "label": u.label,
                                 "state": _amps(psi.amps)}
    _emit(_report("invariants", spec, **body))
    return code


def cmd_export_dot(args) -> int:
    spec = load_game(args.game)
    a, b = parse_alphabet(_load_json(args.alphabet), spec.n, args.alphabet)
    if args.depth is not None and not 0 <= args.depth <= spec.schedule.rounds:
        raise ParseError("--depth", f"must lie in [0, {spec.schedule.rounds}]")
    aut = explore(spec, a, b, args.depth)
    sys.stdout.write(to_dot(aut))
    if aut.truncated:
        print(f"error: exploration truncated at {len(aut.nodes)} nodes", file=sys.stderr)
        return EXIT_INDETERMINATE
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bounded(lo: int, hi: int):
    def conv(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if not lo <= v <= hi:
            raise argparse.ArgumentTypeError(f"must lie in [{lo}, {hi}], got {v}")
        return v
    return conv


def _positive(text: str) -> int:
    return _bounded(1, 10**12)(text)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog=TOOL, description="Sequential quantum games over groups of unitaries.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("play", help="play two strategies and measure")
    sp.add_argument("game")
    sp.add_argument("strategy_p1")
    sp.add_argument("strategy_p2")
    sp.set_defaults(func=cmd_play)

    sp = sub.add_parser("analyze", help="search for strong or weak winning strategies")
    sp.add_argument("game")
    sp.add_argument("--player", type=int, choices=(1, 2))
    sp.add_argument("--strength", choices=("strong", "weak"), default="strong")
    sp.add_argument("--cap", type=_positive, default=DEFAULT_SEARCH_CAP,
                    help="playout budget per query")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("verify-theorems", help="check the summary table on concrete games")
    sp.add_argument("--max-n", type=_bounded(2, 4), default=3)
    sp.add_argument("--max-m", type=_bounded(1, 3), default=2)
    sp.set_defaults(func=cmd_verify_theorems)

    sp = sub.add_parser("invariants", help="invariant subspace of player 2's group")
    sp.add_argument("game")
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("export-dot", help="reachable-state automaton as DOT")
    sp.add_argument("game")
    sp.add_argument("alphabet")
    sp.add_argument("--depth", type=int, default=None)
    sp.set_defaults(func=cmd_export_dot)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors, --help, --version
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (ParseError, StrategyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AssertionError, RuntimeError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
