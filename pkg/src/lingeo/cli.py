"""Command-line front end: file formats, reports, and every experiment.

Space file format: first significant line ``points N``, then one ``line i j
k ...`` record per nontrivial line; ``#`` starts a comment.  The JSON
alternative is an object with "points" and "lines" keys.  Serialization is
canonical (sorted lines), so files are diff-stable.  ``-`` reads stdin.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import __version__, amalgam, enumeration, game, morphisms, pg, planarise
from .core import (
    GeometryError,
    LinearSpace,
    ValidationError,
    all_lines,
    classify_shape,
    degrees,
    dual,
    line_through,
    validate,
)

JSON_SCHEMA = "lingeo/1"


# ---------------------------------------------------------------- formats


def parse_space_text(text: str) -> LinearSpace:
    n_points = None
    lines = []
    for raw in text.splitlines():
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        fields = body.split()
        if fields[0] == "points" and len(fields) == 2:
            if n_points is not None:
                raise ValidationError("duplicate points header")
            n_points = int(fields[1])
        elif fields[0] == "line":
            lines.append([int(f) for f in fields[1:]])
        else:
            raise ValidationError(f"unrecognized record: {body!r}")
    if n_points is None:
        raise ValidationError("missing 'points N' header")
    return validate(n_points, lines)


def format_space_text(space: LinearSpace) -> str:
    out = [f"points {space.n_points}"]
    out.extend("line " + " ".join(map(str, ln)) for ln in space.lines)
    return "\n".join(out) + "\n"


def space_to_obj(space: LinearSpace) -> dict:
    return {"points": space.n_points, "lines": [list(ln) for ln in space.lines]}


def space_from_obj(obj: dict) -> LinearSpace:
    return validate(obj["points"], obj["lines"])


def format_space_dot(space: LinearSpace) -> str:
    """Bipartite incidence graph: round point vertices, square line vertices."""
    out = ["graph incidence {"]
    for p in range(space.n_points):
        out.append(f'  p{p} [shape=circle label="{p}"];')
    for i, ln in enumerate(space.lines):
        label = ",".join(map(str, ln))
        out.append(f'  L{i} [shape=box label="{{{label}}}"];')
    for i, ln in enumerate(space.lines):
        for p in ln:
            out.append(f"  p{p} -- L{i};")
    out.append("}")
    return "\n".join(out) + "\n"


def read_space(path: str) -> LinearSpace:
    text = sys.stdin.read() if path == "-" else open(path).read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return space_from_obj(json.loads(text))
    return parse_space_text(text)


def emit_space(space: LinearSpace, args) -> None:
    if getattr(args, "json", False):
        print(json.dumps({"schema": JSON_SCHEMA, **space_to_obj(space)}))
    elif getattr(args, "dot", False):
        print(format_space_dot(space), end="")
    else:
        print(format_space_text(space), end="")


def _map_to_obj(m: morphisms.PartialMap) -> dict:
    return {str(s): t for s, t in m.pairs}


def _format_map(m: morphisms.PartialMap) -> str:
    return " ".join(f"{s}->{t}" for s, t in m.pairs)


def _emit(args, table: list[str], obj: dict) -> None:
    if getattr(args, "json", False):
        print(json.dumps({"schema": JSON_SCHEMA, **obj}))
    else:
        for row in table:
            print(row)


# ------------------------------------------------------------ subcommands


def cmd_validate(args) -> int:
    with warnings.catch_warnings(record=True) as notes:
        warnings.simplefilter("always")
        space = read_space(args.space)
    for note in notes:
        print(f"note: {note.message}", file=sys.stderr)
    emit_space(space, args)
    return 0


def cmd_info(args) -> int:
    space = read_space(args.space)
    report = classify_shape(space)
    per_point, per_line, degree = degrees(space)
    obj = {
        "points": space.n_points,
        "stored_lines": len(space.lines),
        "all_lines": len(all_lines(space)),
        "degree": degree,
        "point_degrees": list(per_point),
        "trivial": report.is_trivial,
        "line": report.is_line,
        "near_pencil": report.is_near_pencil,
        "pentagon": report.is_pentagon,
        "degenerate": report.is_degenerate,
        "closed": report.is_closed,
        "projective_plane": report.is_projective_plane,
        "order": report.order,
    }
    table = [f"{key}: {value}" for key, value in obj.items()]
    _emit(args, table, obj)
    return 0


def cmd_pg(args) -> int:
    emit_space(pg.projective_plane(args.order), args)
    return 0


def cmd_iso(args) -> int:
    a, b = read_space(args.first), read_space(args.second)
    found = morphisms.is_isomorphic(a, b)
    table = [f"isomorphic: {'true' if found else 'false'}"]
    obj: dict = {"isomorphic": bool(found)}
    if found:
        table.append(f"map: {_format_map(found)}")
        obj["map"] = _map_to_obj(found)
    _emit(args, table, obj)
    return 0


def cmd_embed(args) -> int:
    a, b = read_space(args.first), read_space(args.second)
    found = morphisms.find_embeddings(a, b, limit=args.limit)
    table = [f"embeddings: {len(found)}"]
    table.extend(f"  {_format_map(m)}" for m in found)
    _emit(args, table, {"count": len(found), "maps": [_map_to_obj(m) for m in found]})
    return 0


def cmd_aut(args) -> int:
    space = read_space(args.space)
    group = morphisms.automorphisms(space)
    table = [f"automorphisms: {len(group)}"]
    obj: dict = {"count": len(group)}
    if not args.count_only:
        table.extend(f"  {_format_map(g)}" for g in group)
        obj["maps"] = [_map_to_obj(g) for g in group]
    _emit(args, table, obj)
    return 0


def cmd_homog(args) -> int:
    space = read_space(args.space)
    verdict = morphisms.is_homogeneous(space)
    table = [f"homogeneous: {'true' if verdict.homogeneous else 'false'}"]
    obj: dict = {"homogeneous": verdict.homogeneous}
    if verdict.witness is not None:
        table.append(f"witness: {_format_map(verdict.witness)}")
        obj["witness"] = _map_to_obj(verdict.witness)
    _emit(args, table, obj)
    return 0


def cmd_witness_deg5(args) -> int:
    space = read_space(args.space)
    witness = morphisms.nonhomogeneity_witness_deg5(space)
    extendable = morphisms.extend_to_automorphism(witness) is not None
    table = [
        f"witness: {_format_map(witness)}",
        f"partial_isomorphism: {str(morphisms.is_partial_isomorphism(witness)).lower()}",
        f"extends: {str(extendable).lower()}",
    ]
    _emit(
        args,
        table,
        {
            "witness": _map_to_obj(witness),
            "partial_isomorphism": True,
            "extends": extendable,
        },
    )
    return 0


def _parse_points(text: str) -> list[int]:
    return [int(p) for p in text.replace(",", " ").split()]


def cmd_closure(args) -> int:
    space = read_space(args.space)
    subset = _parse_points(args.points)
    closure = planarise.planar_closure(subset, space)
    aplanar = list(closure) == sorted(set(subset))
    table = [
        "closure: " + " ".join(map(str, closure)),
        f"aplanar: {str(aplanar).lower()}",
    ]
    _emit(args, table, {"closure": list(closure), "aplanar": aplanar})
    return 0


def cmd_complete(args) -> int:
    space = read_space(args.space)
    result = planarise.projective_completion(
        space, args.rounds, point_budget=args.point_budget
    )
    if args.json:
        print(
            json.dumps(
                {
                    "schema": JSON_SCHEMA,
                    "closed": result.closed,
                    "rounds_used": result.rounds_used,
                    "space": space_to_obj(result.space),
                }
            )
        )
    else:
        print(f"# closed: {result.closed} rounds_used: {result.rounds_used}")
        print(format_space_text(result.space), end="")
    return 0


def _parse_line_list(text: str) -> list[tuple[int, ...]]:
    return [tuple(int(p) for p in part.split(",")) for part in text.split(":")]


def cmd_planarise(args) -> int:
    space = read_space(args.space)
    if args.concurrent:
        result = planarise.concurrent_planarisation(
            space, _parse_line_list(args.concurrent)
        )
    elif args.pairs:
        pairs = []
        for chunk in args.pairs:
            pair = _parse_line_list(chunk)
            if len(pair) != 2:
                raise GeometryError(f"--pairs needs two lines, got {chunk!r}")
            pairs.append((pair[0], pair[1]))
        result = planarise.trivial_planarisation(space, pairs)
    else:
        raise GeometryError("pass --pairs or --concurrent")
    emit_space(result, args)
    return 0


def cmd_amalgamate(args) -> int:
    a = read_space(args.base)
    b1 = read_space(args.first)
    b2 = read_space(args.second)
    if args.in_class:
        spec = enumeration.class_by_name(args.in_class)
        result = amalgam.amalgamate_in_class(a, b1, b2, spec)
        if result is None:
            print("amalgam: none (move set exhausted)")
            return 0
    else:
        f1 = amalgam.identity_embedding(a, b1)
        f2 = amalgam.identity_embedding(a, b2)
        result = amalgam.free_amalgam(a, b1, b2, f1, f2)
    if args.json:
        print(
            json.dumps(
                {
                    "schema": JSON_SCHEMA,
                    "space": space_to_obj(result.c),
                    "e1": _map_to_obj(result.e1),
                    "e2": _map_to_obj(result.e2),
                }
            )
        )
    else:
        print(f"# e1: {_format_map(result.e1)}")
        print(f"# e2: {_format_map(result.e2)}")
        print(format_space_text(result.c), end="")
    return 0


def _cert_to_obj(cert: amalgam.IncompatibilityCertificate) -> dict:
    return {
        "l1": list(cert.l1),
        "l2": list(cert.l2),
        "l3": list(cert.l3),
        "a_prime": cert.a_prime,
        "a_dblprime": cert.a_dblprime,
        "witness_pair": list(cert.witness_pair),
        "chain": [space_to_obj(s) for s in _chain_spaces(cert.chain)],
    }


def _chain_spaces(trace: planarise.PlanarisationTrace) -> list[LinearSpace]:
    spaces = [trace.base]
    current = trace.base
    for step in trace.steps:
        current = planarise._extend_on_lines(current, step.intersected_lines)
        spaces.append(current)
    return spaces


def _cert_from_obj(obj: dict) -> amalgam.IncompatibilityCertificate:
    chain = [space_from_obj(s) for s in obj["chain"]]
    steps = []
    for before, after in zip(chain, chain[1:]):
        new_point = before.n_points
        extended = []
        for ln in all_lines(before):
            grown = line_through(after, ln[0], ln[1])
            if new_point in grown and set(ln) <= set(grown):
                extended.append(ln)
        steps.append(
            planarise.ElementaryStep(
                new_point, tuple(sorted(extended)), trivial=len(extended) == 2
            )
        )
    trace = planarise.PlanarisationTrace(chain[0], tuple(steps), chain[-1])
    return amalgam.IncompatibilityCertificate(
        l1=tuple(obj["l1"]),
        l2=tuple(obj["l2"]),
        l3=tuple(obj["l3"]),
        a_prime=obj["a_prime"],
        a_dblprime=obj["a_dblprime"],
        chain=trace,
        witness_pair=tuple(obj["witness_pair"]),
    )


def cmd_incompatible(args) -> int:
    space = read_space(args.space)
    b1, b2, cert = amalgam.incompatible_planarisations(space)
    verified = amalgam.verify_certificate(cert, space, b1, b2)
    if args.json:
        print(
            json.dumps(
                {
                    "schema": JSON_SCHEMA,
                    "base": space_to_obj(space),
                    "b1": space_to_obj(b1),
                    "b2": space_to_obj(b2),
                    "certificate": _cert_to_obj(cert),
                    "verified": verified,
                }
            )
        )
    else:
        print(f"b1 ({b1.n_points} points): {b1.lines}")
        print(f"b2 ({b2.n_points} points): {b2.lines}")
        print(f"clash lines: {cert.l1} {cert.l2} {cert.l3}")
        print(f"verified: {str(verified).lower()}")
    return 0


def cmd_verify_cert(args) -> int:
    text = sys.stdin.read() if args.bundle == "-" else open(args.bundle).read()
    obj = json.loads(text)
    base = space_from_obj(obj["base"])
    b1 = space_from_obj(obj["b1"])
    b2 = space_from_obj(obj["b2"])
    cert = _cert_from_obj(obj["certificate"])
    verified = amalgam.verify_certificate(cert, base, b1, b2)
    _emit(args, [f"certificate: {'valid' if verified else 'invalid'}"], {"valid": verified})
    return 0 if verified else 1


def cmd_ap(args) -> int:
    spec = enumeration.class_by_name(args.klass)
    report = amalgam.verify_class_ap(spec, args.max_points, jobs=args.jobs)
    table = [
        f"class: {report.class_name}",
        f"max points: {report.max_points}",
        f"bases: {report.bases_checked}",
        f"extension pairs: {report.pairs_checked}",
        f"failures: {report.total_failures}",
        f"inconclusive: {len(report.inconclusive)}",
    ]
    for fail in report.failures + report.sanity_failures:
        table.append(
            f"  failure over base {fail.base.lines} ({fail.base.n_points} points)"
            + (" [certified]" if fail.certificate else "")
        )
    obj = {
        "class": report.class_name,
        "max_points": report.max_points,
        "bases": report.bases_checked,
        "pairs": report.pairs_checked,
        "failures": report.total_failures,
        "inconclusive": len(report.inconclusive),
    }
    _emit(args, table, obj)
    return 0


def cmd_enumerate(args) -> int:
    spec = enumeration.class_by_name(args.filter)
    spaces = enumeration.enumerate_spaces(args.points, spec)
    if args.json:
        print(
            json.dumps(
                {
                    "schema": JSON_SCHEMA,
                    "count": len(spaces),
                    "spaces": [space_to_obj(s) for s in spaces],
                }
            )
        )
    else:
        print(f"# {len(spaces)} isomorphism classes on {args.points} points "
              f"({spec.name})")
        for s in spaces:
            print("space " + "; ".join(" ".join(map(str, ln)) for ln in s.lines))
    return 0


def cmd_classify(args) -> int:
    records = enumeration.classify_homogeneous(args.max_points)
    homogeneous = [r for r in records if r.homogeneous]
    table = [f"spaces tested: {len(records)}", f"homogeneous: {len(homogeneous)}"]
    for r in homogeneous:
        table.append(f"  {r.tag}: {r.space.n_points} points, lines {r.space.lines}")
    obj = {
        "tested": len(records),
        "homogeneous": [
            {"tag": r.tag, **space_to_obj(r.space)} for r in homogeneous
        ],
    }
    _emit(args, table, obj)
    return 0


def cmd_game(args) -> int:
    start = read_space(args.start) if args.start else LinearSpace(4, ())
    first = game.strategy_by_name(args.strategy_a)
    second = game.strategy_by_name(args.strategy_b)
    state, analysis = game.play(start, first, second, args.rounds, seed=args.seed)
    obj = {
        "sizes": list(analysis.sizes),
        "degrees": list(analysis.degrees),
        "parallel_pairs": list(analysis.parallel_counts),
        "locally_closed": analysis.locally_closed,
        "final": space_to_obj(state.current),
    }
    table = [
        f"rounds: {args.rounds}",
        f"sizes: {' '.join(map(str, analysis.sizes))}",
        f"degrees: {' '.join(map(str, analysis.degrees))}",
        f"parallel pairs: {' '.join(map(str, analysis.parallel_counts))}",
        f"locally closed (<= {analysis.probe_size} points): "
        f"{str(analysis.locally_closed).lower()}",
    ]
    _emit(args, table, obj)
    return 0


def cmd_dual(args) -> int:
    emit_space(dual(read_space(args.space)), args)
    return 0


# ---------------------------------------------------------------- parser


def _add_output_flags(sub, dot: bool = False) -> None:
    sub.add_argument("--json", action="store_true", help="emit JSON")
    if dot:
        sub.add_argument("--dot", action="store_true", help="emit Graphviz DOT")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lingeo", description="finite linear space toolkit"
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("validate", help="check and canonicalize a space file")
    s.add_argument("space")
    _add_output_flags(s, dot=True)
    s.set_defaults(func=cmd_validate)

    s = subs.add_parser("info", help="shape report")
    s.add_argument("space")
    _add_output_flags(s)
    s.set_defaults(func=cmd_info)

    s = subs.add_parser("pg", help="algebraic projective plane of a given order")
    s.add_argument("order", type=int)
    _add_output_flags(s, dot=True)
    s.set_defaults(func=cmd_pg)

    s = subs.add_parser("iso", help="isomorphism test")
    s.add_argument("first")
    s.add_argument("second")
    _add_output_flags(s)
    s.set_defaults(func=cmd_iso)

    s = subs.add_parser("embed", help="embeddings of the first into the second")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--limit", type=int, default=None)
    _add_output_flags(s)
    s.set_defaults(func=cmd_embed)

    s = subs.add_parser("aut", help="automorphism group")
    s.add_argument("space")
    s.add_argument("--count-only", action="store_true")
    _add_output_flags(s)
    s.set_defaults(func=cmd_aut)

    s = subs.add_parser("homog", help="homogeneity test")
    s.add_argument("space")
    _add_output_flags(s)
    s.set_defaults(func=cmd_homog)

    s = subs.add_parser("witness-deg5", help="non-extendable map for degree>4 planes")
    s.add_argument("space")
    _add_output_flags(s)
    s.set_defaults(func=cmd_witness_deg5)

    s = subs.add_parser("closure", help="planar closure of a point subset")
    s.add_argument("space")
    s.add_argument("--points", required=True, help="comma-separated point ids")
    _add_output_flags(s)
    s.set_defaults(func=cmd_closure)

    s = subs.add_parser("complete", help="iterated projective completion")
    s.add_argument("space")
    s.add_argument("--rounds", type=int, required=True)
    s.add_argument("--point-budget", type=int, default=1_000_000)
    _add_output_flags(s)
    s.set_defaults(func=cmd_complete)

    s = subs.add_parser("planarise", help="resolve parallel pairs")
    s.add_argument("space")
    s.add_argument(
        "--pairs",
        action="append",
        metavar="L1:L2",
        help="pair of lines, e.g. 0,1:2,3 (repeatable)",
    )
    s.add_argument(
        "--concurrent", metavar="L1:L2:L3", help="three or more pairwise parallel lines"
    )
    _add_output_flags(s, dot=True)
    s.set_defaults(func=cmd_planarise)

    s = subs.add_parser("amalgamate", help="amalgamate two extensions over a base")
    s.add_argument("base")
    s.add_argument("first")
    s.add_argument("second")
    group = s.add_mutually_exclusive_group()
    group.add_argument("--free", action="store_true", help="free amalgam (default)")
    group.add_argument(
        "--in-class", choices=["all", "d3", "d4", "d4star"], default=None
    )
    _add_output_flags(s)
    s.set_defaults(func=cmd_amalgamate)

    s = subs.add_parser("incompatible", help="non-amalgamable planarisation pair")
    s.add_argument("space")
    _add_output_flags(s)
    s.set_defaults(func=cmd_incompatible)

    s = subs.add_parser("verify-cert", help="replay an incompatibility certificate")
    s.add_argument("bundle", help="JSON bundle produced by 'incompatible --json'")
    _add_output_flags(s)
    s.set_defaults(func=cmd_verify_cert)

    s = subs.add_parser("ap", help="amalgamation property verification")
    s.add_argument("--class", dest="klass", choices=["all", "d3", "d4", "d4star"],
                   required=True)
    s.add_argument("--max-points", type=int, required=True)
    s.add_argument("--jobs", type=int, default=1)
    _add_output_flags(s)
    s.set_defaults(func=cmd_ap)

    s = subs.add_parser("enumerate", help="isomorph-free generation")
    s.add_argument("points", type=int)
    s.add_argument("--filter", choices=["all", "d3", "d4", "d4star"], default="all")
    _add_output_flags(s)
    s.set_defaults(func=cmd_enumerate)

    s = subs.add_parser("classify", help="homogeneous space census")
    s.add_argument("--max-points", type=int, required=True)
    _add_output_flags(s)
    s.set_defaults(func=cmd_classify)

    s = subs.add_parser("game", help="alternating extension game")
    s.add_argument("start", nargs="?", default=None,
                   help="start space (default: 4 independent points)")
    s.add_argument("--rounds", type=int, required=True)
    s.add_argument("--strategy-a", default="closure_strategy")
    s.add_argument("--strategy-b", default="closure_strategy")
    s.add_argument("--seed", type=int, default=0)
    _add_output_flags(s)
    s.set_defaults(func=cmd_game)

    s = subs.add_parser("dual", help="point-line dual of a closed space")
    s.add_argument("space")
    _add_output_flags(s, dot=True)
    s.set_defaults(func=cmd_dual)

    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:
        return int(stop.code or 0)
    try:
        return args.func(args)
    except GeometryError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
