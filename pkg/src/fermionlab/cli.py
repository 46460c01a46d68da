"""Batch command-line front end.

Every subcommand writes one deterministic JSON document (identical flags
and seed give byte-identical output); wall-clock timings go to stderr so
they never perturb the artifact.  Exit status: 0 when every assertion in
the run passed, 1 on a mathematical failure (a diagnostic document is
still written), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import random
import sys
import time

from . import affine, clifford, colimit, fock, ortho, qseries, schubert
from .graded import check_equals_scalar
from .intlinalg import IntMatrix

HARD_LIMITS = {"rank": 8, "weight": 40, "order": 200}


class LimitError(Exception):
    pass


def _check_limit(name, value, key):
    if value < 0 or value > HARD_LIMITS[key]:
        raise LimitError(f"{name}={value} outside documented limit 0..{HARD_LIMITS[key]}")


def _threads():
    """FERMIONLAB_THREADS caps worker parallelism; execution is sequential,
    which respects any cap >= 1."""
    raw = os.environ.get("FERMIONLAB_THREADS", "1")
    try:
        cap = int(raw)
    except ValueError as exc:
        raise LimitError(f"FERMIONLAB_THREADS must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise LimitError("FERMIONLAB_THREADS must be >= 1")
    return cap


def _emit(doc, out_path):
    text = json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=1) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ----------------------------------------------------------------


def cmd_relations(args):
    rank = args.rank
    _check_limit("rank", rank, "rank")
    report = clifford.check_relations(rank)
    doc = {
        "command": "relations",
        "config": {"rank": rank, "threads": _threads()},
        "clifford": report.to_dict(),
        "restriction_identities": clifford.restriction_identities(rank),
        "completeness_identity": clifford.completeness_identity(rank),
    }
    if args.fock_weight:
        _check_limit("fock-weight", args.fock_weight, "weight")
        bound = args.fock_charge
        trunc = fock.fock_truncation(rank, (-bound, bound), args.fock_weight)
        keys = [(l, n) for l in range(-bound, bound + 1)
                for n in range(args.fock_weight + 1)]
        levels = range(-args.fock_levels, args.fock_levels + 2)
        ops_p = {(a, i): fock.fermion_map(trunc, "P", a, i)
                 for a in levels for i in range(rank)}
        ops_q = {(a, i): fock.fermion_map(trunc, "Q", a, i)
                 for a in levels for i in range(rank)}
        failures = []
        checked = 0
        for (a, i), (b, j) in itertools.product(ops_p, repeat=2):
            want = 1 if (a, i) == (b, j) else 0
            res = check_equals_scalar(
                ops_p[(a, i)].anticommutator(ops_q[(b, j)]), keys, want)
            checked += len(res.checked)
            if not res.ok:
                failures.append([a, i, b, j])
        doc["fock"] = {"weight": args.fock_weight, "charge_bound": bound,
                       "levels": args.fock_levels, "checked": checked,
                       "failures": failures}
    ok = doc["clifford"]["ok"] and doc["restriction_identities"] and \
        doc["completeness_identity"] and not doc.get("fock", {}).get("failures")
    doc["ok"] = ok
    _emit(doc, args.out)
    return 0 if ok else 1


def cmd_orthogonalize(args):
    rng = random.Random(args.seed)
    if args.family:
        with open(args.family, encoding="utf-8") as fh:
            fams = [ortho.SemiOrthFamily.from_json(json.load(fh))]
    else:
        _check_limit("rank", args.rank, "rank")
        order = ortho.lex_order(args.rank) if args.order == "lex" \
            else ortho.weight_order(args.rank)
        fams = []
        for k in range(args.random):
            defect = 1 + k % 2 if k < args.defective else 0
            fams.append(ortho.random_family(args.rank, args.rank_w, rng,
                                            defect=defect, order=order))
    results = []
    ok = True
    for fam in fams:
        try:
            fam.check_semiorthogonal()
        except ortho.SemiOrthError as exc:
            results.append({"error": str(exc),
                            "witness": [list(map(int, clifford.subset_members(m)))
                                        for m in exc.witness]})
            ok = False
            continue
        orth = ortho.orthogonalize(fam)
        gamma = ortho.gamma_defect(fam)
        rep = ortho.equivalence_report(fam)
        entry = {
            "gamma_rank": gamma.rank(),
            "equivalence": rep.to_dict(),
            "orthogonalized": orth.__class__.__name__,
        }
        if args.include_family:
            entry["family"] = ortho.SemiOrthFamily(
                r=orth.r, rank_w=orth.rank_w, rank_v=orth.rank_v,
                e=orth.e, f=orth.f, order=orth.order).to_json()
        ok = ok and rep.agree
        results.append(entry)
    doc = {"command": "orthogonalize",
           "config": {"seed": args.seed, "order": args.order,
                      "count": len(fams), "threads": _threads()},
           "results": results, "ok": ok}
    _emit(doc, args.out)
    return 0 if ok else 1


def cmd_affine_check(args):
    _check_limit("rank", args.rank, "rank")
    _check_limit("weight", args.weight, "weight")
    r = args.rank
    bound = args.charge_bound
    trunc = fock.fock_truncation(r, (-bound, bound), args.weight)
    keys = [(l, n) for l in range(-bound, bound + 1)
            for n in range(args.weight + 1)]
    verifier = affine.AffineVerifier(trunc, r)
    modes = range(-args.modes, args.modes + 1)
    relations = []
    ok = True
    safe_total = 0
    for i, j, k, l in itertools.product(range(r), repeat=4):
        for a in modes:
            for b in modes:
                rep = verifier.check_residual(i, j, k, l, a, b, keys)
                safe_total += rep.checked
                if not rep.ok:
                    ok = False
                relations.append(rep.to_dict())
    derivation = []
    for i in range(r):
        for j in range(r):
            for a in modes:
                rep = verifier.check_derivation(i, j, a, keys)
                if not rep.ok:
                    ok = False
                derivation.append(rep.to_dict())
    zero_mode = verifier.check_charge_zero_mode(keys).to_dict()
    central = [rep.to_dict() for rep in verifier.check_central_identity(keys)]
    ok = ok and zero_mode["ok"] and all(c["ok"] for c in central)
    doc = {
        "command": "affine-check",
        "config": {"rank": r, "modes": args.modes, "weight": args.weight,
                   "charge_bound": bound, "threads": _threads()},
        "residual_norms": sorted({0 if rep["ok"] else 1 for rep in relations}),
        "relations_checked": len(relations),
        "safe_window_pieces": safe_total,
        "derivation": {"ok": all(d["ok"] for d in derivation),
                       "sign_convention": "d = -(weight operator)"},
        "zero_mode_charge": zero_mode,
        "central_element": {"action": "identity (level one)",
                            "ok": all(c["ok"] for c in central)},
        "failures": [rep for rep in relations + derivation if not rep["ok"]],
        "ok": ok,
    }
    _emit(doc, args.out)
    return 0 if ok else 1


def cmd_blowup_series(args):
    _check_limit("order", args.order, "order")
    series = qseries.blowup_series(args.a, args.order)
    doc = {"command": "blowup-series",
           "config": {"a": args.a, "order": args.order, "threads": _threads()},
           "series": series.to_json()}
    ok = True
    if args.check_theta:
        lhs = series.substitute_y_inverse_x() * \
            (qseries.eta(args.order) * qseries.eta(args.order))
        rhs = qseries.theta(args.a, args.order)
        verified = lhs.offset == rhs.offset and all(
            lhs.coeffs[n] == rhs.coeffs[n]
            for n in range(min(lhs.order, rhs.order) + 1))
        doc["identity_verified"] = verified
        ok = verified
    doc["ok"] = ok
    _emit(doc, args.out)
    return 0 if ok else 1


def cmd_character(args):
    _check_limit("rank", args.rank, "rank")
    _check_limit("order", args.order, "order")
    series = qseries.fock_character(args.rank, args.charge, args.order,
                                    grading=args.grading)
    doc = {"command": "character",
           "config": {"rank": args.rank, "charge": args.charge,
                      "order": args.order, "grading": args.grading,
                      "threads": _threads()},
           "series": series.to_json(), "ok": True}
    _emit(doc, args.out)
    return 0


def cmd_schubert_pair(args):
    basis, mat = schubert.duality_pairing(args.n, args.d)
    identity = mat == IntMatrix.identity(len(basis))
    doc = {"command": "schubert-pair",
           "config": {"n": args.n, "d": args.d, "threads": _threads()},
           "basis": [list(lam) for lam in basis],
           "matrix": mat.to_json([str(list(l)) for l in basis],
                                 [str(list(l)) for l in basis]),
           "identity": identity, "ok": identity}
    _emit(doc, args.out)
    return 0 if identity else 1


def cmd_colimit_check(args):
    _check_limit("rank", args.rank, "rank")
    _check_limit("weight-max", args.weight_max, "weight")
    w_ranks = {0: 1} if not args.w_ranks else \
        {int(k): v for k, v in json.loads(args.w_ranks).items()}
    rng = random.Random(args.seed) if args.scramble else None
    rep = colimit.standard_model(args.rank, w_ranks, scramble_rng=rng)
    pieces = []
    ok = True
    for l in range(args.charge_min, args.charge_max + 1):
        for n in range(rep.n0, args.weight_max + 1):
            try:
                res = colimit.h_infinity(rep, l, n, args.m_max)
            except colimit.StabilizationError as exc:
                pieces.append({"l": l, "n": n, "error": str(exc)})
                ok = False
                continue
            measured = colimit.measured_stab_index(rep, l, n)
            entry = res.to_dict()
            entry["measured_stab_index"] = measured
            entry["stab_matches_measurement"] = res.stab_index == measured
            ok = ok and res.matches_fock and entry["stab_matches_measurement"]
            pieces.append(entry)
    doc = {"command": "colimit-check",
           "config": {"rank": args.rank, "charge_min": args.charge_min,
                      "charge_max": args.charge_max, "weight_max": args.weight_max,
                      "m_max": args.m_max, "w_ranks": {str(k): v for k, v in w_ranks.items()},
                      "scramble": bool(args.scramble), "seed": args.seed,
                      "threads": _threads()},
           "pieces": pieces, "ok": ok}
    _emit(doc, args.out)
    return 0 if ok else 1


def cmd_trajectory(args):
    _check_limit("rank", args.rank, "rank")
    points = colimit.trajectory(args.rank, args.l, args.n, range(args.steps + 1))
    foliation_ok = None
    if args.l <= 0:
        foliation_ok = colimit.foliation_check(
            args.rank, (min(p.charge for p in points), 0),
            (args.n, max(p.weight for p in points)))
    doc = {"command": "trajectory",
           "config": {"rank": args.rank, "l": args.l, "n": args.n,
                      "steps": args.steps, "threads": _threads()},
           "points": [{"m": p.step, "charge": p.charge, "weight": p.weight}
                      for p in points],
           "parabola_verified": True,
           "foliation_verified": foliation_ok,
           "ok": foliation_ok is not False}
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(trajectory_svg(args.rank, args.l, args.n, points))
        doc["svg"] = args.svg
    _emit(doc, args.out)
    return 0 if doc["ok"] else 1


def trajectory_svg(r, l, n, points):
    """Orbit points and their parabola on the 45-degree sheared lattice."""
    unit = 28.0
    xmax = max(max(p.weight for p in points) + 2, 8)
    ymax = max(max(-p.charge for p in points) + 2, 6)

    def place(x, y):
        # shear: the charge axis runs at 45 degrees
        return (20 + unit * (x + 0.5 * y), 20 + unit * (ymax - 0.5 * y))

    width = 40 + unit * (xmax + 0.5 * ymax)
    height = 40 + unit * ymax
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
             f'width="{width:.0f}" height="{height:.0f}">']
    for y in range(ymax + 1):
        x0, y0 = place(0, y)
        x1, y1 = place(xmax, y)
        parts.append(f'<line x1="{x0:.1f}" y1="{y0:.1f}" x2="{x1:.1f}" y2="{y1:.1f}" '
                     'stroke="#cccccc" stroke-dasharray="3,3"/>')
    for x in range(xmax + 1):
        x0, y0 = place(x, 0)
        x1, y1 = place(x, ymax)
        parts.append(f'<line x1="{x0:.1f}" y1="{y0:.1f}" x2="{x1:.1f}" y2="{y1:.1f}" '
                     'stroke="#cccccc" stroke-dasharray="3,3"/>')
    # parabola through the orbit: x(t) = n + (t + l)(t - r - l)/(2r), y = t
    curve = []
    steps = 64
    for k in range(steps + 1):
        t = -l + (max(-min(p.charge for p in points), 1) + l) * k / steps
        x = n + (t + l) * (t - r - l) / (2 * r)
        curve.append(place(x, t))
    path = " ".join(f"{x:.1f},{y:.1f}" for x, y in curve)
    parts.append(f'<polyline points="{path}" fill="none" stroke="#cc2222" '
                 'stroke-width="1.5" stroke-dasharray="6,3"/>')
    for p in points:
        cx, cy = place(p.weight, -p.charge)
        parts.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="3.5" fill="#222222"/>')
    x0, y0 = place(points[0].weight, -points[0].charge)
    parts.append(f'<text x="{x0 + 6:.1f}" y="{y0 - 6:.1f}" font-size="12">'
                 f'({l}, {n})</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# -- dispatcher -----------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fermionlab",
        description="Exact verification runs for the Clifford/Fock/affine engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("relations", help="Clifford and Fock relation suite")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--fock-weight", type=int, default=0,
                   help="also check level operators on a truncation up to this weight")
    p.add_argument("--fock-charge", type=int, default=1)
    p.add_argument("--fock-levels", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_relations)

    p = sub.add_parser("orthogonalize", help="orthogonalize a family (file or random)")
    p.add_argument("--family", help="family JSON file")
    p.add_argument("--random", type=int, default=0, help="generate this many random families")
    p.add_argument("--defective", type=int, default=0,
                   help="how many of the random families carry a defect")
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--rank-w", type=int, default=2)
    p.add_argument("--order", choices=("lex", "weight"), default="lex")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--include-family", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_orthogonalize)

    p = sub.add_parser("affine-check", help="affine relation residuals on a truncation")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--modes", type=int, default=2)
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--charge-bound", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_affine_check)

    p = sub.add_parser("blowup-series", help="two-variable blow-up series")
    p.add_argument("--a", type=int, choices=(0, 1), required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--check-theta", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_blowup_series)

    p = sub.add_parser("character", help="graded dimension series of a charge sector")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--charge", type=int, default=0)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--grading", choices=("weight", "weight-coho"), default="weight")
    p.add_argument("--out")
    p.set_defaults(func=cmd_character)

    p = sub.add_parser("schubert-pair", help="duality pairing matrix of Gr(n, d)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_schubert_pair)

    p = sub.add_parser("colimit-check", help="stabilization report for standard models")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--charge-min", type=int, default=-1)
    p.add_argument("--charge-max", type=int, default=1)
    p.add_argument("--weight-max", type=int, default=3)
    p.add_argument("--m-max", type=int, default=12)
    p.add_argument("--w-ranks", help='JSON object {"weight": rank}, default {"0": 1}')
    p.add_argument("--scramble", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_colimit_check)

    p = sub.add_parser("trajectory", help="parabolic orbit of a lattice point")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--svg", help="write an SVG figure to this path")
    p.add_argument("--out")
    p.set_defaults(func=cmd_trajectory)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        status = args.func(args)
    except LimitError as exc:
        parser.exit(2, f"usage error: {exc}\n")
    except (OSError, json.JSONDecodeError) as exc:
        parser.exit(2, f"usage error: {exc}\n")
    except AssertionError as exc:
        _emit({"command": args.command, "ok": False, "diagnostic": str(exc)},
              getattr(args, "out", None))
        status = 1
    print(f"[{args.command}] finished in {time.monotonic() - started:.2f}s",
          file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
