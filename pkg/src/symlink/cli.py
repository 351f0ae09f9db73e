"""Single executable dispatching every operation over JSON documents.

Reports are single JSON documents on stdout (or --out), rendered by a
deterministic emitter: sorted keys, rationals as canonical strings, floats
with 17 significant digits.  Exit codes: 0 success or positive verdict,
1 negative verdict or rejection, 2 usage or validation errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import gibbs as gibbs_mod
from . import linking as linking_mod
from . import measures as measures_mod
from . import model as model_mod
from . import sections as sections_mod
from . import words as words_mod
from .errors import SymlinkError
from .words import Axis, CyclicWord


def render_json(obj, indent=0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        keys = sorted(obj.keys())
        items = [
            f'{pad}  {json.dumps(str(k))}: {render_json(obj[k], indent + 1)}'
            for k in keys
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {render_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format(obj, ".17g")
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if obj is None:
        return "null"
    return json.dumps(obj)


def _read_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_model(path: str):
    return model_mod.load_model(_read_text(path))


def _load_word(doc) -> CyclicWord:
    return CyclicWord(tuple(doc))


def _load_potential(model, doc) -> gibbs_mod.Potential:
    weight = {}
    for item in doc:
        weight[(item["from"], item["to"])] = float(item["weight"])
    pot = gibbs_mod.Potential(weight)
    gibbs_mod.check_potential(model, pot)
    return pot


def _potential_doc(model, pot) -> list:
    return [{"from": a, "to": b, "weight": float(pot((a, b)))}
            for (a, b) in model.sorted_edges()]


def _flow_doc(model, flow) -> dict:
    edges = [{"from": a, "to": b, "mass": str(flow.mass[(a, b)])}
             for (a, b) in model.sorted_edges() if (a, b) in flow.mass]
    return {"edges": edges, "total": str(flow.total)}


def _class_doc(cls) -> list:
    return [str(Fraction(x)) for x in cls]


def _base_table(model, path):
    if path is None:
        return linking_mod.base_table_from_model(model)
    return linking_mod.base_table_from_document(_read_json(path))


def _base_table_doc(base: linking_mod.BaseLinkTable):
    if base.default_zero:
        return None
    entries = []
    for key, value in base.entries.items():
        pair = sorted(key)
        entries.append({"u": list(pair[0]), "v": list(pair[-1]), "value": str(value)})
    entries.sort(key=lambda d: (d["u"], d["v"]))
    return entries


def _base_table_from_embedded(doc):
    if doc is None:
        return linking_mod.BaseLinkTable()
    return linking_mod.base_table_from_document(doc)


def _minlink_result_doc(res: sections_mod.MinLinkResult) -> dict:
    doc = {
        "status": res.status,
        "horizon": res.horizon,
        "orbit_values": [
            {"word": list(u.letters), "value": str(v)} for u, v in res.orbit_values
        ],
    }
    if res.status == "optimal-at-horizon":
        doc["value"] = str(res.value)
        doc["argmin"] = measures_mod.measure_to_document(res.argmin)
    return doc


# ---------------------------------------------------------------- handlers


def cmd_validate(args):
    model = model_mod.model_from_document(_read_json(args.model))
    report = model_mod.validate(model)
    doc = {
        "ok": report.ok,
        "checks": [
            {"name": c.name, "passed": c.passed, "detail": c.detail}
            for c in report.checks
        ],
    }
    return (0 if report.ok else 2), doc


def cmd_compare(args):
    model = _load_model(args.model)
    w = words_mod.biword_from_document(_read_json(args.w))
    x = words_mod.biword_from_document(_read_json(args.x))
    axis = Axis.VERTICAL if args.axis == "vertical" else Axis.HORIZONTAL
    ordering = words_mod.compare(model, w, x, axis)
    return 0, {"axis": args.axis, "ordering": ordering.value}


def cmd_word_primitive(args):
    u = _load_word(_read_json(args.word))
    root, exponent = words_mod.primitive_decompose(u)
    return 0, {
        "word": list(u.letters),
        "root": list(root.letters),
        "exponent": exponent,
        "primitive": exponent == 1,
    }


def cmd_measure(args):
    model = _load_model(args.model)
    nu = measures_mod.measure_from_document(model, _read_json(args.measure))
    if args.action == "reduce":
        if args.cuboid is not None:
            out = measures_mod.reduce(model, args.cuboid, nu)
            doc = {"cuboid": args.cuboid, "measure": measures_mod.measure_to_document(out)}
        else:
            out = measures_mod.reduce_all(model, nu)
            doc = {"cuboid": None, "measure": measures_mod.measure_to_document(out)}
        return 0, doc
    if args.action == "class":
        cls = measures_mod.homology_class(model, nu)
        return 0, {"class": _class_doc(cls), "null": all(x == 0 for x in cls)}
    flow = measures_mod.edge_flow(model, nu)
    doc = _flow_doc(model, flow)
    doc["conserved"] = measures_mod.flow_is_conserved(model, flow)
    return 0, doc


def cmd_link(args):
    model = _load_model(args.model)
    nu = measures_mod.measure_from_document(model, _read_json(args.nu))
    mu = measures_mod.measure_from_document(model, _read_json(args.mu))
    nu_cls = measures_mod.homology_class(model, nu)
    mu_cls = measures_mod.homology_class(model, mu)
    flags = {
        "nu_class": _class_doc(nu_cls),
        "mu_class": _class_doc(mu_cls),
        "nu_null": all(x == 0 for x in nu_cls),
        "mu_null": all(x == 0 for x in mu_cls),
    }
    if args.action == "pair":
        if args.cuboid is None:
            raise SymlinkError("link pair requires --cuboid")
        value = linking_mod.linking_pairing(model, args.cuboid, nu, mu)
        doc = {"cuboid": args.cuboid, "value": str(value)}
        doc.update(flags)
        return 0, doc
    base = _base_table(model, args.base)
    lv = linking_mod.link_full(model, nu, mu, base)
    doc = lv.to_document()
    doc.update(flags)
    return 0, doc


def cmd_gibbs(args):
    model = _load_model(args.model)
    tol = args.tol if args.tol is not None else gibbs_mod.POWER_TOL
    if args.action == "pressure":
        pot = _load_potential(model, _read_json(args.potential))
        rep = gibbs_mod.pressure(model, pot, tol)
        return 0, {
            "pressure": rep.pressure,
            "spectral_radius": rep.spectral_radius,
            "right_residual": rep.right_residual,
            "left_residual": rep.left_residual,
            "iterations": rep.iterations,
        }
    if args.action == "state":
        pot = _load_potential(model, _read_json(args.potential))
        state = gibbs_mod.equilibrium_state(model, pot, tol)
        rep = gibbs_mod.pressure(model, pot, tol)
        return 0, {
            "stationary": {c: state.stationary[c] for c in model.alphabet},
            "edge_prob": [
                {"from": a, "to": b, "prob": state.edge_prob[(a, b)],
                 "mass": state.edge_mass((a, b))}
                for (a, b) in model.sorted_edges()
            ],
            "entropy": gibbs_mod.entropy(state),
            "pressure": rep.pressure,
        }
    if args.action == "escape":
        pot = _load_potential(model, _read_json(args.potential))
        scen = _read_json(args.scenario)
        gamma = _load_word(scen["gamma"])
        U = {(a, b) for a, b in (tuple(e) for e in scen["U"])}
        rep = gibbs_mod.escape_bound_check(model, pot, gamma, U,
                                           float(scen["C1"]), float(scen["C2"]))
        doc = {
            "escape_mass": rep.escape_mass,
            "bound": rep.bound,
            "top_entropy": rep.top_entropy,
            "passed": rep.passed,
        }
        return (0 if rep.passed else 1), doc
    if args.action == "nullclass":
        scen = _read_json(args.scenario)
        plus = [_load_word(wrd) for wrd in scen["plus"]]
        minus = [_load_word(wrd) for wrd in scen["minus"]]
        base_pot = _load_potential(model, scen["base_potential"]) \
            if scen.get("base_potential") else gibbs_mod.constant_potential(model)
        rep = gibbs_mod.null_class_potential(model, plus, minus, base_pot,
                                             float(scen.get("r", 10.0)))
        doc = {
            "x": list(rep.x),
            "residual": rep.residual,
            "converged": rep.converged,
            "iterations": rep.iterations,
            "method": rep.method,
        }
        return (0 if rep.converged else 1), doc
    # homologically-full test; emitted as a self-contained certificate
    max_len = args.max_len if args.max_len is not None else len(model.alphabet)
    rep = gibbs_mod.is_homologically_full(model, max_len)
    result = {
        "full": rep.full,
        "horizon": rep.horizon,
        "cycles": [list(u.letters) for u in rep.cycles],
    }
    if rep.full:
        result["combination"] = [
            {"word": list(u.letters), "coefficient": str(rep.combination[u])}
            for u in rep.cycles
        ]
    else:
        result["separating_functional"] = [str(v) for v in rep.separating_functional]
    doc = {
        "kind": "homologically-full",
        "model": model_mod.model_to_document(model),
        "result": result,
    }
    return (0 if rep.full else 1), doc


def cmd_section(args):
    model = _load_model(args.model)
    if args.action == "check":
        weights_doc = _read_json(args.weights)
        w = sections_mod.weighting_from_document(model, weights_doc)
        cert = sections_mod.cross_section(model, w)
        if isinstance(cert, sections_mod.PotentialCertificate):
            cert_doc = {
                "type": "potential",
                "values": {c: str(cert.values[c]) for c in model.alphabet},
            }
            code = 0
        else:
            cert_doc = {
                "type": "obstruction",
                "cycle": list(cert.cycle.letters),
                "weight_sum": str(cert.weight_sum),
            }
            code = 1
        doc = {
            "kind": "cross-section",
            "model": model_mod.model_to_document(model),
            "weights": weights_doc,
            "certificate": cert_doc,
        }
        return code, doc

    if args.action in ("minlink", "verdict"):
        gamma_doc = _read_json(args.gamma)
        gamma = measures_mod.measure_from_document(model, gamma_doc)
        base = _base_table(model, args.base)
        if args.action == "minlink":
            res = sections_mod.min_link(model, gamma, base, args.max_len)
            doc = {
                "kind": "min-link",
                "model": model_mod.model_to_document(model),
                "gamma": gamma_doc,
                "base": _base_table_doc(base),
                "result": _minlink_result_doc(res),
            }
            return 0, doc
        verdict = sections_mod.birkhoff_boundary_verdict(model, gamma, base, args.max_len)
        doc = {
            "kind": "birkhoff-verdict",
            "model": model_mod.model_to_document(model),
            "gamma": gamma_doc,
            "base": _base_table_doc(base),
            "result": {
                "verdict": verdict.verdict,
                "vacuous": verdict.vacuous,
                "horizon": verdict.horizon,
                "note": verdict.note,
                "min": _minlink_result_doc(verdict.min_result),
            },
        }
        return (0 if verdict.positive else 1), doc

    if args.action == "fried":
        u1 = _load_word(_read_json(args.u1))
        u2 = _load_word(_read_json(args.u2))
        cycle = sections_mod.fried_boundary(model, u1, u2, args.k1, args.k2)
        doc = {
            "kind": "fried-boundary",
            "model": model_mod.model_to_document(model),
            "u1": list(u1.letters),
            "u2": list(u2.letters),
            "k1": args.k1,
            "k2": args.k2,
            "result": {
                "cycle": cycle.to_document(),
                "class": _class_doc(sections_mod.boundary_cycle_class(model, cycle)),
            },
        }
        return 0, doc

    raise SymlinkError(f"unknown section action {args.action!r}")


def cmd_separate(args):
    points_doc = _read_json(args.points)
    points = [
        (tuple(model_mod.parse_rational(v) for v in item["x"]),
         model_mod.parse_rational(item["t"]))
        for item in points_doc
    ]
    cert = sections_mod.separating_functional(points)
    if isinstance(cert, sections_mod.SeparatingFunctional):
        result = {
            "type": "functional",
            "f": [str(v) for v in cert.functional],
            "eta": str(cert.margin),
        }
        code = 0
    else:
        result = {
            "type": "witness",
            "coefficients": [str(c) for c in cert.coefficients],
        }
        code = 1
    doc = {"kind": "separating-functional", "points": points_doc, "result": result}
    return code, doc


def _rebuild_model(doc):
    model = model_mod.model_from_document(doc)
    report = model_mod.validate(model)
    if not report.ok:
        raise SymlinkError("embedded model fails validation")
    return model


def cmd_verify(args):
    cert = _read_json(args.certificate)
    kind = cert.get("kind")
    ok = False
    detail = ""

    if kind == "cross-section":
        model = _rebuild_model(cert["model"])
        w = sections_mod.weighting_from_document(model, cert["weights"])
        cdoc = cert["certificate"]
        if cdoc["type"] == "potential":
            pot = sections_mod.PotentialCertificate(
                {c: model_mod.parse_rational(v) for c, v in cdoc["values"].items()})
            ok = pot.verify(model, w)
            detail = "potential inequalities replayed on every edge"
        else:
            obc = sections_mod.ObstructionCertificate(
                CyclicWord(tuple(cdoc["cycle"])),
                model_mod.parse_rational(cdoc["weight_sum"]))
            ok = words_mod.is_valid_cyclic(model, obc.cycle) and obc.verify(model, w)
            detail = "obstruction cycle replayed"

    elif kind == "separating-functional":
        points = [
            (tuple(model_mod.parse_rational(v) for v in item["x"]),
             model_mod.parse_rational(item["t"]))
            for item in cert["points"]
        ]
        rdoc = cert["result"]
        if rdoc["type"] == "functional":
            c = sections_mod.SeparatingFunctional(
                tuple(model_mod.parse_rational(v) for v in rdoc["f"]),
                model_mod.parse_rational(rdoc["eta"]))
            ok = c.verify(points)
            detail = "separating inequalities replayed on every point"
        else:
            c = sections_mod.SeparationWitness(
                tuple(model_mod.parse_rational(v) for v in rdoc["coefficients"]))
            ok = c.verify(points)
            detail = "witness combination replayed"

    elif kind == "homologically-full":
        model = _rebuild_model(cert["model"])
        result = cert["result"]
        cycles = tuple(CyclicWord(tuple(wrd)) for wrd in result["cycles"])
        if result["full"]:
            combo = {
                CyclicWord(tuple(item["word"])): model_mod.parse_rational(item["coefficient"])
                for item in result["combination"]
            }
            rep = gibbs_mod.HomologyFullReport(True, result["horizon"], cycles, combo, None)
        else:
            rep = gibbs_mod.HomologyFullReport(
                False, result["horizon"], cycles, None,
                tuple(model_mod.parse_rational(v) for v in result["separating_functional"]))
        ok = rep.certificate_ok(model)
        detail = "combination / functional replayed against the cycle classes"

    elif kind == "min-link":
        model = _rebuild_model(cert["model"])
        gamma = measures_mod.measure_from_document(model, cert["gamma"])
        base = _base_table_from_embedded(cert.get("base"))
        result = cert["result"]
        if result["status"] == "infeasible":
            res = sections_mod.min_link(model, gamma, base, result["horizon"])
            ok = res.status == "infeasible"
            detail = "infeasibility replayed at the horizon"
        else:
            argmin = measures_mod.measure_from_document(model, result["argmin"])
            feasible = (
                argmin.total_mass() == 1
                and measures_mod.is_null_class(model, argmin)
                and all(a > 0 for _, a in argmin)
            )
            lv = linking_mod.link_full_staged(model, gamma, argmin, base,
                                              require_null_class=False)
            ok = feasible and str(lv.value) == result["value"]
            detail = "argmin feasibility and linking value replayed"

    elif kind == "birkhoff-verdict":
        model = _rebuild_model(cert["model"])
        gamma = measures_mod.measure_from_document(model, cert["gamma"])
        base = _base_table_from_embedded(cert.get("base"))
        result = cert["result"]
        verdict = sections_mod.birkhoff_boundary_verdict(
            model, gamma, base, result["horizon"])
        ok = verdict.verdict == result["verdict"] and verdict.vacuous == result["vacuous"]
        detail = "verdict replayed at the horizon"

    elif kind == "fried-boundary":
        model = _rebuild_model(cert["model"])
        cycle = sections_mod.fried_boundary(
            model,
            CyclicWord(tuple(cert["u1"])), CyclicWord(tuple(cert["u2"])),
            cert["k1"], cert["k2"])
        emitted = {tuple(item["word"]): item["multiplicity"] for item in cert["result"]["cycle"]}
        rebuilt = {u.letters: m for u, m in cycle.terms.items()}
        ok = emitted == rebuilt and all(
            v == 0 for v in sections_mod.boundary_cycle_class(model, cycle))
        detail = "boundary cycle replayed and class rechecked"

    else:
        raise SymlinkError(f"unknown certificate kind {kind!r}")

    return (0 if ok else 1), {"kind": kind, "verified": ok, "detail": detail}


# ---------------------------------------------------------------- plumbing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symlink",
        description="symbolic linking numbers for Markov-partitioned flows",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def out_flag(p):
        p.add_argument("--out", default=None, help="write the report here instead of stdout")

    p = sub.add_parser("validate", help="validate a model document")
    p.add_argument("model")
    out_flag(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compare", help="compare two itineraries along an axis")
    p.add_argument("model")
    p.add_argument("w")
    p.add_argument("x")
    p.add_argument("--axis", choices=["vertical", "horizontal"], required=True)
    out_flag(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("word", help="word combinatorics")
    wsub = p.add_subparsers(dest="action", required=True)
    wp = wsub.add_parser("primitive", help="primitive decomposition")
    wp.add_argument("word")
    out_flag(wp)
    wp.set_defaults(func=cmd_word_primitive)

    p = sub.add_parser("measure", help="measure operations")
    msub = p.add_subparsers(dest="action", required=True)
    for name in ("reduce", "class", "flow"):
        mp = msub.add_parser(name)
        mp.add_argument("model")
        mp.add_argument("measure")
        if name == "reduce":
            mp.add_argument("--cuboid", default=None)
        out_flag(mp)
        mp.set_defaults(func=cmd_measure, action=name)

    p = sub.add_parser("link", help="linking pairings")
    lsub = p.add_subparsers(dest="action", required=True)
    for name in ("pair", "full"):
        lp = lsub.add_parser(name)
        lp.add_argument("model")
        lp.add_argument("nu")
        lp.add_argument("mu")
        if name == "pair":
            lp.add_argument("--cuboid", required=True)
        else:
            lp.add_argument("--base", default=None)
        out_flag(lp)
        lp.set_defaults(func=cmd_link, action=name)

    p = sub.add_parser("gibbs", help="thermodynamic formalism")
    gsub = p.add_subparsers(dest="action", required=True)
    for name in ("pressure", "state"):
        gp = gsub.add_parser(name)
        gp.add_argument("model")
        gp.add_argument("potential")
        gp.add_argument("--tol", type=float, default=None)
        out_flag(gp)
        gp.set_defaults(func=cmd_gibbs, action=name)
    gp = gsub.add_parser("escape")
    gp.add_argument("model")
    gp.add_argument("potential")
    gp.add_argument("scenario")
    gp.add_argument("--tol", type=float, default=None)
    out_flag(gp)
    gp.set_defaults(func=cmd_gibbs, action="escape")
    gp = gsub.add_parser("nullclass")
    gp.add_argument("model")
    gp.add_argument("scenario")
    gp.add_argument("--tol", type=float, default=None)
    out_flag(gp)
    gp.set_defaults(func=cmd_gibbs, action="nullclass")
    gp = gsub.add_parser("full")
    gp.add_argument("model")
    gp.add_argument("--max-len", "--horizon", dest="max_len", type=int, default=None)
    gp.add_argument("--tol", type=float, default=None)
    out_flag(gp)
    gp.set_defaults(func=cmd_gibbs, action="full")

    p = sub.add_parser("section", help="cross-section and boundary procedures")
    ssub = p.add_subparsers(dest="action", required=True)
    sp = ssub.add_parser("check")
    sp.add_argument("model")
    sp.add_argument("weights")
    out_flag(sp)
    sp.set_defaults(func=cmd_section, action="check")
    for name in ("minlink", "verdict"):
        sp = ssub.add_parser(name)
        sp.add_argument("model")
        sp.add_argument("gamma")
        sp.add_argument("--max-len", "--horizon", dest="max_len", type=int, required=True)
        sp.add_argument("--base", default=None)
        out_flag(sp)
        sp.set_defaults(func=cmd_section, action=name)
    sp = ssub.add_parser("fried")
    sp.add_argument("model")
    sp.add_argument("u1")
    sp.add_argument("u2")
    sp.add_argument("--k1", type=int, required=True)
    sp.add_argument("--k2", type=int, required=True)
    out_flag(sp)
    sp.set_defaults(func=cmd_section, action="fried")
    sp = ssub.add_parser("separate")
    sp.add_argument("points")
    out_flag(sp)
    sp.set_defaults(func=cmd_separate)

    p = sub.add_parser("verify", help="replay a certificate")
    p.add_argument("certificate")
    out_flag(p)
    p.set_defaults(func=cmd_verify)

    return parser


def _config_echo(args) -> dict:
    skip = {"func"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    cfg["threads"] = os.environ.get("SYMLINK_THREADS", "1")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, result = args.func(args)
    except SymlinkError as exc:
        report = {"error": str(exc), "config": _config_echo(args)}
        sys.stdout.write(render_json(report) + "\n")
        return 2
    except FileNotFoundError as exc:
        report = {"error": f"cannot read {exc.filename}", "config": _config_echo(args)}
        sys.stdout.write(render_json(report) + "\n")
        return 2

    report = {"config": _config_echo(args), "result": result}
    text = render_json(report) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
