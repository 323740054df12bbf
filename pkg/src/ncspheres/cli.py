"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path

from . import chern as ch
from . import numrep
from .algebra import Presentation, confluence_probe
from .errors import DomainError, NormalizationError, UsageError
from .formats import dumps, presentation_from_dict
from .presets import (
    MorphismSpec,
    centrality_check,
    check_character,
    check_morphism,
    check_relations,
    preset,
)

REFERENCE_CH2_COUNT = 222
CHARACTER_TOL = 1e-12


def data_path(name: str) -> Path:
    """Resolve ``name`` as a file path, falling back to the bundled data."""
    p = Path(name)
    if p.exists():
        return p
    bundled = resources.files("ncspheres") / "data" / name
    if bundled.is_file():
        return Path(str(bundled))
    raise UsageError(f"file not found: {name}")


def load_json(name: str) -> dict:
    try:
        with open(data_path(name)) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {name}: {exc}") from None


def _presentation(spec) -> Presentation:
    if isinstance(spec, str):
        return preset(spec)
    if isinstance(spec, dict):
        return presentation_from_dict(spec)
    raise UsageError("presentation must be a preset name or an inline presentation")


def _pick_presentation(args) -> Presentation:
    if getattr(args, "presentation", None):
        return presentation_from_dict(load_json(args.presentation))
    return preset(args.preset)


def _emit(args, report: dict) -> None:
    text = dumps(report)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


# subcommands ----------------------------------------------------------------


def cmd_normalize(args) -> int:
    pres = _pick_presentation(args)
    result = pres.parse(args.expr).normalize()
    if args.json or args.out:
        _emit(args, {"presentation": pres.name, "input": args.expr, "normal_form": result.to_text()})
    else:
        print(result.to_text())
    return 0


def _poly_report(residuals) -> tuple[list[str], bool]:
    texts = [r.to_text() for r in residuals]
    return texts, all(r.is_zero() for r in residuals)


def cmd_check(args) -> int:
    target = args.target
    if target == "relations":
        pres = _pick_presentation(args)
        texts, ok = _poly_report(check_relations(pres))
        rels = [r.to_text() for r in pres.relations]
        report = {
            "check": "relations",
            "presentation": pres.name,
            "items": [{"relation": r, "residual": t} for r, t in zip(rels, texts)],
            "passed": ok,
        }
    elif target == "morphism":
        if not args.spec:
            raise UsageError("check morphism needs --spec")
        data = load_json(args.spec)
        try:
            src, tgt = _presentation(data["source"]), _presentation(data["target"])
            m = MorphismSpec.build(src, tgt, data["images"])
        except KeyError as exc:
            raise UsageError(f"morphism spec lacks {exc}") from None
        texts, ok = _poly_report(check_morphism(m))
        report = {
            "check": "morphism",
            "source": src.name,
            "target": tgt.name,
            "images": {k: v.to_text() for k, v in m.images.items()},
            "items": [{"relation": r.to_text(), "residual": t} for r, t in zip(src.relations, texts)],
            "passed": ok,
        }
    elif target == "character":
        pres = _pick_presentation(args)
        values = {}
        for item in args.value or []:
            name, _, val = item.partition("=")
            if not val:
                raise UsageError(f"--value expects NAME=COMPLEX, got {item!r}")
            try:
                values[name] = complex(val.replace("i", "j"))
            except ValueError:
                raise UsageError(f"cannot read complex number {val!r}") from None
        res = check_character(pres, values, args.q, args.theta)
        ok = all(r < args.tol for r in res)
        report = {
            "check": "character",
            "presentation": pres.name,
            "q": args.q,
            "theta": args.theta,
            "values": {k: [v.real, v.imag] for k, v in values.items()},
            "items": [{"relation": r.to_text(), "residual": v} for r, v in zip(pres.relations, res)],
            "tolerance": args.tol,
            "passed": ok,
        }
    elif target == "center":
        pres = _pick_presentation(args)
        if not args.element:
            raise UsageError("check center needs --element")
        p = pres.parse(args.element)
        texts, ok = _poly_report(centrality_check(pres, p))
        report = {
            "check": "center",
            "presentation": pres.name,
            "element": p.normalize().to_text(),
            "items": [{"generator": g.name, "commutator": t} for g, t in zip(pres.generators, texts)],
            "passed": ok,
        }
    elif target == "confluence":
        pres = _pick_presentation(args)
        rep = confluence_probe(pres, args.trials, args.seed, args.max_degree)
        report = {"check": "confluence", **rep.to_dict()}
        ok = rep.passed
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown check {target!r}")
    _emit(args, report)
    return 0 if ok else 1


def _projector(name: str) -> ch.MatrixPoly:
    if name == "e":
        return ch.projector_e(preset("S4QT"))
    if name == "eprime":
        return ch.projector_eprime(preset("S4QT_X"))
    raise UsageError(f"unknown projector {name!r}")


def cmd_chern(args) -> int:
    E = _projector(args.projector)
    chain = ch.chern(E, args.degree)
    report = {
        "projector": args.projector,
        "presentation": E.pres.name,
        "degree": args.degree,
        "chain_degree": chain.degree,
        "zero": chain.is_zero(),
        "term_count": ch.term_count(chain),
        "l_spread": chain.l_spread(),
        "basis_convention": ch.BASIS_CONVENTION,
        "normalization_constant": str(ch.chern_constant(args.degree)),
    }
    if args.projector == "e" and args.degree == 2:
        report["reference_term_count"] = REFERENCE_CH2_COUNT
        report["matches_reference_count"] = ch.term_count(chain) == REFERENCE_CH2_COUNT
    if not args.count_only:
        report["chain"] = chain.to_dict()
    ok = True
    if args.compare_fixture:
        fixture = ch.Chain.from_dict(load_json(args.compare_fixture), E.pres)
        if fixture.degree != chain.degree:
            raise UsageError("fixture degree does not match")
        verdict = ch.chain_compare(fixture, chain)
        report["comparison"] = {"fixture": args.compare_fixture, **verdict.to_dict()}
        ok = verdict.kind != "different"
    _emit(args, report)
    return 0 if ok else 1


def cmd_rep(args) -> int:
    key = args.preset.upper()
    if key == "S2Q":
        rep = numrep.podles_rep(args.q, args.sign, args.N)
    elif key in ("S4QT", "S4QT_X"):
        rep = numrep.rho_phi(args.q, args.theta, args.phi, args.N, args.M, args.sign)
    else:
        raise UsageError(f"no numeric representation for preset {args.preset!r}")
    params = {"q": args.q, "theta": args.theta, "phi": args.phi, "N": args.N, "M": args.M, "margin": args.margin}
    if args.task == "residuals":
        items = numrep.relation_residuals(preset(key), rep, args.margin)
        tol = args.tol if args.tol is not None else 1e-10
        ok = all(r.residual_norm < tol for r in items)
        report = {
            "task": "residuals",
            "presentation": key,
            "parameters": params,
            "items": [r.to_dict() for r in items],
            "tolerance": tol,
            "passed": ok,
        }
    else:
        if key == "S2Q":
            raise UsageError("spectrum needs the four-sphere representation")
        E = _projector(args.projector)
        spec = numrep.projector_spectrum(E, rep, args.margin)
        tol = args.tol if args.tol is not None else 1e-6
        ok = spec.max_distance_to_01 < tol
        report = {
            "task": "spectrum",
            "projector": args.projector,
            "parameters": params,
            **spec.to_dict(),
            "tolerance": tol,
            "passed": ok,
        }
    _emit(args, report)
    return 0 if ok else 1


# parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncspheres",
        description="Normal forms, Chern characters and operator checks for q,theta-deformed spheres.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pres=True):
        if pres:
            p.add_argument("--preset", default="S4QT", help="built-in presentation (default S4QT)")
            p.add_argument("--presentation", help="presentation file (JSON) instead of a preset")
        p.add_argument("--out", help="write the JSON report here instead of stdout")

    p = sub.add_parser("normalize", help="print the normal form of an expression")
    p.add_argument("expr")
    p.add_argument("--json", action="store_true", help="emit a JSON report")
    common(p)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("check", help="relation, morphism, character, centre and confluence checks")
    p.add_argument("target", choices=["relations", "morphism", "character", "center", "confluence"])
    p.add_argument("--spec", help="morphism spec file")
    p.add_argument("--element", help="element for the centre check")
    p.add_argument("--value", action="append", help="character value NAME=COMPLEX (repeatable)")
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--theta", type=float, default=math.sqrt(2) - 1)
    p.add_argument("--tol", type=float, default=CHARACTER_TOL)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-degree", type=int, default=6)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("chern", help="Chern character components of the projectors")
    p.add_argument("projector", choices=["e", "eprime"])
    p.add_argument("degree", type=int, choices=[0, 1, 2])
    p.add_argument("--compare-fixture", help="chain fixture (path or bundled name, e.g. ch1_reference.json)")
    p.add_argument("--count-only", action="store_true", help="omit the serialized chain")
    common(p, pres=False)
    p.set_defaults(func=cmd_chern)

    p = sub.add_parser("rep", help="truncated operator checks")
    p.add_argument("task", choices=["residuals", "spectrum"])
    p.add_argument("--preset", default="S4QT")
    p.add_argument("--projector", choices=["e", "eprime"], default="e")
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--theta", type=float, default=math.sqrt(2) - 1)
    p.add_argument("--phi", type=float, default=0.7)
    p.add_argument("--N", type=int, default=40)
    p.add_argument("--M", type=int, default=40)
    p.add_argument("--margin", type=int, default=3)
    p.add_argument("--sign", type=int, default=1, choices=[1, -1])
    p.add_argument("--tol", type=float, default=None)
    common(p, pres=False)
    p.set_defaults(func=cmd_rep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NormalizationError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
