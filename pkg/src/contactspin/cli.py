"""Command-line runner for the classification and verification suites.

Exit codes: 0 all checks pass, 1 some check failed, 2 the input could not be
parsed, 3 the structure equations violate d^2 = 0.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .clifford import DEFAULT_TOL, Subbundle
from .coframe import (BUILTINS, ModelParams, StructureDefinition, make_builtin, validate_structure)
from .contact import AContamination, CriterionInapplicable, classify, dF, torsion_form
from .curvature import (curvature, first_structure_residuals, identity_suite, levi_civita_forms,
                        sigma_T, torsion_connection, verify_curvature_structure)
from .forms import Form
from .report import Check, Report, definition_hash, render_text, skip, write_atomic
from .spinors import (BUNDLES, KillingProblem, conformal_checks, dilation_consequences,
                      killing_equation_solve, model_shape, parallel_spinors, parallel_spinors_by_holonomy,
                      routes_agree, theorem_suite)

SUITES = ("classify", "curvature", "spinors", "killing", "conformal", "identities", "theorems")
EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INTEGRABILITY = 0, 1, 2, 3
SEED_ENV = "CONTACTSPIN_SEED"
RANDOM_KILLING_SAMPLES = 20


class ParseError(ValueError):
    pass


@dataclass
class RunConfig:
    input: Optional[str] = None
    family: Optional[str] = None
    params: Tuple[Fraction, ...] = (Fraction(0),) * 4
    suites: Tuple[str, ...] = SUITES
    grid: Optional[Dict[str, List[Fraction]]] = None
    output: Optional[str] = None
    format: str = "json"
    seed: int = 0
    tolerance: float = DEFAULT_TOL
    jobs: int = 1
    conformal_scale: Fraction = Fraction(4)

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ParseError("tolerance must be positive")
        unknown = set(self.suites) - set(SUITES)
        if unknown:
            raise ParseError(f"unknown suites: {', '.join(sorted(unknown))}")


# parsing -------------------------------------------------------------------------

def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational number: {text!r}") from exc


def parse_grid(text: str) -> Dict[str, List[Fraction]]:
    """``"a=-2..2,b=0,c=-1..1"`` to integer ranges (or single rationals) per parameter."""
    out: Dict[str, List[Fraction]] = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise ParseError(f"grid entry {part!r} lacks '='")
        key, spec = (s.strip() for s in part.split("=", 1))
        if key not in "abcd" or len(key) != 1:
            raise ParseError(f"unknown grid parameter {key!r}")
        if ".." in spec:
            lo, hi = (parse_rational(s) for s in spec.split("..", 1))
            if lo.denominator != 1 or hi.denominator != 1 or hi < lo:
                raise ParseError(f"grid range {spec!r} must be integers lo..hi with lo <= hi")
            out[key] = [Fraction(v) for v in range(int(lo), int(hi) + 1)]
        else:
            out[key] = [parse_rational(spec)]
    return out


def parse_suites(text: Optional[str]) -> Tuple[str, ...]:
    if text is None or text.strip() == "all":
        return SUITES
    names = [s.strip() for s in text.split(",") if s.strip()]
    return tuple(s for s in SUITES if s in names) + tuple(s for s in names if s not in SUITES)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="contactspin", description=__doc__.splitlines()[0])
    src = p.add_argument_group("structure")
    src.add_argument("--input", help="structure definition JSON (overrides --family)")
    src.add_argument("--family", help=f"builtin name: {', '.join(BUILTINS)} (alias m5)")
    for name in "abcd":
        src.add_argument(f"--{name}", default="0", help=f"model parameter {name} (rational)")
    p.add_argument("--suites", default="all", help=f"comma list from {','.join(SUITES)}, or all")
    p.add_argument("--grid", help='parameter sweep, e.g. "a=-2..2,b=-2..2,c=-2..2,d=-2..2"')
    p.add_argument("--output", help="report path (default stdout)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--seed", type=int, default=None, help=f"random seed (fallback ${SEED_ENV}, then 0)")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOL)
    p.add_argument("--jobs", type=int, default=1, help="worker processes for grid sweeps")
    p.add_argument("--scale", default="4", help="exact conformal scale s = e^{2c} for the conformal suite")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env) if env else 0
        except ValueError as exc:
            raise ParseError(f"{SEED_ENV} must be an integer") from exc
    if args.input is None and args.family is None and args.grid is None:
        raise ParseError("give --input, --family or --grid")
    return RunConfig(
        input=args.input,
        family=args.family,
        params=tuple(parse_rational(getattr(args, k)) for k in "abcd"),
        suites=parse_suites(args.suites),
        grid=parse_grid(args.grid) if args.grid else None,
        output=args.output,
        format=args.format,
        seed=seed,
        tolerance=args.tolerance,
        jobs=max(1, args.jobs),
        conformal_scale=parse_rational(args.scale),
    )


def load_definition(config: RunConfig) -> StructureDefinition:
    if config.input is not None:
        try:
            with open(config.input, encoding="utf-8") as fh:
                data = json.load(fh)
            return StructureDefinition.from_json(data)
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"cannot read structure definition {config.input}: {exc}") from exc
    try:
        name = config.family or "m5"
        params = config.params if name in ("m5", "m5family") else None
        return make_builtin(name, params)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


# suites -----------------------------------------------------------------------------

def _guard(name: str, anchor: str, fn) -> List[Check]:
    """Run a suite body; unmet hypotheses become explicit skip entries."""
    try:
        return list(fn())
    except (CriterionInapplicable, AContamination) as exc:
        return [skip(name, anchor, str(exc))]


def suite_classify(sd: StructureDefinition, config: RunConfig) -> List[Check]:
    anchor = "classification of almost contact metric structures"

    def body():
        flags = classify(sd)
        yield Check("classification", anchor, flags.implications_hold(), value=flags.to_json())

    return _guard("classification", anchor, body) if sd.contact else [
        skip("classification", anchor, "no almost contact frame")]


def suite_curvature(sd: StructureDefinition, config: RunConfig) -> List[Check]:
    anchor = "connection and curvature"

    def body():
        lc = levi_civita_forms(sd)
        yield Check("levi_civita_structure_equation", anchor, not first_structure_residuals(sd, lc))
        lc_curv = curvature(sd, lc, require_a_free_curvature=False)
        yield Check("levi_civita_ricci_symmetric", anchor, lc_curv.ricci_symmetric(), value=lc_curv.ricci_matrix())
        tc = torsion_connection(sd)
        yield Check("torsion_structure_equation", anchor, not first_structure_residuals(sd, tc))
        curv = curvature(sd, tc)
        yield Check("torsion_ricci", anchor, True, value={"ricci": curv.ricci_matrix(), "scalar": curv.scalar})
        ok, res = verify_curvature_structure(sd, tc)
        yield Check("curvature_operator_u1", anchor, ok, residual=res or None)
        yield Check("sigma_T", anchor, True, value=sigma_T(torsion_form(sd)))

    return _guard("curvature", anchor, body)


def suite_spinors(sd: StructureDefinition, config: RunConfig) -> List[Check]:
    anchor = "parallel spinors"

    def body():
        tol = config.tolerance
        lifts = parallel_spinors(sd, tol=tol)
        hol = parallel_spinors_by_holonomy(sd, tol=tol)
        yield Check("parallel_spinors", anchor, True, value={b.value: lifts[b].to_json() for b in BUNDLES})
        yield Check("parallel_routes_agree", anchor, routes_agree(lifts, hol))
        both = lifts[Subbundle.TWO].dim > 0 and lifts[Subbundle.PLUS].dim + lifts[Subbundle.MINUS].dim > 0
        flat = curvature(sd, torsion_connection(sd)).is_flat()
        yield Check("flatness_dichotomy", anchor, (not both) or flat, value={"flat": flat})

    return _guard("spinors", anchor, body)


def random_killing_problem(rng: random.Random) -> KillingProblem:
    """Random rational (dPhi, theta, d eta) biased towards the solvable strata."""
    def r():
        return Fraction(rng.randint(-3, 3), rng.choice((1, 1, 2)))

    theta = Form(5, {(i,): r() for i in range(1, 5)})
    a, b, c, d = r(), r(), r(), r()
    kind = rng.random()
    if kind < 0.3:
        d = -a
    elif kind < 0.6:
        b = c = Fraction(0)
        d = a
    deta = Form(5, {(1, 2): a, (1, 3): b, (2, 4): b, (1, 4): c, (2, 3): -c, (3, 4): d})
    pick = rng.random()
    if pick < 0.35:
        two_dphi = -theta
    elif pick < 0.7:
        two_dphi = theta
    else:
        two_dphi = Form(5, {(i,): r() for i in range(1, 5)})
    return KillingProblem.from_data(two_dphi / 2, theta, deta)


def suite_killing(sd: StructureDefinition, config: RunConfig) -> List[Check]:
    anchor = "Killing equation (2 dPhi - T) psi = 0"

    def body():
        problem = KillingProblem.from_structure(sd)
        sol = killing_equation_solve(problem, config.tolerance)
        yield Check("killing_structure", anchor, sol.consistent, value=sol.to_json())
        if sol.condition_2:
            dil = dilation_consequences(problem, not dF(sd))
            yield Check("dilation_constant", "dilation function under a Sigma^2 solution",
                        dil.consistent_with_closure, value=dil.to_json())
        rng = random.Random(config.seed)
        bad = [k for k in range(RANDOM_KILLING_SAMPLES)
               if not killing_equation_solve(random_killing_problem(rng), config.tolerance).consistent]
        yield Check("killing_random_equivalence", anchor, not bad,
                    value={"samples": RANDOM_KILLING_SAMPLES, "seed": config.seed, "failures": bad})

    return _guard("killing", anchor, body)


def suite_conformal(sd: StructureDefinition, config: RunConfig) -> List[Check]:
    return _guard("conformal", "special conformal transformation",
                  lambda: conformal_checks(sd, config.conformal_scale))


def suite_identities(sd: StructureDefinition, config: RunConfig) -> List[Check]:
    return _guard("identities", "torsion and curvature identities", lambda: identity_suite(sd))


def suite_theorems(sd: StructureDefinition, config: RunConfig) -> List[Check]:
    anchor = "model family theorem battery"
    try:
        model_shape(sd)
    except ValueError as exc:
        return [skip("theorems", anchor, f"definition outside the supported families: {exc}")]
    return _guard("theorems", anchor, lambda: theorem_suite(sd, config.tolerance).checks)


SUITE_FUNCS = {
    "classify": suite_classify,
    "curvature": suite_curvature,
    "spinors": suite_spinors,
    "killing": suite_killing,
    "conformal": suite_conformal,
    "identities": suite_identities,
    "theorems": suite_theorems,
}


def evaluate(sd: StructureDefinition, config: RunConfig) -> Tuple[int, Report]:
    """Validate and run the configured suites on one definition."""
    meta = {
        "definition": sd.name,
        "definition_hash": definition_hash(sd.dumps()),
        "parameters": sd.params.to_json() if sd.params else None,
        "suites": list(config.suites),
        "seed": config.seed,
        "tolerance": config.tolerance,
        "tool_version": __version__,
    }
    report = Report(metadata=meta)
    if not config.suites:
        return EXIT_OK, report
    val = validate_structure(sd, check_sharpness=sd.params is not None)
    if not val.ok:
        report.checks.append(Check("integrability", "d^2 = 0 on the coframe", False,
                                   residual=[[mu, r] for mu, r in val.failures]))
        return EXIT_INTEGRABILITY, report
    for name in config.suites:
        if name != "classify" and not sd.contact:
            report.checks.append(skip(name, name, "no almost contact frame"))
            continue
        for c in SUITE_FUNCS[name](sd, config):
            c.name = f"{name}.{c.name}"
            report.checks.append(c)
    return (EXIT_OK if report.passed else EXIT_FAIL), report


def run(config: RunConfig) -> Tuple[int, Report]:
    if config.grid is not None:
        return grid_sweep(config)
    return evaluate(load_definition(config), config)


# grid sweeps ---------------------------------------------------------------------

def grid_points(config: RunConfig) -> List[Tuple[Fraction, ...]]:
    axes = [config.grid.get(k, [config.params[i]]) for i, k in enumerate("abcd")]
    return sorted(itertools.product(*axes))


def _grid_worker(args):
    point, config = args
    sd = make_builtin("m5", point)
    status, report = evaluate(sd, config)
    return point, status, report


def grid_sweep(config: RunConfig) -> Tuple[int, Report]:
    """Run the suites at every grid point of the model family; list failures only."""
    if config.family not in (None, "m5", "m5family") or config.input is not None:
        raise ParseError("grid sweeps apply to the m5 family only")
    points = grid_points(config)
    jobs = [(p, config) for p in points]
    if config.jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_grid_worker, jobs, chunksize=8))
    else:
        results = [_grid_worker(j) for j in jobs]
    results.sort(key=lambda r: r[0])
    agg = Report(metadata={
        "grid": {k: [str(v) for v in vals] for k, vals in sorted(config.grid.items())},
        "points": len(points),
        "suites": list(config.suites),
        "seed": config.seed,
        "tolerance": config.tolerance,
        "tool_version": __version__,
    })
    worst = EXIT_OK
    flat_points = []
    for point, status, report in results:
        label = "m5(" + ",".join(str(v) for v in point) + ")"
        worst = max(worst, status)
        for c in report.failures():
            c.name = f"{label}:{c.name}"
            agg.checks.append(c)
        if ModelParams(*point).degenerate:
            flat_points.append(label)
    agg.metadata["failures"] = len(agg.checks)
    agg.metadata["degenerate_points"] = flat_points
    return worst, agg


# entry point -------------------------------------------------------------------------

def emit(report: Report, config: RunConfig) -> None:
    text = report.dumps() if config.format == "json" else render_text(report.to_json())
    if config.output:
        write_atomic(config.output, text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    try:
        config = config_from_args(args)
        status, report = run(config)
    except ParseError as exc:
        print(f"contactspin: {exc}", file=sys.stderr)
        return EXIT_PARSE
    emit(report, config)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
