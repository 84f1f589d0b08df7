# -*- coding: utf-8 -*-
import argparse
import json
import sys
import time
from enum import IntEnum
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

env_path = Path(__file__).parent.parent / '.env'
if env_path.exists():
    load_dotenv(env_path)

import pandas as pd

from linac import (
    ActionSpec,
    AveragingLinearizer,
    ConjugacySampling,
    DegreeTooHighForGrid,
    DegenerateLinearizer,
    FitGridConfig,
    InputError,
    IntegrationFailure,
    IntegratorConfig,
    NilpotentPartDetected,
    NotAPeriodicFlow,
    NotDicritical,
    OrbitNeverEntersDomain,
    QuadratureConfig,
    ReportFile,
    WeightsUnreliable,
    bochner_symbolic,
    classify_fixed_point,
    conjugacy_samples,
    dump_document,
    extract_weights,
    injectivity_radius,
    linear_part,
    linearizer_to_document,
    load_action_spec,
    load_linearizer,
    load_points,
    normalization_report,
    orbit_samples,
    saturate_extend,
    validate_action,
    verify_conjugacy,
)
from linac.report import provenance
from linac_logger import linac_logger
from tools.general_utils import RunRecorder, format_complex


class ExitCode(IntEnum):
    OK = 0
    INPUT_ERROR = 1
    CHECK_FAILED = 2
    WEIGHTS_ERROR = 3
    DEGREE_TOO_HIGH = 4
    NUMERICS_FAILURE = 5


_EXIT_FOR = (
    (DegreeTooHighForGrid, ExitCode.DEGREE_TOO_HIGH),
    ((NotAPeriodicFlow, NilpotentPartDetected, WeightsUnreliable), ExitCode.WEIGHTS_ERROR),
    ((IntegrationFailure, DegenerateLinearizer, NotDicritical, OrbitNeverEntersDomain), ExitCode.NUMERICS_FAILURE),
    (ValueError, ExitCode.INPUT_ERROR),
)


def exit_code_for(exc: Exception) -> Optional[ExitCode]:
    for kinds, code in _EXIT_FOR:
        if isinstance(exc, kinds):
            return code
    return None


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code instead of argparse's 2."""

    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _complex_arg(text: str) -> complex:
    try:
        parts = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"expected 're,im', got {text!r}")
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise InputError(f"expected 're,im', got {text!r}")
    return complex(parts[0], parts[1])


def _emit(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


def _write_text(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def _finish(args, report: ReportFile, lines: list[str]) -> None:
    if getattr(args, "report", None):
        _write_text(args.report, report.to_json())
    if getattr(args, "json", False):
        _emit(report.to_json())
    else:
        _emit("\n".join(lines) + "\n")


class _Stage:
    def __init__(self, recorder: RunRecorder, name: str):
        self.recorder, self.name = recorder, name

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.recorder.record_stage(self.name, time.perf_counter() - self.start)
        return False


def _integrator(args) -> IntegratorConfig:
    return IntegratorConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol)


def _validated(args, recorder: RunRecorder, spec: ActionSpec):
    with _Stage(recorder, "validate"):
        return validate_action(spec, integrator=_integrator(args))


###############################
# Commands
###############################
def cmd_check(args, recorder: RunRecorder) -> ExitCode:
    spec = load_action_spec(args.path)
    validation = _validated(args, recorder, spec)
    recorder.record_residual(max(validation.residuals.values()))
    report = ReportFile(command="check", source=args.path, kind=spec.kind.value,
                        provenance=provenance(integrator=_integrator(args)), validation=validation.to_dict())
    verdict = "PASS" if validation.passed else "FAIL"
    lines = [f"{verdict} {spec.kind.value} ({validation.sample_count} samples, tolerance {validation.tolerance:.0e})"]
    lines += [f"  {name}: {value:.3e}" for name, value in validation.residuals.items()]
    _finish(args, report, lines)
    return ExitCode.OK if validation.passed else ExitCode.CHECK_FAILED


def cmd_classify(args, recorder: RunRecorder) -> ExitCode:
    spec = load_action_spec(args.path)
    with _Stage(recorder, "weights"):
        weights = extract_weights(linear_part(spec))
    validation = _validated(args, recorder, spec)
    fp_class = classify_fixed_point(weights)
    report = ReportFile(command="classify", source=args.path, kind=spec.kind.value,
                        provenance=provenance(integrator=_integrator(args)), validation=validation.to_dict(),
                        weights=weights.to_dict(), classification=fp_class.to_dict())
    lines = [f"lambda = {list(weights.weights)}", f"fixed point: {fp_class}",
             f"weight residual: {weights.residual:.3e}"]
    if not validation.passed:
        lines.append("action check FAILED")
    _finish(args, report, lines)
    return ExitCode.OK if validation.passed else ExitCode.CHECK_FAILED


def cmd_linearize(args, recorder: RunRecorder) -> ExitCode:
    spec = load_action_spec(args.path)
    validation = _validated(args, recorder, spec)
    if not validation.passed:
        linac_logger.warning(f"{args.path} is not a C*-action, nothing to linearize")
        _finish(args, ReportFile(command="linearize", source=args.path, kind=spec.kind.value,
                                 validation=validation.to_dict()), ["action check FAILED"])
        return ExitCode.CHECK_FAILED
    with _Stage(recorder, "weights"):
        weights = extract_weights(linear_part(spec))

    backend = args.backend
    if backend == "auto":
        backend = "symbolic" if spec.is_closed_form else "numeric"
    quadrature = QuadratureConfig(nodes=args.nodes)
    integrator = _integrator(args)
    grid = FitGridConfig()
    with _Stage(recorder, "average"):
        if backend == "symbolic":
            if not spec.is_closed_form:
                raise InputError("the symbolic backend needs a closed-form action, use --backend numeric")
            linearizer = bochner_symbolic(spec.action, weights, spec.fixed_point)
        else:
            averaging = AveragingLinearizer(spec, weights, quadrature, integrator)
            linearizer = averaging.to_polynomial(args.max_deg, grid)

    sampling = ConjugacySampling(count=args.samples)
    with _Stage(recorder, "certify"):
        norm = normalization_report(linearizer)
        zs, xs = conjugacy_samples(spec, sampling)
        conjugacy = verify_conjugacy(linearizer, spec, zs, xs, integrator)
    recorder.record_residual(conjugacy.max_residual)

    document = linearizer_to_document(linearizer, description=f"linearizer of {Path(args.path).name}")
    if args.out:
        _write_text(args.out, dump_document(document))
    report = ReportFile(
        command="linearize", source=args.path, kind=spec.kind.value,
        provenance=provenance(backend=backend, quadrature=quadrature if backend == "numeric" else None,
                              integrator=integrator, fit_grid=grid if backend == "numeric" else None,
                              conjugacy_sampling=sampling, max_deg=args.max_deg if backend == "numeric" else None),
        validation=validation.to_dict(), weights=weights.to_dict(),
        classification=classify_fixed_point(weights).to_dict(),
        linearizer=document.model_dump(exclude_none=True), normalization=norm.to_dict(),
        fit=linearizer.fit.to_dict() if linearizer.fit else None, conjugacy=conjugacy.to_dict())

    if not args.out and not args.json:
        _emit(dump_document(document))
        if args.report:
            _write_text(args.report, report.to_json())
    else:
        lines = [f"F written to {args.out}" if args.out else "F embedded in the report",
                 f"|F(p)| = {norm.value_at_fixed_point:.3e}, |DF(p) - Id| = {norm.jacobian_defect:.3e}",
                 f"conjugacy max residual {conjugacy.max_residual:.3e} over {conjugacy.sample_count} samples"]
        if linearizer.fit:
            lines.append(f"fit residual {linearizer.fit.residual:.3e}")
        _finish(args, report, lines)
    return ExitCode.OK


def cmd_verify(args, recorder: RunRecorder) -> ExitCode:
    spec = load_action_spec(args.path)
    linearizer = load_linearizer(args.linearizer)
    if linearizer.dimension != spec.dimension:
        raise InputError(f"linearizer on C^{linearizer.dimension} for an action on C^{spec.dimension}")
    sampling = ConjugacySampling(count=args.samples)
    integrator = _integrator(args)
    with _Stage(recorder, "certify"):
        zs, xs = conjugacy_samples(spec, sampling)
        conjugacy = verify_conjugacy(linearizer, spec, zs, xs, integrator)
        norm = normalization_report(linearizer)
    recorder.record_residual(conjugacy.max_residual)
    passed = conjugacy.max_residual <= args.tol
    report = ReportFile(command="verify", source=args.path, kind=spec.kind.value,
                        provenance=provenance(integrator=integrator, conjugacy_sampling=sampling, tolerance=args.tol,
                                              linearizer=args.linearizer),
                        normalization=norm.to_dict(), conjugacy=conjugacy.to_dict())
    z, x = conjugacy.worst_sample
    lines = [f"{'PASS' if passed else 'FAIL'} conjugacy max residual {conjugacy.max_residual:.3e} "
             f"(tolerance {args.tol:.0e}, {conjugacy.sample_count} samples)",
             f"  worst sample z = {format_complex(z)}, x = {[format_complex(v) for v in x]}"]
    _finish(args, report, lines)
    return ExitCode.OK if passed else ExitCode.CHECK_FAILED


def cmd_extend(args, recorder: RunRecorder) -> ExitCode:
    spec = load_action_spec(args.path)
    linearizer = load_linearizer(args.linearizer)
    points = load_points(args.points, spec.dimension)
    integrator = _integrator(args)
    with _Stage(recorder, "weights"):
        weights = extract_weights(linear_part(spec))
    fp_class = classify_fixed_point(weights)
    if not fp_class.is_dicritical:
        raise NotDicritical(f"{args.path}: fixed point is {fp_class}; extension along orbits needs a dicritical point")
    if sorted(weights.weights) != sorted(linearizer.weights.weights):
        raise InputError(f"{args.linearizer} carries weights {list(linearizer.weights.weights)}, "
                         f"the action has {list(weights.weights)}")
    with _Stage(recorder, "domain"):
        domain = injectivity_radius(linearizer)
    records = []
    with _Stage(recorder, "extend"):
        for y in points:
            try:
                result = saturate_extend(spec, linearizer, domain, y, integrator=integrator)
            except (OrbitNeverEntersDomain, IntegrationFailure) as e:
                recorder.rejected += 1
                if isinstance(e, IntegrationFailure):
                    recorder.integration_failures += 1
                linac_logger.warning(f"skipping {[format_complex(v) for v in y]}: {e}")
                continue
            recorder.extended += 1
            recorder.record_residual(result.residual)
            records.append(result.to_dict())
    report = ReportFile(command="extend", source=args.path, kind=spec.kind.value,
                        provenance=provenance(integrator=integrator, linearizer=args.linearizer, points=args.points),
                        weights=linearizer.weights.to_dict(), domain=domain.to_dict(), extension=records)
    if args.json:
        _emit(report.to_json())
    else:
        _emit(json.dumps(records, indent=2) + "\n")
    if args.report:
        _write_text(args.report, report.to_json())
    return ExitCode.OK if not recorder.rejected else ExitCode.NUMERICS_FAILURE


def cmd_orbit(args, recorder: RunRecorder) -> ExitCode:
    spec = load_action_spec(args.path)
    if len(args.x0) != spec.dimension:
        raise InputError(f"--x0 needs {spec.dimension} values, got {len(args.x0)}")
    integrator = _integrator(args)
    with _Stage(recorder, "orbit"):
        ts, zs, states = orbit_samples(lambda x, z: spec.flow_along(x, z, integrator), args.x0, args.path_points,
                                       args.per_leg)
    recorder.samples_evaluated += len(ts)
    frame = pd.DataFrame({"t": ts})
    for j in range(spec.dimension):
        frame[f"re(x{j + 1})"] = states[:, j].real
        frame[f"im(x{j + 1})"] = states[:, j].imag
    csv = frame.to_csv(index=False, lineterminator="\n")
    if args.out:
        _write_text(args.out, csv)
    else:
        _emit(csv)
    return ExitCode.OK


###############################
# Entry point
###############################
def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cstar-linac", description="Linearize C*-actions on C^n by averaging over the circle.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("path", help="action spec JSON file")
        p.add_argument("--rel-tol", type=float, default=IntegratorConfig().rel_tol)
        p.add_argument("--abs-tol", type=float, default=IntegratorConfig().abs_tol)
        return p

    def reporting(p: argparse.ArgumentParser) -> None:
        p.add_argument("--json", action="store_true", help="print the machine-readable report")
        p.add_argument("--report", help="also write the report to this file")

    reporting(command("check", cmd_check, "validate the action axioms"))
    reporting(command("classify", cmd_classify, "weights and fixed point type"))

    p = command("linearize", cmd_linearize, "build and certify the linearizer F")
    p.add_argument("--backend", choices=["auto", "symbolic", "numeric"], default="auto")
    p.add_argument("--max-deg", type=int, default=3, help="degree of the fitted polynomial (numeric backend)")
    p.add_argument("--nodes", type=int, default=QuadratureConfig().nodes, help="starting trapezoid node count")
    p.add_argument("--samples", type=int, default=ConjugacySampling().count)
    p.add_argument("--out", help="write F as a polymap file")
    reporting(p)

    p = command("verify", cmd_verify, "certify psi^z o F = F o phi^z for a given F")
    p.add_argument("--linearizer", required=True, help="polymap file")
    p.add_argument("--samples", type=int, default=ConjugacySampling().count)
    p.add_argument("--tol", type=float, default=1e-9)
    reporting(p)

    p = command("extend", cmd_extend, "extend F along orbits to a list of points")
    p.add_argument("--linearizer", required=True, help="polymap file")
    p.add_argument("--points", required=True, help='JSON file {"points": [[[re, im], ...], ...]}')
    reporting(p)

    p = command("orbit", cmd_orbit, "sample phi^z(x0) along a piecewise-linear path of complex times")
    p.add_argument("--x0", type=_complex_arg, nargs="+", required=True, help="initial point, one 're,im' per coordinate")
    p.add_argument("--through", dest="path_points", type=_complex_arg, nargs="+", required=True,
                   help="waypoints 're,im' of the path, which starts at z = 0")
    p.add_argument("--per-leg", type=int, default=16)
    p.add_argument("--out", help="CSV file, stdout when omitted")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    recorder = RunRecorder()
    try:
        args = build_parser().parse_args(argv)
        recorder.command, recorder.spec_path = args.command, args.path
        code = args.func(args, recorder)
    except Exception as e:
        code = exit_code_for(e)
        if code is None:
            linac_logger.error(f"unexpected failure: {e}")
            raise
        if code is ExitCode.NUMERICS_FAILURE:
            linac_logger.error(f"{type(e).__name__}: {e}")
        else:
            linac_logger.warning(f"{type(e).__name__}: {e}")
        if isinstance(e, DegreeTooHighForGrid):
            linac_logger.info("try a smaller --max-deg; the fit grid has max_deg + 2 circle nodes per axis")
        return int(code)
    linac_logger.info(recorder.summary())
    return int(code)


if __name__ == "__main__":
    sys.exit(main())
