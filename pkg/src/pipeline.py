from __future__ import annotations
from pathlib import Path
import logging
import sys
import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from checks import all_checks
from config import Settings
from errors import DimensionMismatch, InputFormatError, NotUnitary
from imaginarity import AntisymmetricGenerator, antisymmetric_generators, l1_imaginarity, y_twirl
from interferometer import ANCILLA_ZERO, generator_unitary, interference_curve, s_n_operator, unitary_dilation
from io_utils import fmt, load_density_json, load_matrix_json, save_model, sha256_file, write_csv, write_run_log
from md_renderer import render_verify_report
from moment_detector import detect, qubit_example_state
from quantum_core import (
    DensityMatrix,
    OrthonormalBasis,
    computational_basis,
    fourier_mub,
    is_unitary,
    kron_power,
    qubit_beta_basis,
)
from schema import (
    CheckResult,
    DetectionReport,
    InterferenceSummary,
    SweepConfig,
    SweepRow,
    VerifyReport,
    VisibilitySummary,
)

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["alpha", "beta", "det_h1", "det_h2", "det_h3", "minimal_order", "m_l1"]


@dataclass
class UnitarySpec:
    label: str
    unitary: np.ndarray
    state: np.ndarray
    copies: Optional[int] = None
    operator_residual: Optional[float] = None


def _float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError as e:
        raise InputFormatError(f"{what}: '{text}' is not a number (radians)") from e


def parse_basis_spec(spec: str, d: int) -> OrthonormalBasis:
    """'fourier' か 'beta:RAD' (d=2 のみ)"""
    if spec == "fourier":
        return fourier_mub(computational_basis(d))
    if spec.startswith("beta:"):
        if d != 2:
            raise DimensionMismatch(f"DimensionMismatch: basis spec '{spec}' needs d = 2, state has d = {d}")
        return qubit_beta_basis(_float(spec[len("beta:"):], "beta"))
    raise InputFormatError(f"unknown basis spec '{spec}' (expected 'fourier' or 'beta:RAD')")


def parse_alpha_grid(spec: str) -> Tuple[float, float, int]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise InputFormatError(f"alpha grid '{spec}' must be START:STOP:COUNT")
    try:
        count = int(parts[2])
    except ValueError as e:
        raise InputFormatError(f"alpha grid count '{parts[2]}' is not an integer") from e
    return _float(parts[0], "alpha start"), _float(parts[1], "alpha stop"), count


def parse_beta_list(spec: str) -> List[float]:
    return [_float(x, "beta") for x in spec.split(",") if x.strip()]


def _generator(spec: str, d: int) -> Tuple[AntisymmetricGenerator, float]:
    # generator:p,q:theta
    try:
        _, pq, theta = spec.split(":")
        p, q = (int(x) for x in pq.split(","))
    except ValueError as e:
        raise InputFormatError(f"unitary spec '{spec}' must be generator:p,q:theta") from e
    for g in antisymmetric_generators(d):
        if g.index == (min(p, q), max(p, q)) and p != q:
            return g, _float(theta, "generator theta")
    raise InputFormatError(f"generator indices ({p}, {q}) out of range for d = {d}")


def parse_unitary_spec(spec: str, rho: DensityMatrix, basis_spec: str, settings: Settings) -> UnitarySpec:
    d = rho.dim
    if spec.startswith("generator:"):
        g, theta = _generator(spec, d)
        return UnitarySpec(label=spec, unitary=generator_unitary(g, theta), state=rho.matrix)
    if spec.startswith("s_n:"):
        try:
            n = int(spec[len("s_n:"):])
        except ValueError as e:
            raise InputFormatError(f"unitary spec '{spec}' must be s_n:n") from e
        if n < 1:
            raise InputFormatError(f"s_n needs n >= 1, got {n}")
        basis_a = computational_basis(d)
        op = s_n_operator(basis_a, parse_basis_spec(basis_spec, d), n, settings.dense_limit)
        twirled = y_twirl(rho)
        # S_n is a contraction for n >= 2; the ancilla path |0> selects its top-left block
        return UnitarySpec(
            label=spec,
            unitary=unitary_dilation(op.matrix, settings.tol),
            state=np.kron(ANCILLA_ZERO, kron_power(twirled.matrix, n)),
            copies=n,
            operator_residual=op.unitarity_residual,
        )

    u = load_matrix_json(Path(spec))
    if u.shape != (d, d):
        raise DimensionMismatch(f"DimensionMismatch: unitary file is {u.shape[0]}x{u.shape[1]}, state has d = {d}")
    ok, residual = is_unitary(u, settings.tol)
    if not ok:
        raise NotUnitary(f"NotUnitary: {spec}: max |U^dagger U - I| = {residual:.3e} > {settings.tol:.1e}")
    return UnitarySpec(label=Path(spec).name, unitary=u, state=rho.matrix)


def run_detect(
    state_path: Path,
    basis_spec: str,
    m_max: int,
    settings: Settings,
    out: Optional[Path] = None,
) -> DetectionReport:
    rho = load_density_json(state_path)
    basis_a = computational_basis(rho.dim)
    report = detect(rho, basis_a, parse_basis_spec(basis_spec, rho.dim), m_max, settings)
    if out is not None:
        save_model(report, out)
        write_run_log(
            out,
            command="detect",
            input=state_path.as_posix(),
            input_hash=sha256_file(state_path),
            basis=basis_spec,
            settings=settings.model_dump(),
        )
    return report


def sweep_row(alpha: float, beta: float, basis_b: OrthonormalBasis, m_max: int, settings: Settings) -> SweepRow:
    rho = qubit_example_state(alpha)
    report = detect(rho, computational_basis(2), basis_b, max(m_max, 3), settings)
    dets = [r.value for r in report.determinants]
    order = report.minimal_order if report.minimal_order is not None and report.minimal_order <= m_max else 0
    return SweepRow(
        alpha=alpha,
        beta=beta,
        det_h1=dets[0],
        det_h2=dets[1],
        det_h3=dets[2],
        minimal_order=order,
        m_l1=l1_imaginarity(rho),
    )


def run_sweep(config: SweepConfig, settings: Settings) -> List[SweepRow]:
    alphas = np.linspace(config.alpha_start, config.alpha_stop, config.alpha_count)
    rows: List[SweepRow] = []
    for beta in config.beta_values:
        basis_b = qubit_beta_basis(beta)
        print(f"Sweeping beta={beta:.6g} ({config.alpha_count} points)...", file=sys.stderr)
        rows.extend(sweep_row(float(a), beta, basis_b, config.m_max, settings) for a in alphas)

    out = Path(config.out)
    write_csv(out, SWEEP_COLUMNS, ([getattr(r, c) for c in SWEEP_COLUMNS] for r in rows))
    write_run_log(out, command="sweep", config=config.model_dump(), rows=len(rows), settings=settings.model_dump())
    return rows


def run_interfere(
    state_path: Path,
    unitary_spec: str,
    grid_size: int,
    out: Path,
    settings: Settings,
    basis_spec: str = "fourier",
) -> InterferenceSummary:
    rho = load_density_json(state_path)
    spec = parse_unitary_spec(unitary_spec, rho, basis_spec, settings)
    run = interference_curve(spec.state, spec.unitary, grid_size)
    v = run.visibility
    summary = InterferenceSummary(
        unitary=spec.label,
        internal_dim=run.internal_dim,
        trace_re=run.trace.real,
        trace_im=run.trace.imag,
        summary=VisibilitySummary(
            visibility=v.value,
            chi=v.phase_at_max,
            analytic_visibility=v.analytic,
            method="both",
            grid_size=grid_size,
            fit_residual=v.fit_residual,
            intensity_max=v.intensity_max,
            intensity_min=v.intensity_min,
        ),
        signed_moment=run.trace.real if spec.copies else None,
        copies=spec.copies,
        operator_unitarity_residual=spec.operator_residual,
        dilated=spec.copies is not None,
    )
    write_csv(
        out,
        ["theta", "intensity"],
        zip(run.phase_grid.tolist(), run.intensities.tolist()),
        comment=f"abs_trace={fmt(abs(run.trace))} chi={fmt(v.phase_at_max)}",
    )
    save_model(summary, out.with_name(out.name + ".summary.json"))
    write_run_log(
        out,
        command="interfere",
        input=state_path.as_posix(),
        input_hash=sha256_file(state_path),
        unitary=unitary_spec,
        grid=grid_size,
        settings=settings.model_dump(),
    )
    return summary


def run_verify(
    level: str,
    settings: Settings,
    report_path: Optional[Path] = None,
    template_dir: Optional[Path] = None,
) -> VerifyReport:
    results: List[CheckResult] = []
    for i, check in enumerate(all_checks(), 1):
        print(f"Checking {i} ({check.name})...", file=sys.stderr)
        start = time.perf_counter()
        try:
            result = check.run(settings, level)
        except Exception as exc:  # noqa: BLE001
            print(f"Check {i} raised an error: {exc}", file=sys.stderr)
            result = CheckResult(
                name=check.name,
                description=check.description,
                passed=False,
                threshold=check.threshold,
                detail=f"{type(exc).__name__}: {exc}",
            )
        result = result.model_copy(update={"seconds": time.perf_counter() - start})
        logger.info("%s: passed=%s residual=%.3e", result.name, result.passed, result.max_residual)
        results.append(result)

    report = VerifyReport(
        level=level,
        passed=all(r.passed for r in results),
        checks=results,
        settings=settings.model_dump(),
    )
    if report_path is not None:
        tpl = template_dir or Path(__file__).parent.parent / "templates"
        render_verify_report(report, tpl, report_path)
        write_run_log(report_path, command="verify", level=level, passed=report.passed)
    return report
