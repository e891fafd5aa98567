from __future__ import annotations
import numpy as np

from checks.base import BaseCheck
from config import Settings
from imaginarity import y_twirl
from kd_distribution import extended_kd
from moment_detector import (
    closed_form_dets,
    closed_form_moments,
    detect,
    hankel,
    hankel_det,
    moments,
    qubit_example_state,
)
from quantum_core import computational_basis, qubit_beta_basis
from schema import CheckResult


def _worked_moments(alpha: float, beta: float, settings: Settings):
    rho = y_twirl(qubit_example_state(alpha))
    tensor = extended_kd(rho, computational_basis(2), qubit_beta_basis(beta), tol=settings.tol)
    return moments(tensor, 7, tol_moment=settings.tol_moment, tol=settings.tol)


class ClosedFormMomentCheck(BaseCheck):
    """数値 r_1..r_7 と行列式を閉形式と比較"""

    def __init__(self) -> None:
        super().__init__(
            name="closed-form-moments",
            description="r_1..r_7 and det H_1..H_3 of the worked qubit family match their closed forms",
            threshold=1e-12,
        )

    def run(self, settings: Settings, level: str = "fast") -> CheckResult:
        n_alpha, n_beta = (50, 20) if level == "full" else (10, 8)
        residuals = []
        for alpha in np.linspace(0, 2 * np.pi, n_alpha):
            for beta in np.linspace(0, 2 * np.pi, n_beta):
                ms = _worked_moments(alpha, beta, settings)
                residuals.append(np.max(np.abs(ms.values - closed_form_moments(alpha, beta))))
                dets = [hankel_det(hankel(ms, m)) for m in (1, 2, 3)]
                residuals.append(np.max(np.abs(np.array(dets) - np.array(closed_form_dets(alpha, beta)))))
        return self.result(residuals, detail=f"{n_alpha}x{n_beta} (alpha, beta) grid")


class DeterminantValueCheck(BaseCheck):
    def __init__(self) -> None:
        super().__init__(
            name="determinant-values",
            description="det H_1(pi/2, pi/2) = -3/16, det H_2(pi/2, 0) = -1/1024, det H_3(pi/2, pi/4) = -3/2^24",
            threshold=1e-14,
        )

    def run(self, settings: Settings, level: str = "fast") -> CheckResult:
        cases = [
            (1, np.pi / 2, np.pi / 2, -3 / 16),
            (2, np.pi / 2, 0.0, -1 / 1024),
            (3, np.pi / 2, np.pi / 4, -3 / 2**24),
        ]
        residuals = []
        for m, alpha, beta, expected in cases:
            ms = _worked_moments(alpha, beta, settings)
            residuals.append(abs(hankel_det(hankel(ms, m)) - expected))
        return self.result(residuals)


class DetectionOrderCheck(BaseCheck):
    """α 掃引での最小検出次数と行列式の符号領域"""

    def __init__(self) -> None:
        super().__init__(
            name="detection-order",
            description="minimal order 1 / 2 / 2 for beta = pi/2 / 0 / pi/4, 0 where sin(alpha) = 0",
            threshold=0.0,
        )

    def run(self, settings: Settings, level: str = "fast") -> CheckResult:
        count = 201 if level == "full" else 41
        a_basis = computational_basis(2)
        failures = []
        for beta, expected in ((np.pi / 2, 1), (0.0, 2), (np.pi / 4, 2)):
            b_basis = qubit_beta_basis(beta)
            for alpha in np.linspace(0, 2 * np.pi, count):
                report = detect(qubit_example_state(alpha), a_basis, b_basis, 3, settings)
                order = report.minimal_order or 0
                s = abs(np.sin(alpha))
                if s <= 1e-6:
                    ok = order == 0
                elif beta == np.pi / 4 and s < 0.1:
                    # det H_2 = -sin^8(alpha)/2^12 drops below tol_det here
                    ok = order in (0, 2)
                else:
                    ok = order == expected
                dets = [d.value for d in report.determinants]
                if beta == 0.0 and dets[0] < -settings.tol_det:
                    ok = False
                if beta in (0.0, np.pi / 2) and abs(dets[2]) > settings.tol_det:
                    ok = False
                if not ok:
                    failures.append(f"beta={beta:.4f} alpha={alpha:.4f} order={order}")
        detail = "; ".join(failures[:5]) if failures else f"{3 * count} sweep points"
        return self.result([float(len(failures))], detail=detail, passed=not failures)
