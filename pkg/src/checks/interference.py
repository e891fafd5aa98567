from __future__ import annotations
import numpy as np

from checks.base import BaseCheck
from config import Settings
from imaginarity import l1_imaginarity, y_twirl
from interferometer import (
    ANCILLA_ZERO,
    moment_via_visibility,
    mz_final_state,
    mz_final_state_by_conjugation,
    s_n_operator,
    total_visibility_imaginarity,
    unitary_dilation,
    visibility,
)
from kd_distribution import extended_kd, kd
from moment_detector import kd_moments, moments, qubit_example_state
from quantum_core import (
    computational_basis,
    dagger,
    fourier_mub,
    kron_power,
    make_density,
    max_abs_diff,
    qubit_beta_basis,
    random_density,
    random_unitary,
    unitarity_residual,
)
from schema import CheckResult


class DirectVisibilityCheck(BaseCheck):
    """θ=π/2 の生成子干渉計の可視度の和 = M_l1"""

    def __init__(self) -> None:
        super().__init__(
            name="direct-visibility",
            description="total generator visibility at theta = pi/2 equals the l1 imaginarity",
            threshold=1e-11,
        )

    def run(self, settings: Settings, level: str = "fast") -> CheckResult:
        count = 200 if level == "full" else 40
        residuals = []
        for s in range(count):
            d = 2 + s % 4
            rho = random_density(d, settings.seed + 4000 + s)
            total, _ = total_visibility_imaginarity(rho)
            residuals.append(abs(total - l1_imaginarity(rho)))

        y = (0.05, -0.08, 0.1)
        qutrit = make_density(
            [
                [1 / 3, 1j * y[0], 1j * y[1]],
                [-1j * y[0], 1 / 3, 1j * y[2]],
                [-1j * y[1], -1j * y[2], 1 / 3],
            ]
        )
        total, breakdown = total_visibility_imaginarity(qutrit)
        residuals.append(abs(total - 2 * sum(abs(v) for v in y)))
        residuals.extend(abs(b.visibility - 2 * abs(v)) for b, v in zip(breakdown, y))
        return self.result(residuals, detail=f"{count} random states d = 2..5 plus qutrit breakdown")


class MomentRealizationCheck(BaseCheck):
    """S_1 = I、n >= 2 の S_n は Gram 構造を持つ縮小写像。ダイレーションで干渉計に載せる"""

    def __init__(self) -> None:
        super().__init__(
            name="moment-realization",
            description=(
                "S_1 = I, S_n^dagger S_n = A_n G A_n^dagger with rank <= d, the dilation is unitary "
                "and Tr[S_n rho'^n] matches the factorized KD contraction"
            ),
            threshold=1e-11,
        )

    @staticmethod
    def _operator_residuals(a, b, twirled, n: int, settings: Settings) -> tuple[list[float], float]:
        op = s_n_operator(a, b, n, settings.dense_limit)
        s = op.matrix
        if n == 1:
            return [max_abs_diff(s, np.eye(a.dim))], op.unitarity_residual
        a_n = np.column_stack([kron_power(a.vector(i), n) for i in range(a.dim)])
        gram_op = dagger(s) @ s
        spectrum = np.sort(np.linalg.eigvalsh(gram_op))[::-1]
        rho_n = kron_power(twirled.matrix, n)
        u = unitary_dilation(s, settings.tol)
        dilated_trace = np.trace(u @ np.kron(ANCILLA_ZERO, rho_n))
        return [
            max_abs_diff(gram_op, a_n @ op.gram @ dagger(a_n)),
            float(np.max(np.abs(spectrum[a.dim:]), initial=0.0)),
            float(np.max(np.abs(spectrum[: a.dim] - np.sort(np.linalg.eigvalsh(op.gram))[::-1]))),
            unitarity_residual(u),
            abs(dilated_trace - np.trace(s @ rho_n)),
        ], op.unitarity_residual

    def run(self, settings: Settings, level: str = "fast") -> CheckResult:
        n_top = 7 if level == "full" else 4
        residuals = []
        notes = []
        for d in (2, 3):
            a = computational_basis(d)
            b = fourier_mub(a)
            twirled = y_twirl(random_density(d, settings.seed + 5000 + d))
            for n in (1, 2, 3):
                structural, unitarity = self._operator_residuals(a, b, twirled, n, settings)
                residuals.extend(structural)
                if n >= 2:
                    notes.append(f"d={d} n={n}: max |S^dag S - I| = {unitarity:.3e}")
            two_index = kd_moments(kd(twirled, a, b), n_top)
            extended = moments(extended_kd(twirled, a, b), n_top, tol_moment=settings.tol_moment)
            for n in range(1, n_top + 1):
                mv = moment_via_visibility(twirled, a, b, n, settings.dense_limit)
                residuals.append(abs(mv.trace - two_index[n - 1]))
                if mv.dense_trace is not None:
                    residuals.append(abs(mv.trace - mv.dense_trace))
                if n == 1 or (d == 2 and n == 2):
                    residuals.append(abs(mv.trace - extended.r(n)))
                else:
                    notes.append(f"d={d} n={n}: |Tr S_n| - r'_n = {mv.visibility - extended.r(n):+.3e}")
        return self.result(residuals, detail="; ".join(notes[:6]))

class InterferometerConsistencyCheck(BaseCheck):
    def __init__(self) -> None:
        super().__init__(
            name="interferometer-consistency",
            description="closed-form final state equals U_total conjugation; grid visibility equals |Tr(U rho)|",
            threshold=1e-12,
        )

    def run(self, settings: Settings, level: str = "fast") -> CheckResult:
        count = 20 if level == "full" else 5
        state_residuals = []
        visibility_residuals = []
        for d in (2, 3, 4):
            for s in range(count):
                seed = settings.seed + 6000 + 100 * d + s
                rho = random_density(d, seed)
                u = random_unitary(d, seed)
                theta = 2 * np.pi * (s + 0.5) / count
                closed = mz_final_state(rho, u, theta, settings.tol)
                conjugated = mz_final_state_by_conjugation(rho, u, theta, settings.tol)
                state_residuals.append(max_abs_diff(closed.matrix, conjugated.matrix))
                v = visibility(rho, u, method="both", grid_size=settings.grid_size)
                visibility_residuals.append(abs(v.grid - v.analytic))
        ok = bool(max(state_residuals) <= self.threshold and max(visibility_residuals) <= 1e-6)
        return self.result(
            state_residuals + visibility_residuals,
            detail=f"max visibility gap {max(visibility_residuals):.3e}",
            passed=ok,
        )


class SignCaveatCheck(BaseCheck):
    """Tr[S_3 ρ'^3] の符号を記録する (負の点は detail に残す)"""

    def __init__(self) -> None:
        super().__init__(
            name="sign-caveat",
            description="Tr[S_3 rho'^3] of the worked family equals 1/16 - (3/16) sin^2(alpha) cos(2 beta)",
            threshold=1e-12,
        )

    def run(self, settings: Settings, level: str = "fast") -> CheckResult:
        n_alpha, n_beta = (50, 20) if level == "full" else (10, 8)
        a = computational_basis(2)
        residuals = []
        negative = 0
        for alpha in np.linspace(0, 2 * np.pi, n_alpha):
            twirled = y_twirl(qubit_example_state(alpha))
            for beta in np.linspace(0, 2 * np.pi, n_beta):
                mv = moment_via_visibility(twirled, a, qubit_beta_basis(beta), 3, settings.dense_limit)
                expected = 1 / 16 - 3 / 16 * np.sin(alpha) ** 2 * np.cos(2 * beta)
                residuals.append(abs(mv.trace - expected))
                if mv.signed < 0:
                    negative += 1
        detail = f"{negative} of {n_alpha * n_beta} points have a negative trace (modulus differs from signed value)"
        return self.result(residuals, detail=detail)
