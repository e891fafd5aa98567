from __future__ import annotations
import numpy as np

from checks.base import BaseCheck
from config import Settings
from imaginarity import l1_coherence, y_twirl, y_twirl_kraus
from kd_distribution import extended_kd, nonpositivity, reconstruct
from quantum_core import computational_basis, fourier_mub, max_abs_diff, qubit_beta_basis, random_density
from schema import CheckResult


def _states_per_dim(level: str) -> int:
    return 100 if level == "full" else 10


class TwirlLawCheck(BaseCheck):
    """Y-twirl の対角 1/d・非対角 (2/d) i Im ρ と Kraus ルートの一致"""

    def __init__(self) -> None:
        super().__init__(
            name="y-twirl-law",
            description="twirled diagonal is 1/d, off-diagonals are (2/d) i Im rho, Kraus route agrees",
            threshold=1e-12,
        )

    def run(self, settings: Settings, level: str = "fast") -> CheckResult:
        residuals = []
        for d in range(2, 7):
            for s in range(_states_per_dim(level)):
                rho = random_density(d, settings.seed + 1000 * d + s)
                twirled = y_twirl(rho)
                expected = (2.0 / d) * 1j * np.imag(rho.matrix)
                np.fill_diagonal(expected, 1.0 / d)
                residuals.append(max_abs_diff(twirled.matrix, expected))
                residuals.append(max_abs_diff(y_twirl_kraus(rho).matrix, twirled.matrix))
        return self.result(residuals, detail="d = 2..6")


class NonpositivityCheck(BaseCheck):
    def __init__(self) -> None:
        super().__init__(
            name="kd-nonpositivity",
            description="sum |Q*| - 1 equals the l1 coherence for MUB pairs",
            threshold=1e-11,
        )

    def run(self, settings: Settings, level: str = "fast") -> CheckResult:
        residuals = []
        for d in range(2, 7):
            a = computational_basis(d)
            b = fourier_mub(a)
            for s in range(_states_per_dim(level)):
                rho = random_density(d, settings.seed + 2000 * d + s)
                residuals.append(abs(nonpositivity(extended_kd(rho, a, b)) - l1_coherence(rho, a)))
        a = computational_basis(2)
        rho = random_density(2, settings.seed)
        for beta in np.linspace(0, 2 * np.pi, 20):
            tensor = extended_kd(rho, a, qubit_beta_basis(beta))
            residuals.append(abs(nonpositivity(tensor) - l1_coherence(rho, a)))
        return self.result(residuals, detail="Fourier MUB d = 2..6 and 20 beta bases")


class ReconstructionCheck(BaseCheck):
    def __init__(self) -> None:
        super().__init__(
            name="reconstruction",
            description="rho rebuilt from its extended KD tensor matches the input",
            threshold=1e-10,
        )

    def run(self, settings: Settings, level: str = "fast") -> CheckResult:
        residuals = []
        for d in range(2, 6):
            a = computational_basis(d)
            b = fourier_mub(a)
            for s in range(_states_per_dim(level)):
                rho = random_density(d, settings.seed + 3000 * d + s)
                residuals.append(max_abs_diff(reconstruct(extended_kd(rho, a, b)).matrix, rho.matrix))
        return self.result(residuals, detail="d = 2..5")
