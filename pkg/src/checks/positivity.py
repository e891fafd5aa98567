from __future__ import annotations
import numpy as np

from checks.base import BaseCheck
from config import Settings
from kd_distribution import extended_kd
from moment_detector import detect, hankel, hankel_det, moments, vandermonde_hankel
from quantum_core import computational_basis, fourier_mub, random_diagonal_density, random_real_density
from schema import CheckResult


class HankelSoundnessCheck(BaseCheck):
    """正の分布では det H_m >= 0、H_m = V D V^T"""

    def __init__(self) -> None:
        super().__init__(
            name="hankel-soundness",
            description="positive distributions give det H_m >= -1e-13 and a Vandermonde-factored Hankel",
            threshold=1e-12,
        )

    def run(self, settings: Settings, level: str = "fast") -> CheckResult:
        count = 100 if level == "full" else 20
        residuals = []
        worst_det = 0.0
        for s in range(count):
            d = 2 + s % 4
            rho = random_diagonal_density(d, settings.seed + s)
            a = computational_basis(d)
            tensor = extended_kd(rho, a, a)
            ms = moments(tensor, 7, tol_moment=settings.tol_moment, tol=settings.tol)
            nodes = tensor.values.real.ravel()
            for m in (1, 2, 3):
                h = hankel(ms, m)
                worst_det = min(worst_det, hankel_det(h))
                residuals.append(np.max(np.abs(vandermonde_hankel(nodes, m).entries - h.entries)))
        ok = bool(worst_det >= -1e-13 and max(residuals) <= self.threshold)
        return self.result(residuals, detail=f"min det = {worst_det:.3e}", passed=ok)


class NoFalsePositiveCheck(BaseCheck):
    def __init__(self) -> None:
        super().__init__(
            name="no-false-positives",
            description="real states are never reported as carrying imaginarity",
            threshold=0.0,
        )

    def run(self, settings: Settings, level: str = "fast") -> CheckResult:
        count = 500 if level == "full" else 50
        hits = []
        for s in range(count):
            d = 2 + s % 2
            rho = random_real_density(d, settings.seed + s)
            a = computational_basis(d)
            if detect(rho, a, fourier_mub(a), 3, settings).detected:
                hits.append(rho.label)
        detail = ", ".join(hits[:5]) if hits else f"{count} real states, d = 2, 3"
        return self.result([float(len(hits))], detail=detail, passed=not hits)
