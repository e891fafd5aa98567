from __future__ import annotations
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from config import DEFAULT_SETTINGS
from errors import DimensionMismatch, DimensionTooSmall
from quantum_core import ComplexMatrix, DensityMatrix, OrthonormalBasis, dagger, make_density

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AntisymmetricGenerator:
    """Y_pq = i(|p><q| - |q><p|), p < q"""

    dim: int
    p: int
    q: int
    matrix: ComplexMatrix

    @property
    def index(self) -> Tuple[int, int]:
        return self.p, self.q

    @property
    def projector(self) -> ComplexMatrix:
        """{|p>, |q>} への射影 P_pq (= Y_pq^2)"""
        proj = np.zeros((self.dim, self.dim), dtype=complex)
        proj[self.p, self.p] = 1.0
        proj[self.q, self.q] = 1.0
        return proj


@dataclass(frozen=True, eq=False)
class ImaginaritySplit:
    real_part: ComplexMatrix
    imag_part: ComplexMatrix


def _generator(d: int, p: int, q: int) -> AntisymmetricGenerator:
    m = np.zeros((d, d), dtype=complex)
    m[p, q] = 1j
    m[q, p] = -1j
    m.flags.writeable = False
    return AntisymmetricGenerator(dim=d, p=p, q=q, matrix=m)


@lru_cache(maxsize=32)
def _generators(d: int) -> Tuple[AntisymmetricGenerator, ...]:
    return tuple(_generator(d, p, q) for p in range(d) for q in range(p + 1, d))


def antisymmetric_generators(d: int) -> List[AntisymmetricGenerator]:
    """d(d-1)/2 個の生成子を (p, q) の辞書順で返す"""
    if d < 2:
        raise DimensionTooSmall(f"DimensionTooSmall: d={d}, need d >= 2")
    return list(_generators(d))


def split(rho: DensityMatrix) -> ImaginaritySplit:
    m = rho.matrix
    return ImaginaritySplit(real_part=(m + m.T) / 2, imag_part=(m - m.T) / 2)


def y_twirl(rho: DensityMatrix) -> DensityMatrix:
    """Y-twirl: 対角を 1/d に、非対角を (2/d) i Im(ρ_mn) に写す"""
    d = rho.dim
    out = (2.0 / d) * 1j * np.imag(rho.matrix)
    np.fill_diagonal(out, 1.0 / d)
    return make_density(out, label=f"y_twirl({rho.label})" if rho.label else "y_twirl")


def y_twirl_kraus_operators(d: int) -> List[ComplexMatrix]:
    scale = 1.0 / np.sqrt(d)
    return [np.eye(d, dtype=complex) * scale] + [g.matrix * scale for g in antisymmetric_generators(d)]


def y_twirl_kraus(rho: DensityMatrix) -> DensityMatrix:
    """Kraus 和 (1/d)(ρ + Σ Y ρ Y) による Y-twirl。閉形式の検算用"""
    m = rho.matrix
    out = sum(k @ m @ dagger(k) for k in y_twirl_kraus_operators(rho.dim))
    return make_density(out, label="y_twirl_kraus")


def l1_imaginarity(rho: DensityMatrix) -> float:
    """M_l1 = Σ_{i≠j} |Im ρ_ij|"""
    im = np.abs(np.imag(rho.matrix))
    return float(np.sum(im) - np.sum(np.diag(im)))


def l1_coherence(rho: DensityMatrix, basis: OrthonormalBasis) -> float:
    if rho.dim != basis.dim:
        raise DimensionMismatch(f"DimensionMismatch: state dim {rho.dim}, basis dim {basis.dim}")
    elements = np.abs(dagger(basis.vectors) @ rho.matrix @ basis.vectors)
    return float(np.sum(elements) - np.sum(np.diag(elements)))


def is_real_state(rho: DensityMatrix, tol: float = DEFAULT_SETTINGS.tol) -> bool:
    return float(np.max(np.abs(np.imag(rho.matrix)))) <= tol


def imaginary_coefficients(rho: DensityMatrix) -> List[float]:
    """生成子展開の係数 b_pq = Tr(Y_pq ρ)/2 (辞書順)。M_l1 = 2 Σ |b_pq|"""
    m = rho.matrix
    return [float(np.real(np.trace(g.matrix @ m)) / 2) for g in antisymmetric_generators(rho.dim)]


def qubit_example_l1_imaginarity(theta: float, alpha: float) -> float:
    return float(abs(np.sin(alpha) * np.sin(theta)))
