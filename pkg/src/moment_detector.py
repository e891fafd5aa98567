from __future__ import annotations
import logging
import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from config import DEFAULT_SETTINGS, Settings
from errors import ImkitError, InsufficientMoments, NonRealMoment, NotMUB
from imaginarity import l1_imaginarity, y_twirl
from kd_distribution import ExtendedKDTensor, KDTensor, extended_kd
from quantum_core import DensityMatrix, OrthonormalBasis, pure_density, qubit_pure_state, validate_mub
from schema import (
    VERDICT_DETECTED,
    VERDICT_INCONCLUSIVE,
    DetectionReport,
    DeterminantRecord,
    MomentRecord,
    MultiBasisReport,
    verdict_not_detected,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MomentSequence:
    """実数化したモーメント r_1..r_N と捨てた虚部の最大値"""

    values: np.ndarray
    max_imag_residual: float
    source: str = ""
    imag_residuals: Optional[np.ndarray] = None   # |Im r_n| per n

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def r(self, n: int) -> float:
        """1 始まりの r_n"""
        return float(self.values[n - 1])

    def imag_residual(self, n: int) -> float:
        if self.imag_residuals is None:
            return 0.0
        return float(self.imag_residuals[n - 1])


@dataclass(frozen=True, eq=False)
class HankelMatrix:
    order: int
    entries: np.ndarray


def _tensor_values(tensor: Union[ExtendedKDTensor, np.ndarray]) -> np.ndarray:
    values = tensor.values if isinstance(tensor, ExtendedKDTensor) else np.asarray(tensor)
    return np.asarray(values, dtype=complex).ravel()


def _power_sums(flat: np.ndarray, n_max: int) -> np.ndarray:
    return np.array([np.sum(flat**n) for n in range(1, n_max + 1)], dtype=complex)


def moments(
    tensor: Union[ExtendedKDTensor, np.ndarray],
    n_max: int,
    tol_moment: float = DEFAULT_SETTINGS.tol_moment,
    tol: float = DEFAULT_SETTINGS.tol,
) -> MomentSequence:
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    raw = _power_sums(_tensor_values(tensor), n_max)
    imag = np.abs(raw.imag)
    worst = int(np.argmax(imag))
    if imag[worst] > tol_moment:
        raise NonRealMoment(worst + 1, float(imag[worst]), tol_moment)
    values = raw.real.copy()
    if abs(values[0] - 1.0) > tol:
        raise ImkitError(f"r_1 = {values[0]:.12g} differs from 1 by more than {tol:.1e}")
    values.flags.writeable = False
    source = tensor.source if isinstance(tensor, ExtendedKDTensor) else "array"
    logger.debug("moments: n_max=%d max_imag=%.2e", n_max, float(imag.max()))
    imag.flags.writeable = False
    return MomentSequence(values=values, max_imag_residual=float(imag.max()), source=source, imag_residuals=imag)


def kd_moments(tensor: KDTensor, n_max: int) -> np.ndarray:
    """2 添字 KD 分布のモーメント Σ_ik Q_ik^n (一般に複素数)"""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    return _power_sums(np.asarray(tensor.values, dtype=complex).ravel(), n_max)


def hankel(ms: MomentSequence, m: int) -> HankelMatrix:
    """[H_m]_pq = r_{p+q+1}"""
    if m < 0:
        raise ValueError(f"Hankel order must be >= 0, got {m}")
    needed = 2 * m + 1
    if len(ms) < needed:
        raise InsufficientMoments(
            f"InsufficientMoments: H_{m} needs r_1..r_{needed}, have {len(ms)}"
        )
    idx = np.arange(m + 1)
    entries = ms.values[idx[:, None] + idx[None, :]]
    return HankelMatrix(order=m, entries=np.array(entries, dtype=float))


def hankel_det(h: HankelMatrix) -> float:
    e = h.entries
    if h.order == 0:
        return float(e[0, 0])
    if h.order == 1:
        return float(e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0])
    with warnings.catch_warnings():
        # exactly singular H_m is a valid input; its determinant is 0
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(e, check_finite=True)
    swaps = int(np.count_nonzero(piv != np.arange(piv.shape[0])))
    sign = -1.0 if swaps % 2 else 1.0
    return float(sign * np.prod(np.diag(lu)))


def classify(value: float, tol_det: float = DEFAULT_SETTINGS.tol_det) -> str:
    if value < -tol_det:
        return "negative"
    if value > tol_det:
        return "nonnegative"
    return "within-tolerance-of-zero"


def detect(
    rho: DensityMatrix,
    basis_a: OrthonormalBasis,
    basis_b: OrthonormalBasis,
    m_max: int = 3,
    settings: Settings = DEFAULT_SETTINGS,
) -> DetectionReport:
    """Y-twirl → 拡張 KD → モーメント → Hankel 行列式 の順に判定する"""
    if m_max < 1:
        raise ValueError(f"m_max must be >= 1, got {m_max}")
    is_mub, deviation = validate_mub(basis_a, basis_b, settings.tol)
    if not is_mub:
        raise NotMUB(f"NotMUB: worst overlap deviation from 1/sqrt(d) is {deviation:.3e} > {settings.tol:.1e}")

    twirled = y_twirl(rho)
    tensor = extended_kd(twirled, basis_a, basis_b, tol=settings.tol)
    ms = moments(tensor, 2 * m_max + 1, tol_moment=settings.tol_moment, tol=settings.tol)

    records: List[DeterminantRecord] = []
    minimal_order = None
    for m in range(1, m_max + 1):
        value = hankel_det(hankel(ms, m))
        cls = classify(value, settings.tol_det)
        records.append(DeterminantRecord(m=m, value=value, classification=cls))
        if cls == "negative" and minimal_order is None:
            minimal_order = m

    m_l1 = l1_imaginarity(rho)
    detected = minimal_order is not None
    if detected:
        verdict = VERDICT_DETECTED
    elif m_l1 > settings.tol and any(r.classification == "within-tolerance-of-zero" for r in records):
        verdict = VERDICT_INCONCLUSIVE
    else:
        verdict = verdict_not_detected(m_max)
    logger.info("detect: d=%d basis=%s verdict=%s order=%s", rho.dim, basis_b.label, verdict, minimal_order)

    return DetectionReport(
        verdict=verdict,
        detected=detected,
        minimal_order=minimal_order,
        m_max=m_max,
        determinants=records,
        moments=[MomentRecord(n=n, value=ms.r(n), imag_residual=ms.imag_residual(n)) for n in range(1, len(ms) + 1)],
        max_imag_residual=ms.max_imag_residual,
        reference_M_l1=m_l1,
        basis_a=basis_a.label,
        basis_b=basis_b.label,
        mub_deviation=deviation,
        state=rho.label,
        tolerances={
            "tol": settings.tol,
            "tol_psd": settings.tol_psd,
            "tol_moment": settings.tol_moment,
            "tol_det": settings.tol_det,
        },
        seed=settings.seed,
    )


def detect_over_bases(
    rho: DensityMatrix,
    basis_a: OrthonormalBasis,
    candidates: Sequence[OrthonormalBasis],
    m_max: int = 3,
    settings: Settings = DEFAULT_SETTINGS,
) -> MultiBasisReport:
    reports = [detect(rho, basis_a, b, m_max, settings) for b in candidates]
    return MultiBasisReport(detected=any(r.detected for r in reports), reports=reports)


# --- closed forms for the qubit family cos(pi/4)|0> + sin(pi/4) e^{i alpha}|1> ---

def qubit_example_state(alpha: float, theta: float = np.pi / 2) -> DensityMatrix:
    return pure_density(qubit_pure_state(theta, alpha))


def qubit_example_extended_kd(alpha: float, beta: float) -> np.ndarray:
    """β 基底で Y-twirl 後の状態から作る 8 成分 (0 始まりの添字 i, j, k)"""
    c = 0.25j * np.exp(1j * beta) * np.sin(alpha)
    q = np.zeros((2, 2, 2), dtype=complex)
    q[0, 0, :] = 0.25
    q[1, 1, :] = 0.25
    q[0, 1, 1] = c
    q[0, 1, 0] = -c
    q[1, 0, 1] = np.conj(c)
    q[1, 0, 0] = -np.conj(c)
    return q


def closed_form_moments(alpha: float, beta: float) -> np.ndarray:
    """r_1..r_7。偶数次は r_2k = 4^(1-2k) (1 + (-1)^k X^k cos 2kβ), X = sin²α"""
    x = np.sin(alpha) ** 2
    return np.array(
        [
            1.0,
            (1 - x * np.cos(2 * beta)) / 4,
            1 / 16,
            (1 + x**2 * np.cos(4 * beta)) / 64,
            1 / 256,
            (1 - x**3 * np.cos(6 * beta)) / 1024,
            1 / 4096,
        ]
    )


def closed_form_dets(alpha: float, beta: float) -> Tuple[float, float, float]:
    x = np.sin(alpha) ** 2
    a = 1 - x * np.cos(2 * beta)
    b = 1 + x**2 * np.cos(4 * beta)
    c = 1 - x**3 * np.cos(6 * beta)
    u = b - a
    w = c - 2 * b + a
    det1 = (1 - a**2) / 2**4
    det2 = -(u**2) / 2**12
    det3 = ((u**2 - a * w) ** 2 - w**2) / 2**24
    return float(det1), float(det2), float(det3)


def vandermonde_hankel(values: np.ndarray, m: int) -> HankelMatrix:
    """正の分布 p_l について H_m = V D V^T (V_jl = p_l^j, D = diag(p_l))"""
    nodes = np.asarray(values, dtype=float).ravel()
    v = nodes[None, :] ** np.arange(m + 1)[:, None]
    return HankelMatrix(order=m, entries=(v * nodes[None, :]) @ v.T)
