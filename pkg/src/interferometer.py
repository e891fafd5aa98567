from __future__ import annotations
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import linalg

from config import DEFAULT_SETTINGS
from errors import DegenerateContrast, DenseLimitExceeded, DimensionMismatch, NotUnitary
from imaginarity import AntisymmetricGenerator, antisymmetric_generators
from quantum_core import (
    ComplexMatrix,
    DensityMatrix,
    OrthonormalBasis,
    dagger,
    is_unitary,
    kron_power,
    make_density,
    overlap_matrix,
    unitarity_residual,
)
from schema import CopyCount, GeneratorVisibility

logger = logging.getLogger(__name__)

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2)
_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_P0 = np.diag([1.0, 0.0]).astype(complex)
ANCILLA_ZERO = _P0
_P1 = np.diag([0.0, 1.0]).astype(complex)
_PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
_MINUS = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2)

MatrixLike = Union[DensityMatrix, np.ndarray]


@dataclass(frozen=True, eq=False)
class VisibilityResult:
    value: float
    method: str                       # analytic | grid-sweep | both
    phase_at_max: float               # chi
    analytic: Optional[float] = None
    grid: Optional[float] = None
    fit_residual: Optional[float] = None
    grid_size: int = 0
    intensity_max: Optional[float] = None
    intensity_min: Optional[float] = None


@dataclass(frozen=True, eq=False)
class InterferometerRun:
    """内部自由度 d_int、位相グリッド θ と強度 I(θ) の組"""

    internal_dim: int
    unitary: ComplexMatrix
    phase_grid: np.ndarray
    intensities: np.ndarray
    trace: complex
    visibility: VisibilityResult


@dataclass(frozen=True, eq=False)
class MomentOperator:
    """S_n とその Gram 構造。n >= 2 では S_n^† S_n = Σ G_ii' |a_i^n><a_i'^n| (rank <= d) でユニタリではない"""

    n: int
    matrix: ComplexMatrix
    gram: ComplexMatrix               # G_ii' = Σ_k (<a_i|b_k><b_k|a_i'>)^n
    unitarity_residual: float

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


@dataclass(frozen=True, eq=False)
class MomentVisibility:
    n: int
    trace: complex                    # Σ_ik Q_ik^n = Tr[S_n ρ^(⊗n)]
    visibility: float                 # |trace|
    dense_trace: Optional[complex] = None

    @property
    def signed(self) -> float:
        return float(self.trace.real)


def _matrix(rho: MatrixLike) -> np.ndarray:
    return np.asarray(rho, dtype=complex)


def _trace(u: np.ndarray, m: np.ndarray) -> complex:
    """Tr(U ρ) without forming the product"""
    return complex(np.einsum("ij,ji->", u, m))


def _require_unitary(u: ComplexMatrix, tol: float) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatch(f"DimensionMismatch: unitary must be square, got shape {u.shape}")
    ok, residual = is_unitary(u, tol)
    if not ok:
        raise NotUnitary(f"NotUnitary: max |U^dagger U - I| = {residual:.3e} > {tol:.1e}")
    return u


def _check_pair(rho: np.ndarray, u: np.ndarray) -> None:
    if rho.shape != u.shape:
        raise DimensionMismatch(f"DimensionMismatch: state {rho.shape} vs unitary {u.shape}")


def mz_total_unitary(u: ComplexMatrix, theta: float, tol: float = DEFAULT_SETTINGS.tol) -> ComplexMatrix:
    """(H⊗I)(X⊗I)(|0><0|⊗I + |1><1|⊗U)(e^{iθ}|0><0|⊗I + |1><1|⊗I)(H⊗I)。経路が第 0 因子"""
    u = _require_unitary(u, tol)
    eye = np.eye(u.shape[0], dtype=complex)
    beam = np.kron(_HADAMARD, eye)
    mirror = np.kron(_SIGMA_X, eye)
    controlled = np.kron(_P0, eye) + np.kron(_P1, u)
    phase = np.exp(1j * theta) * np.kron(_P0, eye) + np.kron(_P1, eye)
    return beam @ mirror @ controlled @ phase @ beam


def mz_final_state(
    rho: DensityMatrix,
    u: ComplexMatrix,
    theta: float,
    tol: float = DEFAULT_SETTINGS.tol,
) -> DensityMatrix:
    m = rho.matrix
    u = _require_unitary(u, tol)
    _check_pair(m, u)
    out = 0.5 * (
        np.kron(np.outer(_PLUS, _PLUS), u @ m @ dagger(u))
        + np.exp(-1j * theta) * np.kron(np.outer(_PLUS, _MINUS), u @ m)
        + np.exp(1j * theta) * np.kron(np.outer(_MINUS, _PLUS), m @ dagger(u))
        + np.kron(np.outer(_MINUS, _MINUS), m)
    )
    return make_density(out, label="mz_final")


def mz_final_state_by_conjugation(
    rho: DensityMatrix,
    u: ComplexMatrix,
    theta: float,
    tol: float = DEFAULT_SETTINGS.tol,
) -> DensityMatrix:
    """U_total (|0><0| ⊗ ρ) U_total^† による検算ルート"""
    total = mz_total_unitary(u, theta, tol)
    _check_pair(rho.matrix, np.asarray(u))
    initial = np.kron(_P0, rho.matrix)
    return make_density(total @ initial @ dagger(total), label="mz_final_conjugated")


def intensity(rho: MatrixLike, u: ComplexMatrix, theta: float) -> float:
    """I(θ) = ½(1 + Re[Tr(Uρ) e^{-iθ}])"""
    m = _matrix(rho)
    u = np.asarray(u, dtype=complex)
    _check_pair(m, u)
    t = _trace(u, m)
    return float(0.5 * (1.0 + np.real(t * np.exp(-1j * theta))))


def phase_grid(grid_size: int) -> np.ndarray:
    """[0, 2π) の等間隔グリッド (0 を含む)"""
    if grid_size < 3:
        raise ValueError(f"phase grid needs at least 3 points, got {grid_size}")
    return 2 * np.pi * np.arange(grid_size) / grid_size


def _fit_fringe(thetas: np.ndarray, values: np.ndarray) -> Tuple[float, float, float]:
    """第一高調波フィット I = c0 + a cos(θ - χ)。(visibility, χ, residual) を返す"""
    n = thetas.shape[0]
    spectrum = np.fft.rfft(values)
    c0 = spectrum[0].real / n
    amplitude = 2 * abs(spectrum[1]) / n
    chi = float(-np.angle(spectrum[1])) % (2 * np.pi)
    model = c0 + amplitude * np.cos(thetas - chi)
    residual = float(np.max(np.abs(values - model)))
    return float(amplitude / c0), chi, residual


def visibility(
    rho: MatrixLike,
    u: ComplexMatrix,
    method: str = "analytic",
    grid_size: int = DEFAULT_SETTINGS.grid_size,
) -> VisibilityResult:
    if method not in ("analytic", "grid-sweep", "grid", "both"):
        raise ValueError(f"unknown visibility method: {method}")
    m = _matrix(rho)
    u = np.asarray(u, dtype=complex)
    _check_pair(m, u)
    t = _trace(u, m)
    analytic = abs(t)
    chi_analytic = float(np.angle(t)) % (2 * np.pi)
    if method == "analytic":
        return VisibilityResult(value=analytic, method="analytic", phase_at_max=chi_analytic, analytic=analytic)

    thetas = phase_grid(grid_size)
    values = 0.5 * (1.0 + np.real(t * np.exp(-1j * thetas)))
    i_max, i_min = float(values.max()), float(values.min())
    if i_max + i_min < 1e-15:
        raise DegenerateContrast(f"DegenerateContrast: I_max + I_min = {i_max + i_min:.3e}")
    grid_value, chi, residual = _fit_fringe(thetas, values)
    logger.debug("visibility: analytic=%.12g grid=%.12g fit_residual=%.2e", analytic, grid_value, residual)
    return VisibilityResult(
        value=grid_value,
        method="both" if method == "both" else "grid-sweep",
        phase_at_max=chi,
        analytic=analytic if method == "both" else None,
        grid=grid_value,
        fit_residual=residual,
        grid_size=grid_size,
        intensity_max=i_max,
        intensity_min=i_min,
    )


def interference_curve(
    rho: MatrixLike,
    u: ComplexMatrix,
    grid_size: int = DEFAULT_SETTINGS.grid_size,
) -> InterferometerRun:
    m = _matrix(rho)
    u = np.asarray(u, dtype=complex)
    _check_pair(m, u)
    thetas = phase_grid(grid_size)
    t = _trace(u, m)
    values = 0.5 * (1.0 + np.real(t * np.exp(-1j * thetas)))
    return InterferometerRun(
        internal_dim=m.shape[0],
        unitary=u,
        phase_grid=thetas,
        intensities=values,
        trace=t,
        visibility=visibility(m, u, method="both", grid_size=grid_size),
    )


def _check_dense(dim: int, n: int, dense_limit: int) -> int:
    size = dim**n
    if size > dense_limit:
        raise DenseLimitExceeded(
            f"DenseLimitExceeded: d^n = {dim}^{n} = {size} > {dense_limit}; "
            "use moment_via_visibility for the factorized contraction"
        )
    return size


def s_n_operator(
    basis_a: OrthonormalBasis,
    basis_b: OrthonormalBasis,
    n: int,
    dense_limit: int = DEFAULT_SETTINGS.dense_limit,
) -> MomentOperator:
    """S_n = Σ_ik (<b_k|a_i> |b_k><a_i|)^(⊗n)。S_1 = I、n >= 2 では縮小写像"""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    d = basis_a.dim
    size = _check_dense(d, n, dense_limit)
    overlaps = overlap_matrix(basis_a, basis_b)
    a_pow = [kron_power(basis_a.vector(i), n) for i in range(d)]
    b_pow = [kron_power(basis_b.vector(k), n) for k in range(d)]
    s = np.zeros((size, size), dtype=complex)
    for i in range(d):
        for k in range(d):
            s += np.conj(overlaps[i, k]) ** n * np.outer(b_pow[k], np.conj(a_pow[i]))
    residual = unitarity_residual(s)
    logger.debug("s_n_operator: d=%d n=%d unitarity residual=%.3e", d, n, residual)
    return MomentOperator(n=n, matrix=s, gram=s_n_gram(basis_a, basis_b, n), unitarity_residual=residual)


def s_n_gram(basis_a: OrthonormalBasis, basis_b: OrthonormalBasis, n: int) -> ComplexMatrix:
    """G_ii' = Σ_k (<a_i|b_k><b_k|a_i'>)^n。S_n^† S_n の |a_i^(⊗n)> 基底での成分"""
    overlaps = overlap_matrix(basis_a, basis_b)
    return np.einsum("ik,jk->ij", overlaps**n, np.conj(overlaps) ** n)


def unitary_dilation(contraction: ComplexMatrix, tol: float = DEFAULT_SETTINGS.tol) -> ComplexMatrix:
    """||C|| <= 1 の C を [[C, (I - CC^†)^½], [(I - C^†C)^½, -C^†]] に埋め込む。

    左上ブロックが C なので Tr[U (|0><0| ⊗ ρ)] = Tr(C ρ)。平方根は SVD C = W Σ V^† から
    W sqrt(1 - Σ²) W^† と V sqrt(1 - Σ²) V^† で作る。
    """
    c = np.asarray(contraction, dtype=complex)
    w, sigma, vh = linalg.svd(c)
    if sigma[0] > 1.0 + tol:
        raise NotUnitary(f"NotUnitary: operator norm {sigma[0]:.12g} > 1, no unitary dilation")
    sigma = np.minimum(sigma, 1.0)
    comp = np.sqrt(np.clip(1.0 - sigma**2, 0.0, None))
    v = dagger(vh)
    return np.block(
        [
            [c, (w * comp) @ dagger(w)],
            [(v * comp) @ vh, -dagger(c)],
        ]
    )


def extended_moment_operator(
    basis_a: OrthonormalBasis,
    basis_b: OrthonormalBasis,
    n: int,
    dense_limit: int = DEFAULT_SETTINGS.dense_limit,
) -> ComplexMatrix:
    """T_n = Σ_ijk (Π^a_j Π^b_k Π^a_i)^(⊗n)。Tr[T_n ρ^(⊗n)] = r_n だが n >= 2 でユニタリではない"""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    d = basis_a.dim
    size = _check_dense(d, n, dense_limit)
    overlaps = overlap_matrix(basis_a, basis_b)
    a_pow = [kron_power(basis_a.vector(i), n) for i in range(d)]
    t = np.zeros((size, size), dtype=complex)
    for i in range(d):
        for j in range(d):
            # Π_j Π_k Π_i = <a_j|b_k><b_k|a_i> |a_j><a_i|
            coeff = np.sum((overlaps[j, :] * np.conj(overlaps[i, :])) ** n)
            t += coeff * np.outer(a_pow[j], np.conj(a_pow[i]))
    return t


def moment_via_visibility(
    rho_twirled: DensityMatrix,
    basis_a: OrthonormalBasis,
    basis_b: OrthonormalBasis,
    n: int,
    dense_limit: int = DEFAULT_SETTINGS.dense_limit,
) -> MomentVisibility:
    """V^(n) = |Tr[S_n ρ'^(⊗n)]| を d×d の KD 分布から計算する"""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    m = rho_twirled.matrix
    overlaps = overlap_matrix(basis_a, basis_b)
    if m.shape[0] != basis_a.dim:
        raise DimensionMismatch(f"DimensionMismatch: state dim {m.shape[0]}, basis dim {basis_a.dim}")
    # Q_ik = <b_k|a_i><a_i|ρ|b_k>, the middle index already summed
    q = np.conj(overlaps) * (dagger(basis_a.vectors) @ m @ basis_b.vectors)
    trace = complex(np.sum(q**n))

    dense_trace = None
    if basis_a.dim**n <= dense_limit:
        s = s_n_operator(basis_a, basis_b, n, dense_limit).matrix
        rho_n = kron_power(m, n)
        dense = visibility(rho_n, s, method="analytic")
        dense_trace = _trace(s, rho_n)
        logger.debug(
            "moment_via_visibility: n=%d factorized=%.3e dense=%.3e",
            n,
            abs(abs(trace) - dense.value),
            abs(trace - dense_trace),
        )
    return MomentVisibility(n=n, trace=trace, visibility=abs(trace), dense_trace=dense_trace)


def generator_unitary(g: AntisymmetricGenerator, theta: float) -> ComplexMatrix:
    """exp(iθY_pq) = cosθ P_pq + i sinθ Y_pq + (I - P_pq)"""
    proj = g.projector
    return np.cos(theta) * proj + 1j * np.sin(theta) * g.matrix + (np.eye(g.dim) - proj)


def total_visibility_imaginarity(
    rho: DensityMatrix,
    theta: float = np.pi / 2,
) -> Tuple[float, List[GeneratorVisibility]]:
    """各生成子の干渉縞から Im Tr(U_pq ρ) を読み取り、その絶対値の和を返す"""
    m = rho.matrix
    breakdown: List[GeneratorVisibility] = []
    for g in antisymmetric_generators(rho.dim):
        u = generator_unitary(g, theta)
        t = _trace(u, m)
        # the complement block contributes a real offset Tr((I - P)ρ); the quadrature drops it
        quadrature = 2 * intensity(m, u, np.pi / 2) - 1
        breakdown.append(GeneratorVisibility(p=g.p, q=g.q, visibility=abs(quadrature), raw_visibility=abs(t)))
    total = float(sum(b.visibility for b in breakdown))
    return total, breakdown


def copy_complexity(d: int, m_max: int) -> CopyCount:
    return CopyCount(dim=d, m_max=m_max, generator_circuits=d * (d - 1) // 2, moment_orders=2 * m_max + 1)


def unitary_trace(rho: MatrixLike, u: ComplexMatrix) -> complex:
    m = _matrix(rho)
    u = np.asarray(u, dtype=complex)
    _check_pair(m, u)
    return _trace(u, m)
