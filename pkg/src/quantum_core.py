from __future__ import annotations
import logging
from dataclasses import dataclass
from functools import reduce
from typing import Tuple

import numpy as np
from scipy import linalg, stats

from config import DEFAULT_SETTINGS
from errors import (
    DimensionMismatch,
    DimensionTooSmall,
    InputFormatError,
    NotHermitian,
    NotNormalized,
    NotPSD,
    NotUnitTrace,
)

logger = logging.getLogger(__name__)

# Operators (A, B, Π, U, Y_pq ...) are plain complex128 ndarrays.
ComplexMatrix = np.ndarray


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.flags.writeable = False
    return out


def dagger(m: ComplexMatrix) -> ComplexMatrix:
    return np.conj(np.transpose(m))


def max_abs_diff(a: ComplexMatrix, b: ComplexMatrix) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"DimensionMismatch: shapes {a.shape} and {b.shape}")
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def matrices_equal(a: ComplexMatrix, b: ComplexMatrix, tol: float = DEFAULT_SETTINGS.tol) -> bool:
    """成分ごとの絶対誤差 tol 以内での一致"""
    return max_abs_diff(a, b) <= tol


def kron_power(m: ComplexMatrix, n: int) -> ComplexMatrix:
    if n < 1:
        raise ValueError(f"tensor power needs n >= 1, got {n}")
    return reduce(np.kron, [np.asarray(m, dtype=complex)] * n)


def unitarity_residual(u: ComplexMatrix) -> float:
    u = np.asarray(u, dtype=complex)
    return max_abs_diff(dagger(u) @ u, np.eye(u.shape[0]))


def is_unitary(u: ComplexMatrix, tol: float = DEFAULT_SETTINGS.tol) -> Tuple[bool, float]:
    residual = unitarity_residual(u)
    return residual <= tol, residual


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """検証済みの密度行列 ρ (Hermitian, Tr ρ = 1, PSD)"""

    matrix: ComplexMatrix
    label: str = ""

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """正規直交基底。vectors の第 i 列が |v_i>"""

    vectors: ComplexMatrix
    label: str = ""

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[0])

    def vector(self, i: int) -> np.ndarray:
        return self.vectors[:, i]

    def projector(self, i: int) -> ComplexMatrix:
        v = self.vectors[:, i]
        return np.outer(v, np.conj(v))


def make_density(
    entries,
    tol: float = DEFAULT_SETTINGS.tol,
    tol_psd: float = DEFAULT_SETTINGS.tol_psd,
    label: str = "",
) -> DensityMatrix:
    rho = np.array(entries, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"DimensionMismatch: density matrix must be square, got shape {rho.shape}")
    if rho.shape[0] < 1:
        raise DimensionTooSmall("DimensionTooSmall: empty matrix")

    asym = float(np.max(np.abs(rho - dagger(rho))))
    if asym > tol:
        raise NotHermitian(f"NotHermitian: max |rho - rho^dagger| = {asym:.3e} > {tol:.1e}")
    if asym > 0.0:
        rho = (rho + dagger(rho)) / 2

    trace_residual = float(abs(np.trace(rho) - 1.0))
    if trace_residual > tol:
        raise NotUnitTrace(f"NotUnitTrace: |Tr rho - 1| = {trace_residual:.3e} > {tol:.1e}")

    min_eig = float(linalg.eigvalsh(rho)[0])
    if min_eig < -tol_psd:
        raise NotPSD(f"NotPSD: minimum eigenvalue {min_eig:.6g} < -{tol_psd:.1e}")
    logger.debug("make_density: d=%d asym=%.2e trace_res=%.2e min_eig=%.3e", rho.shape[0], asym, trace_residual, min_eig)
    return DensityMatrix(matrix=_frozen(rho), label=label)


def purity(rho: DensityMatrix) -> float:
    m = rho.matrix
    return float(np.real(np.trace(m @ m)))


def pure_density(psi: PureState, tol: float = DEFAULT_SETTINGS.tol) -> DensityMatrix:
    amps = np.asarray(psi.amplitudes, dtype=complex)
    norm_residual = float(abs(np.vdot(amps, amps).real - 1.0))
    if norm_residual > tol:
        raise NotNormalized(f"NotNormalized: | <psi|psi> - 1 | = {norm_residual:.3e} > {tol:.1e}")
    return make_density(np.outer(amps, np.conj(amps)), tol=tol, label="pure")


def qubit_pure_state(theta: float, alpha: float) -> PureState:
    """cos(θ/2)|0> + sin(θ/2) e^{iα}|1>"""
    amps = np.array([np.cos(theta / 2), np.sin(theta / 2) * np.exp(1j * alpha)], dtype=complex)
    return PureState(amplitudes=_frozen(amps))


def make_basis(columns, tol: float = DEFAULT_SETTINGS.tol, label: str = "") -> OrthonormalBasis:
    vecs = np.array(columns, dtype=complex)
    if vecs.ndim != 2 or vecs.shape[0] != vecs.shape[1]:
        raise DimensionMismatch(f"DimensionMismatch: basis needs d vectors of length d, got shape {vecs.shape}")
    residual = max_abs_diff(dagger(vecs) @ vecs, np.eye(vecs.shape[0]))
    if residual > tol:
        raise NotNormalized(f"NotNormalized: basis Gram residual {residual:.3e} > {tol:.1e}")
    return OrthonormalBasis(vectors=_frozen(vecs), label=label)


def computational_basis(d: int) -> OrthonormalBasis:
    if d < 2:
        raise DimensionTooSmall(f"DimensionTooSmall: d={d}, need d >= 2")
    return OrthonormalBasis(vectors=_frozen(np.eye(d)), label="computational")


def fourier_mub(basis: OrthonormalBasis) -> OrthonormalBasis:
    """b_k = d^{-1/2} Σ_j ω^{jk} a_j,  ω = exp(2πi/d)"""
    d = basis.dim
    # scipy's DFT uses exp(-2πi/d); its conjugate is the ω = exp(+2πi/d) kernel
    kernel = np.conj(linalg.dft(d, scale="sqrtn"))
    label = "fourier" if basis.label == "computational" else f"fourier({basis.label})"
    return OrthonormalBasis(vectors=_frozen(basis.vectors @ kernel), label=label)


def qubit_beta_basis(beta: float) -> OrthonormalBasis:
    if not (-1e-12 <= beta <= 2 * np.pi + 1e-12):
        raise InputFormatError(f"beta must lie in [0, 2pi], got {beta}")
    phase = np.exp(1j * beta)
    vecs = np.array([[1.0, 1.0], [phase, -phase]], dtype=complex) / np.sqrt(2)
    return OrthonormalBasis(vectors=_frozen(vecs), label=f"beta:{beta!r}")


def overlap_matrix(basis_a: OrthonormalBasis, basis_b: OrthonormalBasis) -> ComplexMatrix:
    """[i, k] 成分が <a_i|b_k>"""
    if basis_a.dim != basis_b.dim:
        raise DimensionMismatch(f"DimensionMismatch: bases of dim {basis_a.dim} and {basis_b.dim}")
    return dagger(basis_a.vectors) @ basis_b.vectors


def validate_mub(
    basis_a: OrthonormalBasis,
    basis_b: OrthonormalBasis,
    tol: float = DEFAULT_SETTINGS.tol,
) -> Tuple[bool, float]:
    overlaps = overlap_matrix(basis_a, basis_b)
    deviation = float(np.max(np.abs(np.abs(overlaps) - 1.0 / np.sqrt(basis_a.dim))))
    return deviation <= tol, deviation


def _ginibre(d: int, seed: int, real: bool = False) -> np.ndarray:
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d))
    if not real:
        g = g + 1j * rng.standard_normal((d, d))
    return g


def random_density(d: int, seed: int) -> DensityMatrix:
    """seed 固定の複素 Ginibre 乱数から GG†/Tr(GG†)"""
    if d < 2:
        raise DimensionTooSmall(f"DimensionTooSmall: d={d}, need d >= 2")
    g = _ginibre(d, seed)
    w = g @ dagger(g)
    return make_density(w / np.trace(w), label=f"ginibre(d={d}, seed={seed})")


def random_real_density(d: int, seed: int) -> DensityMatrix:
    if d < 2:
        raise DimensionTooSmall(f"DimensionTooSmall: d={d}, need d >= 2")
    g = _ginibre(d, seed, real=True)
    w = g @ g.T
    return make_density(w / np.trace(w), label=f"real-ginibre(d={d}, seed={seed})")


def random_diagonal_density(d: int, seed: int) -> DensityMatrix:
    if d < 2:
        raise DimensionTooSmall(f"DimensionTooSmall: d={d}, need d >= 2")
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(d))
    return make_density(np.diag(probs), label=f"diagonal(d={d}, seed={seed})")


def random_unitary(d: int, seed: int) -> ComplexMatrix:
    """Haar 乱数ユニタリ (scipy.stats.unitary_group)"""
    return stats.unitary_group.rvs(d, random_state=seed)
