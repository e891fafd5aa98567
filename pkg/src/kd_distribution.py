from __future__ import annotations
import logging
import string
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from config import DEFAULT_SETTINGS
from errors import DimensionMismatch, ImkitError, ZeroOverlap
from quantum_core import (
    DensityMatrix,
    OrthonormalBasis,
    dagger,
    make_density,
    overlap_matrix,
    validate_mub,
)
from schema import TensorDump, TensorEntry

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class KDTensor:
    """KD 擬確率 Q_ik = <b_k|a_i><a_i|ρ|b_k>"""

    values: np.ndarray
    basis_a: OrthonormalBasis
    basis_b: OrthonormalBasis

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True, eq=False)
class ExtendedKDTensor:
    """拡張 KD 擬確率 Q*_ijk = <a_j|b_k><b_k|a_i><a_i|ρ|a_j> (添字順 i, j, k)"""

    values: np.ndarray
    basis_a: OrthonormalBasis
    basis_b: OrthonormalBasis
    is_mub: bool
    mub_deviation: float
    source: str = ""

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])


def _check_dims(rho: DensityMatrix, *bases: OrthonormalBasis) -> None:
    dims = {rho.dim, *(b.dim for b in bases)}
    if len(dims) != 1:
        raise DimensionMismatch(
            f"DimensionMismatch: state dim {rho.dim}, basis dims {[b.dim for b in bases]}"
        )


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def kd(
    rho: DensityMatrix,
    basis_a: OrthonormalBasis,
    basis_b: OrthonormalBasis,
    tol: float = DEFAULT_SETTINGS.tol,
) -> KDTensor:
    _check_dims(rho, basis_a, basis_b)
    overlaps = overlap_matrix(basis_a, basis_b)
    cross = dagger(basis_a.vectors) @ rho.matrix @ basis_b.vectors
    values = np.conj(overlaps) * cross

    born_a = np.real(np.diag(dagger(basis_a.vectors) @ rho.matrix @ basis_a.vectors))
    born_b = np.real(np.diag(dagger(basis_b.vectors) @ rho.matrix @ basis_b.vectors))
    residual = max(
        float(np.max(np.abs(values.sum(axis=1) - born_a))),
        float(np.max(np.abs(values.sum(axis=0) - born_b))),
        float(abs(values.sum() - 1.0)),
    )
    if residual > tol:
        raise ImkitError(f"KD marginals violate Born probabilities: residual {residual:.3e} > {tol:.1e}")
    return KDTensor(values=_readonly(values), basis_a=basis_a, basis_b=basis_b)


def extended_kd(
    rho: DensityMatrix,
    basis_a: OrthonormalBasis,
    basis_b: OrthonormalBasis,
    tol: float = DEFAULT_SETTINGS.tol,
) -> ExtendedKDTensor:
    _check_dims(rho, basis_a, basis_b)
    overlaps = overlap_matrix(basis_a, basis_b)
    elements = dagger(basis_a.vectors) @ rho.matrix @ basis_a.vectors
    # [i, j, k] = <a_j|b_k> * <b_k|a_i> * <a_i|rho|a_j>
    values = np.einsum("jk,ik,ij->ijk", overlaps, np.conj(overlaps), elements)

    norm_residual = float(abs(values.sum() - 1.0))
    if norm_residual > tol:
        raise ImkitError(f"extended KD normalization residual {norm_residual:.3e} > {tol:.1e}")
    is_mub, deviation = validate_mub(basis_a, basis_b, tol)
    logger.debug("extended_kd: d=%d mub=%s deviation=%.2e", rho.dim, is_mub, deviation)
    return ExtendedKDTensor(
        values=_readonly(values),
        basis_a=basis_a,
        basis_b=basis_b,
        is_mub=is_mub,
        mub_deviation=deviation,
        source=rho.label,
    )


def nonpositivity(tensor: ExtendedKDTensor) -> float:
    """Σ|Q*| - 1。MUB なら l1 コヒーレンスに一致"""
    return float(np.sum(np.abs(tensor.values)) - 1.0)


def reconstruct(tensor: ExtendedKDTensor, tol: float = DEFAULT_SETTINGS.tol) -> DensityMatrix:
    """ρ = Σ_ijk |a_i><b_k| Q*_ijk / <b_k|a_i>"""
    overlaps = overlap_matrix(tensor.basis_a, tensor.basis_b)
    small = np.argwhere(np.abs(overlaps) <= tol)
    if small.size:
        i, k = (int(x) for x in small[0])
        raise ZeroOverlap(i, k, float(abs(overlaps[i, k])))
    marginal = tensor.values.sum(axis=1)
    coeffs = marginal / np.conj(overlaps)
    rho = tensor.basis_a.vectors @ coeffs @ dagger(tensor.basis_b.vectors)
    return make_density(rho, label="reconstructed")


def _chain_subscripts(length: int) -> str:
    letters = string.ascii_letters[:length]
    terms = [letters[0] + letters[-1]]
    terms += [letters[r + 1] + letters[r] for r in range(length - 1)]
    return ",".join(terms) + "->" + letters


def extended_kd_general(rho: DensityMatrix, bases: Sequence[OrthonormalBasis]) -> np.ndarray:
    """Q*_{i1..il} = Tr(Π^(l)_{il} ... Π^(1)_{i1} ρ)。基底は作用順に並べる"""
    if len(bases) < 2:
        raise ValueError(f"extended KD needs at least two bases, got {len(bases)}")
    _check_dims(rho, *bases)
    first, last = bases[0].vectors, bases[-1].vectors
    operands = [dagger(first) @ rho.matrix @ last]
    # [x, y] = <v^(r+1)_x | v^(r)_y>
    operands += [dagger(bases[r + 1].vectors) @ bases[r].vectors for r in range(len(bases) - 1)]
    return np.einsum(_chain_subscripts(len(bases)), *operands)


def kd_reconstruct_general(
    values: np.ndarray,
    bases: Sequence[OrthonormalBasis],
    tol: float = DEFAULT_SETTINGS.tol,
) -> DensityMatrix:
    """ρ = Σ |a^(1)><a^(l)| Q* / <a^(l)|a^(1)>"""
    if values.ndim != len(bases):
        raise DimensionMismatch(f"DimensionMismatch: tensor rank {values.ndim}, {len(bases)} bases")
    first, last = bases[0].vectors, bases[-1].vectors
    marginal = values.sum(axis=tuple(range(1, values.ndim - 1))) if values.ndim > 2 else values
    closing = (dagger(last) @ first).T  # [i1, il] = <a^(l)_il | a^(1)_i1>
    small = np.argwhere(np.abs(closing) <= tol)
    if small.size:
        i, k = (int(x) for x in small[0])
        raise ZeroOverlap(i, k, float(abs(closing[i, k])))
    rho = first @ (marginal / closing) @ dagger(last)
    return make_density(rho, label="reconstructed")


def to_dump(tensor: ExtendedKDTensor) -> TensorDump:
    d = tensor.dim
    entries = [
        TensorEntry(i=i, j=j, k=k, re=float(tensor.values[i, j, k].real), im=float(tensor.values[i, j, k].imag))
        for i in range(d)
        for j in range(d)
        for k in range(d)
    ]
    return TensorDump(dim=d, entries=entries)


def dump_tensor_json(tensor: ExtendedKDTensor) -> str:
    """(i, j, k) 辞書順の成分リスト"""
    return to_dump(tensor).model_dump_json(indent=2)
