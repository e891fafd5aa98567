from __future__ import annotations


class ImkitError(ValueError):
    """imkit の入力・数値検証エラーの基底クラス"""


class NotHermitian(ImkitError):
    pass


class NotUnitTrace(ImkitError):
    pass


class NotPSD(ImkitError):
    pass


class NotNormalized(ImkitError):
    pass


class DimensionTooSmall(ImkitError):
    pass


class DimensionMismatch(ImkitError):
    pass


class ZeroOverlap(ImkitError):
    """再構成の分母 <b_k|a_i> がゼロ"""

    def __init__(self, i: int, k: int, overlap: float):
        self.i = i
        self.k = k
        self.overlap = overlap
        super().__init__(f"ZeroOverlap: |<b_{k}|a_{i}>| = {overlap:.3e} at (i, k) = ({i}, {k})")


class NonRealMoment(ImkitError):
    def __init__(self, n: int, residual: float, tol: float):
        self.n = n
        self.residual = residual
        super().__init__(f"NonRealMoment: |Im r_{n}| = {residual:.3e} > {tol:.1e}")


class InsufficientMoments(ImkitError):
    pass


class NotMUB(ImkitError):
    pass


class NotUnitary(ImkitError):
    pass


class DegenerateContrast(ImkitError):
    pass


class DenseLimitExceeded(ImkitError):
    pass


class InputFormatError(ImkitError):
    """状態ファイル・行列ファイル・CLI 引数の書式エラー"""
