from __future__ import annotations
from abc import ABC, abstractmethod
from typing import Iterable

from config import Settings
from schema import CheckResult


class BaseCheck(ABC):
    """検証スロットのベースクラス"""

    def __init__(self, name: str, description: str, threshold: float):
        self.name = name
        self.description = description
        self.threshold = threshold

    @abstractmethod
    def run(self, settings: Settings, level: str = "fast") -> CheckResult:
        """検証を実行する"""
        raise NotImplementedError

    def result(self, residuals: Iterable[float], detail: str = "", passed: bool | None = None) -> CheckResult:
        values = [float(r) for r in residuals]
        worst = max(values) if values else 0.0
        ok = bool(worst <= self.threshold) if passed is None else bool(passed)
        return CheckResult(
            name=self.name,
            description=self.description,
            passed=ok,
            max_residual=worst,
            threshold=self.threshold,
            cases=len(values),
            detail=detail,
        )
