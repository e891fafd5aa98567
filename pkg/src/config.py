from __future__ import annotations
import os
from typing import Any, Optional
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict

# .envファイルを読み込み
load_dotenv()


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    return float(raw) if raw not in (None, "") else default


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    return int(raw) if raw not in (None, "") else default


class Settings(BaseModel):
    """数値許容誤差と実行パラメータ"""

    model_config = ConfigDict(frozen=True)

    tol: float = 1e-10
    tol_psd: float = 1e-9
    tol_moment: float = 1e-9
    tol_det: float = 1e-12
    seed: int = 20240601
    dense_limit: int = 4096
    grid_size: int = 360

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            tol=_env_float("IMKIT_TOL", 1e-10),
            tol_psd=_env_float("IMKIT_TOL_PSD", 1e-9),
            tol_moment=_env_float("IMKIT_TOL_MOMENT", 1e-9),
            tol_det=_env_float("IMKIT_TOL_DET", 1e-12),
            seed=_env_int("IMKIT_SEED", 20240601),
            dense_limit=_env_int("IMKIT_DENSE_LIMIT", 4096),
            grid_size=_env_int("IMKIT_GRID_SIZE", 360),
        )

    def with_overrides(self, **overrides: Optional[Any]) -> "Settings":
        """None でない値だけ上書きした新しい Settings を返す"""
        updates = {k: v for k, v in overrides.items() if v is not None}
        return self.model_copy(update=updates) if updates else self


DEFAULT_SETTINGS = Settings()


def get_settings(**overrides: Optional[Any]) -> Settings:
    return Settings.from_env().with_overrides(**overrides)
