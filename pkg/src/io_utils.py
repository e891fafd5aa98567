from __future__ import annotations
from pathlib import Path
from typing import Iterable, Sequence
import hashlib
import json
import time

import numpy as np
from pydantic import BaseModel, ValidationError

from errors import InputFormatError
from quantum_core import DensityMatrix, make_density
from schema import StateFile


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(8192), b''):
            h.update(chunk)
    return h.hexdigest()

def fmt(x: float) -> str:
    """CSV 用: 17 桁の有効数字"""
    return format(float(x), ".17g")

def _read_matrix_json(path: Path) -> np.ndarray:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputFormatError(f"cannot read {path}: {e}") from e
    try:
        state = StateFile.model_validate_json(raw)
    except ValidationError as e:
        first = e.errors()[0]
        raise InputFormatError(f"{path}: {first['msg']} (at {'.'.join(str(x) for x in first['loc']) or 'top level'})") from e
    return np.array(state.re, dtype=float) + 1j * np.array(state.im, dtype=float)

def load_density_json(path: Path) -> DensityMatrix:
    """{"dim": d, "re": [[...]], "im": [[...]]} を読み make_density で検証"""
    m = _read_matrix_json(path)
    return make_density(m, label=Path(path).name)

def load_matrix_json(path: Path) -> np.ndarray:
    return _read_matrix_json(path)

def dump_density_json(rho: DensityMatrix | np.ndarray, path: Path) -> None:
    m = np.asarray(rho, dtype=complex)
    state = StateFile(dim=m.shape[0], re=m.real.tolist(), im=m.imag.tolist())
    save_model(state, path)

def save_model(model: BaseModel, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8")

def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]], comment: str | None = None) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        if comment:
            f.write(f"# {comment}\n")
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")
            count += 1
    return count

def write_run_log(out: Path, **meta: object) -> Path:
    """<out>.run.json にタイムスタンプ付きの実行記録を残す"""
    out = Path(out)
    runlog = {"ts": int(time.time()), "output": out.as_posix(), **meta}
    log_path = out.with_name(out.name + ".run.json")
    log_path.write_text(json.dumps(runlog, indent=2, default=str), encoding="utf-8")
    return log_path
