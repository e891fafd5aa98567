import json
import os
import sys

# src/ のフラットなモジュールをそのまま import する
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

import numpy as np
import pytest


@pytest.fixture
def qubit_state_file(tmp_path):
    """cos(π/4)|0> + sin(π/4) e^{iα}|1> を {dim, re, im} 形式で書き出す"""
    def _write(alpha=np.pi / 2, name="state.json"):
        amps = np.array([np.cos(np.pi / 4), np.sin(np.pi / 4) * np.exp(1j * alpha)])
        rho = np.outer(amps, amps.conj())
        path = tmp_path / name
        path.write_text(json.dumps({"dim": 2, "re": rho.real.tolist(), "im": rho.imag.tolist()}), encoding="utf-8")
        return path
    return _write
