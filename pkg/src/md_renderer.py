from __future__ import annotations
from pathlib import Path
from jinja2 import Environment, FileSystemLoader, select_autoescape
from schema import VerifyReport


def sci(value: float | int | None) -> str:
    """残差・閾値を 3 桁の指数表記で"""
    if value is None:
        return "N/A"
    if isinstance(value, int):
        return str(value)
    return f"{value:.3e}"


def _environment(template_dir: Path) -> Environment:
    env = Environment(
        loader=FileSystemLoader(template_dir.as_posix()),
        autoescape=select_autoescape(),
        trim_blocks=True,
    )
    env.filters['sci'] = sci
    return env


def render_verify_report(report: VerifyReport, template_dir: Path, out_path: Path) -> Path:
    failed = [c.name for c in report.checks if not c.passed]
    md = _environment(template_dir).get_template("verify_report.md.j2").render(report=report, failed=failed)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(md, encoding="utf-8")
    return out_path
