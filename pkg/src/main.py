from __future__ import annotations
import argparse
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from config import get_settings
from errors import ImkitError, NonRealMoment
from pipeline import parse_alpha_grid, parse_beta_list, run_detect, run_interfere, run_sweep, run_verify
from schema import SweepConfig

EXIT_DETECTED = 0
EXIT_NOT_DETECTED = 1
EXIT_INPUT_ERROR = 2


def parse_args(argv=None):
    ap = argparse.ArgumentParser(prog="imkit", description="Imaginarity detection via extended KD moments")
    ap.add_argument("--tol", type=float, default=None, help="Hermiticity/trace/unitarity tolerance (default: IMKIT_TOL or 1e-10)")
    ap.add_argument("--tol-psd", type=float, default=None, help="PSD tolerance (default: IMKIT_TOL_PSD or 1e-9)")
    ap.add_argument("--tol-det", type=float, default=None, help="Hankel determinant sign threshold (default: IMKIT_TOL_DET or 1e-12)")
    ap.add_argument("--seed", type=int, default=None, help="Seed for random states in verify (default: IMKIT_SEED)")
    ap.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="Run the moment-based imaginarity test on a state file")
    p.add_argument("--state", required=True, help="Density matrix JSON {dim, re, im}")
    p.add_argument("--basis", required=True, help="fourier | beta:RAD")
    p.add_argument("--mmax", type=int, default=3, help="Highest Hankel order (default: 3)")
    p.add_argument("--out", default=None, help="Write the report here instead of stdout")

    p = sub.add_parser("sweep", help="Sweep alpha for the worked qubit family and write a CSV")
    p.add_argument("--alpha", required=True, help="START:STOP:COUNT in radians")
    p.add_argument("--beta", required=True, help="RAD[,RAD...]")
    p.add_argument("--mmax", type=int, default=3)
    p.add_argument("--out", required=True)

    p = sub.add_parser("interfere", help="Simulate a Mach-Zehnder phase sweep")
    p.add_argument("--state", required=True)
    p.add_argument("--unitary", required=True, help="generator:p,q:theta | s_n:n | matrix JSON file")
    p.add_argument("--grid", type=int, default=None, help="Phase grid size (default: IMKIT_GRID_SIZE or 360)")
    p.add_argument("--basis", default="fourier", help="Second basis for s_n specs: fourier | beta:RAD")
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="Run the built-in verification suite")
    p.add_argument("--level", default="fast", choices=["fast", "full"])
    p.add_argument("--report", default=None, help="Also render a Markdown report")
    p.add_argument("--templates", default=str(Path(__file__).parent.parent / "templates"),
                   help="Template directory (default: ./templates)")
    return ap.parse_args(argv)


def _run(args) -> int:
    settings = get_settings(tol=args.tol, tol_psd=args.tol_psd, tol_det=args.tol_det, seed=args.seed)

    if args.command == "detect":
        out = Path(args.out).expanduser().resolve() if args.out else None
        report = run_detect(Path(args.state).expanduser(), args.basis, args.mmax, settings, out)
        if out is None:
            print(report.model_dump_json(indent=2))
        else:
            print(f"Verdict: {report.verdict}", file=sys.stderr)
            print(f"Output: {out}", file=sys.stderr)
        return EXIT_DETECTED if report.detected else EXIT_NOT_DETECTED

    if args.command == "sweep":
        start, stop, count = parse_alpha_grid(args.alpha)
        config = SweepConfig(
            alpha_start=start,
            alpha_stop=stop,
            alpha_count=count,
            beta_values=parse_beta_list(args.beta),
            m_max=args.mmax,
            tol=settings.tol,
            tol_det=settings.tol_det,
            out=str(Path(args.out).expanduser().resolve()),
        )
        rows = run_sweep(config, settings)
        print(f"Done. rows={len(rows)}", file=sys.stderr)
        print(f"Output: {config.out}", file=sys.stderr)
        return 0

    if args.command == "interfere":
        out = Path(args.out).expanduser().resolve()
        grid = args.grid if args.grid is not None else settings.grid_size
        summary = run_interfere(Path(args.state).expanduser(), args.unitary, grid, out, settings, args.basis)
        print(summary.model_dump_json(indent=2))
        return 0

    report_path = Path(args.report).expanduser().resolve() if args.report else None
    report = run_verify(args.level, settings, report_path, Path(args.templates).expanduser().resolve())
    for c in report.checks:
        mark = "PASS" if c.passed else "FAIL"
        print(f"{mark} {c.name}: residual={c.max_residual:.3e} threshold={c.threshold:.1e} ({c.seconds:.2f}s) {c.detail}")
    return 0 if report.passed else 1


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return _run(args)
    except NonRealMoment as e:
        print(f"error: {e}", file=sys.stderr)
        print("hint: the extended KD moments should be real for a valid state; "
              "check that the input is Hermitian or loosen --tol / IMKIT_TOL_MOMENT", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (ImkitError, ValidationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as e:
        print(f"error: cannot write output: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
