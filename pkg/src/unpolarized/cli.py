"""Command-line interface.

Usage examples:
    unpolarized cumulative --state fixture:2 --M 2
    unpolarized constellation --state fixture:7/2 > c.json
    unpolarized reconstruct --points c.json
    unpolarized search --S 3 --M 3 --seed 1
    unpolarized fixtures --verify

States are read from a JSON file in the spin_state layout or named with a
``fixture:S`` pseudo-path.  Exit codes: 0 success, 2 invalid input, 3 compute
failure (including a failed fixture verification).
"""

from __future__ import annotations

import argparse
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import io as uio
from .angular import HalfInt
from .design import design_order, moment_residuals
from .fixtures import TABULATED_SPINS, all_fixtures, load_fixture, verify_fixture
from .majorana import constellation, constellation_to_state, q_grid
from .metrology import AxisAngle, orthogonality_angle, rotation_overlap, sensitivity_scan
from .multipole import cumulative_pure, max_value, multipoles
from .search import SEARCH_EPS, SearchConfig, max_killable_order, minimize

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_COMPUTE = 3

SEARCH_NOTE = (
    "numerical multistart search: a value above eps is evidence that no "
    "state reaches zero, not a proof"
)


class InvalidInput(Exception):
    pass


def _halfint(text: str) -> HalfInt:
    try:
        return HalfInt.parse(text)
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def _axis(text: str) -> np.ndarray:
    try:
        parts = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"axis must be x,y,z, got {text!r}") from None
    if len(parts) != 3 or not all(math.isfinite(v) for v in parts) or not any(parts):
        raise argparse.ArgumentTypeError(f"axis must be a nonzero x,y,z triple, got {text!r}")
    return np.array(parts)


def _read_json_file(path: str):
    p = Path(path)
    if not p.is_file():
        raise InvalidInput(f"no such file: {path}")
    try:
        return uio.load_json(p)
    except uio.FormatError as exc:
        raise InvalidInput(f"{path}: {exc}") from None


def load_state(spec: str):
    """A state from ``fixture:S`` or a spin_state JSON file."""
    if spec.startswith("fixture:"):
        try:
            return load_fixture(spec.split(":", 1)[1]).state()
        except (KeyError, ValueError) as exc:
            raise InvalidInput(str(exc).strip("'\"")) from None
    try:
        return uio.state_from_json(_read_json_file(spec))
    except uio.FormatError as exc:
        raise InvalidInput(f"{spec}: {exc}") from None


def load_points(path: str):
    try:
        return uio.constellation_from_json(_read_json_file(path))
    except uio.FormatError as exc:
        raise InvalidInput(f"{path}: {exc}") from None


def _check_M(S: HalfInt, M: int) -> int:
    if not 1 <= M <= S.twice:
        raise InvalidInput(f"--M must satisfy 1 <= M <= 2S = {S.twice}, got {M}")
    return M


class _Out:
    def __init__(self, args):
        self.meta = not getattr(args, "no_meta", False)

    def json(self, obj: dict) -> None:
        if self.meta:
            obj = dict(obj)
            obj["meta"] = {
                "version": __version__,
                "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            }
        sys.stdout.write(uio.dump_json(obj))

    def text(self, text: str) -> None:
        sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------

def cmd_multipoles(args, out: _Out):
    spec = multipoles(load_state(args.state))
    if args.out == "csv":
        out.text(uio.spectrum_to_csv(spec))
    else:
        out.json(uio.spectrum_to_json(spec))


def cmd_cumulative(args, out: _Out):
    state = load_state(args.state)
    M = _check_M(state.S, args.M)
    out.json({
        "S": str(state.S),
        "M": M,
        "A_M": cumulative_pure(state, M),
        "max_value": max_value(state.S, M),
    })


def cmd_constellation(args, out: _Out):
    out.json(uio.constellation_to_json(constellation(load_state(args.state))))


def cmd_reconstruct(args, out: _Out):
    out.json(uio.state_to_json(constellation_to_state(load_points(args.points))))


def cmd_qgrid(args, out: _Out):
    state = load_state(args.state)
    if args.nt < 2 or args.np < 2:
        raise InvalidInput("--nt and --np must be at least 2")
    Q = q_grid(state, args.nt, args.np)
    theta = np.pi * (np.arange(args.nt) + 0.5) / args.nt
    phi = 2 * np.pi * np.arange(args.np) / args.np
    text = uio.qgrid_to_csv(theta, phi, Q)
    if args.out in (None, "-"):
        out.text(text)
    else:
        Path(args.out).write_text(text)


def cmd_design_order(args, out: _Out):
    c = load_points(args.points)
    res = moment_residuals(c, args.tmax)
    out.json({
        "points": len(c),
        "design_order": design_order(c, args.tmax, args.eps),
        "residuals": [{"l": l, "max_abs_moment": r} for l, r in enumerate(res, start=1)],
    })


def _search_cfg(args, M: int) -> SearchConfig:
    return SearchConfig(args.S, M, multistarts=args.starts, max_iters=args.max_iters,
                        rng_seed=args.seed)


def cmd_search(args, out: _Out):
    cfg = _search_cfg(args, _check_M(args.S, args.M))
    res = minimize(cfg)
    out.json({
        "config": cfg.to_dict(),
        "best_value": res.best_value,
        "certified_order": res.certified_order,
        "eps": SEARCH_EPS,
        "starts_converged": res.starts_converged,
        "iterations_total": res.iterations_total,
        "seed": res.seed,
        "state": uio.state_to_json(res.best_state),
        "constellation": uio.constellation_to_json(constellation(res.best_state)),
        "note": SEARCH_NOTE,
    })


def cmd_max_order(args, out: _Out):
    cfg = _search_cfg(args, 1)
    order = max_killable_order(args.S, cfg, args.eps)
    out.json({
        "S": str(args.S),
        "max_order": order,
        "eps": args.eps,
        "config": cfg.to_dict(),
        "note": SEARCH_NOTE,
    })


def cmd_overlap(args, out: _Out):
    state = load_state(args.state)
    r = AxisAngle(args.axis, args.angle)
    report = {
        "S": str(state.S),
        "axis": list(r.axis),
        "angle": r.angle,
        "overlap": rotation_overlap(state, r),
    }
    if args.orthogonality:
        report["orthogonality_angle"] = orthogonality_angle(state, r.axis)
    out.json(report)


def cmd_sensitivity(args, out: _Out):
    state = load_state(args.state)
    scan = sensitivity_scan(state, args.axes, args.seed)
    report = {"S": str(state.S), **scan.summary()}
    if args.table:
        report["table"] = [
            {"axis": [float(v) for v in a], "variance": float(s)}
            for a, s in zip(scan.axes, scan.values)
        ]
    out.json(report)


def cmd_fixtures(args, out: _Out):
    records = []
    failed = False
    for rec in all_fixtures():
        state = rec.state()
        entry = {
            "S": str(rec.S),
            "claimed_M": rec.claimed_M,
            "constellation_name": rec.constellation_name,
            "design_t": rec.design_t,
            "design_relation": rec.design_relation,
            "queens": rec.queens,
            "amplitudes_exact": {str(HalfInt(tm)): str(a) for tm, a in sorted(rec.amplitudes.items())},
            "state": uio.state_to_json(state),
            "constellation": uio.constellation_to_json(constellation(state)),
        }
        if rec.note:
            entry["note"] = rec.note
        if args.verify:
            report = verify_fixture(rec.S)
            entry["verification"] = report.to_dict()
            failed |= not report.passed
        records.append(entry)
    out.json({"fixtures": records})
    if failed:
        raise _ComputeFailure("fixture verification failed")


class _ComputeFailure(Exception):
    pass


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--no-meta", action="store_true", default=argparse.SUPPRESS,
                        help="omit the version/timestamp block from JSON output")

    parser = argparse.ArgumentParser(
        prog="unpolarized",
        description="Polarization multipoles, Majorana constellations and unpolarized states.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    state_help = "state JSON file or fixture:S (tabulated S: %s)" % ", ".join(
        str(s) for s in TABULATED_SPINS
    )

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.set_defaults(func=func)
        return p

    p = add("multipoles", cmd_multipoles, "state multipoles rho_Kq")
    p.add_argument("--state", required=True, help=state_help)
    p.add_argument("--out", choices=["json", "csv"], default="json")

    p = add("cumulative", cmd_cumulative, "A_M and its largest possible value")
    p.add_argument("--state", required=True, help=state_help)
    p.add_argument("--M", type=int, required=True)

    p = add("constellation", cmd_constellation, "Majorana constellation of a state")
    p.add_argument("--state", required=True, help=state_help)

    p = add("reconstruct", cmd_reconstruct, "state from constellation points")
    p.add_argument("--points", required=True, help="constellation JSON or list of [x, y, z]")

    p = add("qgrid", cmd_qgrid, "Q-function on a theta/phi grid as CSV")
    p.add_argument("--state", required=True, help=state_help)
    p.add_argument("--nt", type=int, default=64)
    p.add_argument("--np", type=int, default=128)
    p.add_argument("--out", default="-", help="CSV path, or - for standard output")

    p = add("design-order", cmd_design_order, "spherical t-design order of a point set")
    p.add_argument("--points", required=True)
    p.add_argument("--tmax", type=_positive_int, default=12)
    p.add_argument("--eps", type=float, default=1e-8)

    for name, func, help_text in (
        ("search", cmd_search, "minimize A_M over pure states"),
        ("max-order", cmd_max_order, "largest M for which A_M can be driven to zero"),
    ):
        p = add(name, func, help_text)
        p.add_argument("--S", type=_halfint, required=True, help='spin, e.g. "3" or "7/2"')
        if name == "search":
            p.add_argument("--M", type=int, required=True)
        else:
            p.add_argument("--eps", type=float, default=SEARCH_EPS)
        p.add_argument("--starts", type=_positive_int, default=64)
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--max-iters", type=_positive_int, default=2000)

    p = add("overlap", cmd_overlap, "overlap with the rotated state")
    p.add_argument("--state", required=True, help=state_help)
    p.add_argument("--axis", type=_axis, required=True, help="x,y,z")
    p.add_argument("--angle", type=float, required=True, help="radians")
    p.add_argument("--orthogonality", action="store_true",
                   help="also report the first angle of (near) orthogonality")

    p = add("sensitivity", cmd_sensitivity, "variance of n.S over many axes")
    p.add_argument("--state", required=True, help=state_help)
    p.add_argument("--axes", type=_positive_int, default=2000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--table", action="store_true", help="include the per-axis values")

    p = add("fixtures", cmd_fixtures, "export (and optionally verify) the tabulated states")
    p.add_argument("--verify", action="store_true")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "S", None) is not None and args.S.twice < 1:
        print("error: --S must be at least 1/2", file=sys.stderr)
        return EXIT_INVALID
    out = _Out(args)
    try:
        args.func(args, out)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except _ComputeFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError, ValueError) as exc:
        print(f"error: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
