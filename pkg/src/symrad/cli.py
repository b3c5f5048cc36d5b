"""``symrad`` command-line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical guard.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
import warnings
from pathlib import Path

import numpy as np

from . import fileio
from .errors import SymradError, ValidationError
from .gaussian import MomentTriple, pauli_recover, profile_K_oracle, wavepacket_from_moments
from .radon import inverse_radon, radon_profile, sinogram
from .states import Axis, GaussianState, l2_norm, sample_gaussian
from .symplectic import RadonFrame, make_frame
from .wigner import gaussian_wigner, sample_wigner, wigner

COMMANDS = ("gaussian", "wigner", "radon", "sinogram", "invert", "pauli", "validate", "export")


def parse_matrix(value, name: str) -> np.ndarray:
    """Row-major comma list ("1,0,0,1"), a scalar, or a nested list from JSON."""
    if isinstance(value, str):
        try:
            flat = np.array([float(v) for v in value.split(",")])
        except ValueError:
            raise ValidationError(f"--{name}: cannot parse {value!r} as a comma list of reals") from None
    else:
        flat = np.asarray(value, dtype=float).ravel()
    n = math.isqrt(flat.size)
    if n * n != flat.size or n == 0:
        raise ValidationError(f"--{name}: {flat.size} entries do not form a square matrix")
    return flat.reshape(n, n)


def parse_axes(values, n: int, name: str) -> tuple[Axis, ...]:
    if values is None:
        raise ValidationError(f"--{name} is required")
    if isinstance(values, (str, Axis)):
        values = [values]
    axes = tuple(v if isinstance(v, Axis) else Axis.parse(str(v)) for v in values)
    if len(axes) == 1 and n > 1:
        axes = axes * n
    if len(axes) != n:
        raise ValidationError(f"--{name}: got {len(axes)} axes for n = {n}")
    return axes


def load_frame(args) -> RadonFrame:
    if args.frame:
        return RadonFrame.from_json(json.loads(Path(args.frame).read_text()))
    if args.A is None or args.B is None:
        raise ValidationError("a frame needs --A and --B or --frame FILE")
    return make_frame(parse_matrix(args.A, "A"), parse_matrix(args.B, "B"))


def parse_oracle(text: str, hbar: float) -> GaussianState:
    parts = text.split(":")
    if len(parts) != 3 or parts[0] != "gaussian":
        raise ValidationError(f"--oracle must look like gaussian:V:W, got {text!r}")
    try:
        V, W = float(parts[1]), float(parts[2])
    except ValueError:
        raise ValidationError(f"--oracle: cannot parse {text!r}") from None
    return GaussianState([[V]], [[W]], hbar)


def _out(args) -> Path:
    if not args.output:
        raise ValidationError("an output path (-o) is required")
    return Path(args.output)


def cmd_gaussian(args) -> str:
    if args.state:
        g = GaussianState.from_json(json.loads(Path(args.state).read_text()))
    else:
        g = GaussianState(parse_matrix(args.V, "V"), parse_matrix(args.W, "W"), float(args.hbar))
    psi = sample_gaussian(g, parse_axes(args.axis, g.n, "axis"))
    fileio.write_wf1(_out(args), psi)
    return f"norm={l2_norm(psi):.6f}"


def cmd_wigner(args) -> str:
    psi = fileio.read_wf1(args.input)
    p_axes = parse_axes(args.p, psi.n, "p") if args.p else None
    Wf = wigner(psi, p_axes)
    fileio.write_wg1(_out(args), Wf)
    return f"integral={Wf.integral():.6f} min={Wf.values.min():.6e} max={Wf.values.max():.6e}"


def cmd_radon(args) -> str:
    psi = fileio.read_wf1(args.input)
    f = load_frame(args)
    X_axes = parse_axes(args.X, psi.n, "X") if args.X else None
    prof = radon_profile(psi, f, X_axes)
    _out(args).write_text(fileio.profile_csv(prof))
    return f"integral={prof.integral():.6f} min={prof.values.min():.6e} max={prof.values.max():.6e}"


def cmd_sinogram(args) -> str:
    psi = fileio.read_wf1(args.input)
    X = parse_axes(args.X, 1, "X")[0] if args.X else None
    s = sinogram(psi, int(args.angles), X)
    fileio.write_sinogram_csv(_out(args), s)
    mass = s.values.sum(axis=1) * s.X_axis.h
    return f"angles={s.angles.size} mass_min={mass.min():.6f} mass_max={mass.max():.6f}"


def cmd_invert(args) -> str:
    hbar = float(args.hbar)
    s = fileio.read_sinogram_csv(args.input, hbar)
    x_axis = parse_axes(args.x, 1, "x")[0]
    p_axis = parse_axes(args.p, 1, "p")[0]
    rec = inverse_radon(s, x_axis, p_axis, window=args.window)
    fileio.write_wg1(_out(args), rec)
    summary = f"integral={rec.integral():.6f} min={rec.values.min():.6e} max={rec.values.max():.6e}"
    if args.oracle:
        g = parse_oracle(args.oracle, hbar)
        ref = sample_wigner(gaussian_wigner(g)[0], (x_axis,), (p_axis,), hbar).values
        err = np.linalg.norm(rec.values - ref) / np.linalg.norm(ref)
        summary += f" rel_l2_error={err:.6e}"
    return summary


def cmd_pauli(args) -> str:
    if args.input:
        psi = fileio.read_wf1(args.input)
        if psi.n != 1:
            raise ValidationError("pauli recovery needs an n = 1 state")
        if args.sxx is not None:
            sxx = float(args.sxx)
        else:
            x = psi.axes[0].points
            rho = psi.density()
            sxx = float((x * x * rho).sum() / rho.sum())
        hbar = psi.hbar
    else:
        if args.moments:
            m = MomentTriple.from_json(json.loads(Path(args.moments).read_text()))
        else:
            if args.sxx is None or args.sxp is None:
                raise ValidationError("pauli needs -i FILE, --moments FILE or --sxx and --sxp")
            m = MomentTriple.saturated(float(args.sxx), float(args.sxp), float(args.hbar))
        axis = parse_axes(args.axis, 1, "axis")[0]
        psi = sample_gaussian(wavepacket_from_moments(m), (axis,))
        sxx, hbar = m.sigma_xx, m.hbar
    oracle = profile_K_oracle(psi)
    sxp = pauli_recover(oracle, sxx, hbar, a_max=float(args.a_max))
    k_min = oracle(-sxp / sxx, 1.0)
    return f"sigma_xx={sxx:.6f} sigma_xp={sxp:.6f} K_min={k_min:.6f}"


def cmd_validate(args) -> str:
    from .validation import run_all

    results = run_all()
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise _ValidationFailed(f"{len(failed)} of {len(results)} invariants failed")
    return f"passed={len(results)}/{len(results)}"


class _ValidationFailed(SymradError):
    exit_code = 3


def cmd_export(args) -> str:
    kind = fileio.sniff(args.input)
    if kind == "wf1":
        psi = fileio.read_wf1(args.input)
        text, rows = fileio.wf1_csv(psi), psi.values.size
    else:
        Wf = fileio.read_wg1(args.input)
        text, rows = fileio.wg1_csv(Wf), Wf.values.size
    _out(args).write_text(text)
    return f"rows={rows}"


HANDLERS = {
    "gaussian": cmd_gaussian,
    "wigner": cmd_wigner,
    "radon": cmd_radon,
    "sinogram": cmd_sinogram,
    "invert": cmd_invert,
    "pauli": cmd_pauli,
    "validate": cmd_validate,
    "export": cmd_export,
}


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="symrad", description="Symplectic Radon transforms of quantum states.")
    parser.add_argument("--config", help="JSON file of option values (command-line flags take precedence)")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    subs = {}

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help=argparse.SUPPRESS)
        subs[name] = p
        return p

    p = add("gaussian", "sample a centred Gaussian psi_{V,W} to a WF1 file")
    p.add_argument("--V", default="1")
    p.add_argument("--W", default="0")
    p.add_argument("--hbar", default=1.0, type=float)
    p.add_argument("--state", help="JSON {V, W, hbar} instead of --V/--W/--hbar")
    p.add_argument("--axis", action="append", help="min:max:count, once per dimension or once for all")
    p.add_argument("-o", "--output")

    p = add("wigner", "Wigner transform of a WF1 state to a WG1 grid")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--p", action="append", help="momentum axis min:max:count")
    p.add_argument("-o", "--output")

    p = add("radon", "Radon profile R(X, A, B) of a WF1 state to CSV")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--A")
    p.add_argument("--B")
    p.add_argument("--frame", help='JSON {"n", "A", "B"}')
    p.add_argument("--X", action="append", help="profile axis min:max:count")
    p.add_argument("-o", "--output")

    p = add("sinogram", "n = 1 sinogram over theta in [0, pi) to CSV")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--angles", type=int, default=180)
    p.add_argument("--X", help="profile axis min:max:count")
    p.add_argument("-o", "--output")

    p = add("invert", "filtered backprojection of a sinogram CSV to WG1")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--x", default="-5:5:128")
    p.add_argument("--p", default="-5:5:128")
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--window", choices=("hann", "none"), default="hann")
    p.add_argument("--oracle", help="gaussian:V:W, report the relative L2 error against its Wigner function")
    p.add_argument("-o", "--output")

    p = add("pauli", "recover sigma_xp from Radon profiles at b = 1")
    p.add_argument("-i", "--input", help="WF1 state (sigma_xx from its position density unless --sxx)")
    p.add_argument("--moments", help='JSON {"sxx", "spp", "sxp", "hbar"}')
    p.add_argument("--sxx", type=float)
    p.add_argument("--sxp", type=float)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--axis", default="-8:8:256")
    p.add_argument("--a-max", dest="a_max", type=float, default=8.0)

    add("validate", "run the cross-route invariant suite")

    p = add("export", "WF1/WG1 to lossless CSV")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output")
    return parser, subs


def _apply_config(argv: list[str], parser, subs) -> list[str]:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    try:
        cfg = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ValidationError("config must be a JSON object")
    cfg = dict(cfg)
    command = cfg.pop("command", None)
    if not any(a in COMMANDS for a in argv):
        if command is None:
            raise ValidationError("config has no 'command' and none was given")
        argv = [command] + argv
    name = next(a for a in argv if a in COMMANDS)
    if name not in subs:
        raise ValidationError(f"unknown command {name!r}")
    dests = {a.dest for a in subs[name]._actions}
    unknown = set(cfg) - dests
    if unknown:
        raise ValidationError(f"unknown config keys for {name}: {sorted(unknown)}")
    # required flags satisfied by the config become optional
    for action in subs[name]._actions:
        if action.dest in cfg:
            action.required = False
    subs[name].set_defaults(**cfg)
    return argv


def _merge_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--axis -8:8:256`` into ``--axis=-8:8:256`` so argparse does not read a flag."""
    out: list[str] = []
    for tok in argv:
        if (out and re.match(r"^-[\d.]", tok) and out[-1].startswith("-")
                and "=" not in out[-1] and not re.match(r"^-[\d.]", out[-1])):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = _merge_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser, subs = build_parser()
    try:
        argv = _apply_config(argv, parser, subs)
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_help()
            return 2
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            summary = HANDLERS[args.command](args)
        for w in caught:
            print(f"warning: {w.category.__name__}: {w.message}", file=sys.stderr)
        print(summary)
    except SymradError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
