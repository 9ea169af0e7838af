"""Command-line front end: ``ohara <subcommand> [flags]``.

Exit status is 0 on success, 2 on invalid input and 3 when a numerical
limit does not settle (cutoff sequence or flow).
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .curve import (CurveError, FourierCurve, SampledCurve, make_fourier_curve, embeddedness_constants, is_arclength, length,
                    reparametrize_arclength)
from .decomposition import decompose, q_coefficients
from .energy import EnergyParams, energy
from .flow import FlowConfig, minimize, radius_variation, smoothness_indicator
from .quadrature import DEFAULT_SCHEDULE, ConvergenceError
from .sobolev import seminorm_double_integral, seminorm_fourier, tail_seminorm
from .spectral import coefficients
from .variation import (ARCLENGTH_RTOL, finite_difference_energy, first_variation_arclength,
                        stationarity_residual)

EXIT_OK, EXIT_INVALID, EXIT_DIVERGED = 0, 2, 3


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "yes" if x else "no"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float) and np.isinf(x):
        return "floor" if x > 0 else "-inf"
    return f"{float(x):.12g}"


def kv_block(pairs) -> str:
    return "".join(f"{k}={v if isinstance(v, str) else fmt(v)}\n" for k, v in pairs)


def columns(header, rows) -> str:
    cells = [list(header)] + [[c if isinstance(c, str) else fmt(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in cells)


# -- argument handling ---------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def _schedule(text: str) -> tuple:
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError("eps schedule must be a comma-separated list of numbers")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=2.5)
    common.add_argument("--lambda", dest="lam", type=float, default=0.0)
    common.add_argument("--eps-schedule", type=_schedule, default=DEFAULT_SCHEDULE)
    common.add_argument("--modes", type=int, default=None)
    common.add_argument("--tol", type=float, default=1e-3)
    common.add_argument("--max-iter", type=int, default=500)
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("--curve", type=Path, default=None)
    common.add_argument("--samples", type=int, default=None,
                        help="grid size used when the curve file holds coefficients")
    common.add_argument("--dump-curve", type=Path, default=None)
    common.add_argument("--timings", action="store_true")
    parser = _Parser(prog="ohara", description="O'Hara knot energies and their first variation")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in [
        ("energy", "energy E and its cutoff sequence"),
        ("gradcheck", "first variation against finite differences; stationarity residual"),
        ("decompose", "dE, its leading part alpha Q and the remainder R"),
        ("spectrum", "the symbol coefficients q_k"),
        ("sobolev", "fractional seminorms of the tangent"),
        ("flow", "preconditioned descent on E + lambda L"),
        ("embed-check", "bi-Lipschitz and regularity constants"),
    ]:
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def _params(args, gradient: bool) -> EnergyParams:
    if gradient and not 2.0 < args.alpha < 3.0:
        raise ValueError(f"{args.command} needs alpha in (2, 3), got {args.alpha}")
    return EnergyParams(alpha=args.alpha, lam=args.lam, eps_schedule=args.eps_schedule)


def _curve(args) -> SampledCurve:
    if args.curve is None:
        raise ValueError(f"{args.command} needs --curve")
    obj = io.read(args.curve)
    if isinstance(obj, FourierCurve):
        n = args.samples
        if n is None:
            n = 256
            while n < 4 * obj.K:
                n *= 2
        return make_fourier_curve(obj, n)
    if args.samples is not None and args.samples != obj.n_samples:
        raise CurveError("--samples applies to coefficient files only")
    return obj


def _arclength(curve: SampledCurve) -> tuple[SampledCurve, bool]:
    if is_arclength(curve, ARCLENGTH_RTOL):
        return curve, False
    return reparametrize_arclength(curve), True


def probe_direction(curve: SampledCurve, modes: int = 3, seed: int = 0) -> np.ndarray:
    """Fixed band-limited test direction (seeded) used by gradcheck and decompose."""
    rng = np.random.default_rng(seed)
    u = curve.params
    h = np.zeros(curve.samples.shape)
    for k in range(modes + 1):
        a, b = rng.standard_normal((2, curve.dim)) / (1.0 + k) ** 2
        h += np.outer(np.cos(2 * np.pi * k * u), a) + np.outer(np.sin(2 * np.pi * k * u), b)
    return h


# -- subcommands ----------------------------------------------------------------------

def cmd_energy(args):
    p = _params(args, gradient=False)
    curve = _curve(args)
    ev = energy(curve, p)
    L = length(curve)
    text = kv_block([("alpha", p.alpha), ("N", curve.n_samples), ("dim", curve.dim),
                     ("value", ev.value), ("eps_used", ev.eps_used),
                     ("error_estimate", ev.error_estimate), ("length", L),
                     ("lambda", p.lam), ("energy_plus_length", ev.value + p.lam * L)])
    text += columns(["eps", "E_eps"], ev.per_eps)
    return text, curve


def cmd_gradcheck(args):
    p = _params(args, gradient=True)
    curve, reparam = _arclength(_curve(args))
    K_test = 8 if args.modes is None else args.modes
    h = probe_direction(curve)
    rep = first_variation_arclength(curve, h, p)
    fd = finite_difference_energy(curve, h, p, 1e-4)
    rel = abs(rep.dE - fd) / (1.0 + abs(rep.dE))
    res = stationarity_residual(curve, p, K_test)
    text = kv_block([("alpha", p.alpha), ("lambda", p.lam), ("N", curve.n_samples),
                     ("reparametrized", reparam), ("dE", rep.dE),
                     ("error_estimate", rep.error_estimate), ("finite_difference", fd),
                     ("fd_tau", 1e-4), ("fd_gap", rel), ("fd_ok", rel <= 1e-3),
                     ("dLength", rep.dLength), ("residual_total", rep.residual_total),
                     ("K_test", K_test), ("stationarity_residual", res),
                     ("stationary", res <= args.tol)])
    text += columns(["eps", "dE_eps"], rep.per_eps)
    return text, curve


def cmd_decompose(args):
    p = _params(args, gradient=True)
    curve, reparam = _arclength(_curve(args))
    h = probe_direction(curve)
    d = decompose(curve, h, p, with_kernel=True)
    scale = 1.0 + abs(d.dE)
    text = kv_block([("alpha", p.alpha), ("N", curve.n_samples), ("reparametrized", reparam),
                     ("dE", d.dE), ("alpha_Q", d.alpha_Q), ("R", d.R),
                     ("R_kernel", d.R_kernel),
                     ("kernel_rel_diff", abs(d.R - d.R_kernel) / max(abs(d.R), 1e-300)),
                     ("identity_residual", d.identity_residual),
                     ("identity_ok", d.identity_residual <= 1e-4 * scale)])
    return text, curve


def cmd_spectrum(args):
    p = _params(args, gradient=True)
    K = 32 if args.modes is None else args.modes
    sp = q_coefficients(p, K)
    q = sp.q_array()
    gaps = np.concatenate([np.diff(q), [np.nan]])
    rows = [(k, q[k - 1], "-" if k == K else gaps[k - 1]) for k in range(1, K + 1)]
    text = kv_block([("alpha", p.alpha), ("K", K), ("positivity_ok", sp.positivity_ok),
                     ("tail_flatness", sp.tail_flatness), ("q_K", q[-1]),
                     ("tail_ok", sp.tail_flatness <= 0.1 * q[-1])])
    text += columns(["k", "q_k", "gap"], rows)
    return text, None


def cmd_sobolev(args):
    if not 2.0 <= args.alpha < 3.0:
        raise ValueError(f"alpha must lie in [2, 3), got {args.alpha}")
    curve = _curve(args)
    s = 0.5 * (args.alpha - 1.0)
    d = np.array(curve.derivative)
    a = seminorm_double_integral(d, s)
    b = seminorm_fourier(coefficients(d), s)
    eps = sorted(set(args.eps_schedule) | {0.5}, reverse=True)
    text = kv_block([("alpha", args.alpha), ("s", s), ("N", curve.n_samples),
                     ("seminorm_double_integral", a), ("seminorm_fourier", b),
                     ("rel_diff", abs(a - b) / max(b, 1e-300))])
    text += columns(["eps", "tail_seminorm"], [(e, tail_seminorm(curve, e, args.alpha)) for e in eps])
    return text, curve


def cmd_flow(args):
    p = _params(args, gradient=True)
    initial = _curve(args)
    K = 16 if args.modes is None else args.modes
    cfg = FlowConfig(params=p, K=K, tol_residual=args.tol, max_iter=args.max_iter)
    res = minimize(initial, cfg)
    st = res.state
    mean_r, var_r = radius_variation(st.curve)
    kk = min(64, st.curve.n_samples // 2 - 1)
    try:
        m = smoothness_indicator(st, kk)
    except ValueError:
        m = float("nan")
    text = kv_block([("alpha", p.alpha), ("lambda", p.lam), ("K", K), ("N", st.curve.n_samples),
                     ("converged", res.converged), ("reason", res.reason),
                     ("iterations", st.iter), ("energy", st.energy), ("length", st.length),
                     ("grad_norm", st.grad_norm), ("radius_mean", mean_r),
                     ("radius_variance_ratio", var_r / mean_r), ("decay_exponent", m)])
    text += columns(["iter", "energy", "length", "grad_norm", "step"],
                    [(s.iter, s.energy, s.length, s.grad_norm, s.step) for s in res.trajectory])
    if not res.converged:
        raise _Diverged(text, st.curve, res.reason)
    return text, st.curve


def cmd_embed_check(args):
    curve = _curve(args)
    rep = embeddedness_constants(curve)
    text = kv_block([("N", curve.n_samples), ("dim", curve.dim), ("length", length(curve)),
                     ("c_biLip", rep.c_bilip), ("c_reg", rep.c_reg),
                     ("attained_u", rep.attained_at[0]), ("attained_w", rep.attained_at[1]),
                     ("embedded", rep.c_bilip > 0.0 and rep.c_reg > 0.0)])
    return text, curve


COMMANDS = {"energy": cmd_energy, "gradcheck": cmd_gradcheck, "decompose": cmd_decompose,
            "spectrum": cmd_spectrum, "sobolev": cmd_sobolev, "flow": cmd_flow,
            "embed-check": cmd_embed_check}


class _Diverged(Exception):
    def __init__(self, text, curve, reason):
        super().__init__(reason)
        self.text, self.curve = text, curve


def _emit(args, text: str, curve, started: float) -> None:
    if args.timings:
        text += f"time_seconds={time.perf_counter() - started:.3f}\n"
    if args.dump_curve is not None and curve is not None:
        io.write_curve(args.dump_curve, curve)
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    started = time.perf_counter()
    args = build_parser().parse_args(argv)
    try:
        text, curve = COMMANDS[args.command](args)
    except _Diverged as exc:
        _emit(args, exc.text, exc.curve, started)
        print(f"error: flow did not converge: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (CurveError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(args, text, curve, started)
    return EXIT_OK


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
