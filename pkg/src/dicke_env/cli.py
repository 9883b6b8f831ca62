"""Command-line front end: concurrence scans, environment runs, predictions and self-checks.

All frequencies are in units of g except the ``--g-hz`` / ``--delta-mean-hz``
path of ``predict``. Output is CSV (12 significant digits, LF line endings,
``#`` metadata block) or a minimal SVG.
"""

from __future__ import annotations

import argparse
import io
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .approx import collapse_revival_times, concurrence_gaussian, physical_feasibility
from .concurrence import PROJ_PSI_PLUS, spin_flip, wootters_concurrence
from .dicke import DickeParams, analytic_concurrence, concurrence_heatmap, exact_concurrence
from .env_dynamics import InitKind, Method, concurrence_sum, evolve_reduced, psi_plus_weight
from .env_model import EnvironmentSpec, closed_form_u, configuration, effective_hamiltonian, make_environment
from .errors import (
    ConstraintUnsatisfiable,
    DickeEnvError,
    DimensionGuardExceeded,
    TooManyConfigurations,
)
from .linalg import HermitianPropagator
from .quantum_core import SystemLayout, basis_state

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3
EXIT_VALIDATION = 4

REFERENCE_RUN = {"A": 7, "g_tilde": 1.0, "delta_mean": 10.0, "delta_std": 0.3, "seed": 1}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    gt_max: float = 15.0
    steps: int = 600
    methods: tuple[str, ...] = ("analytic_sum",)
    A: int = REFERENCE_RUN["A"]
    g_tilde: float = REFERENCE_RUN["g_tilde"]
    delta_mean: float = REFERENCE_RUN["delta_mean"]
    delta_std: float = REFERENCE_RUN["delta_std"]
    seed: int | None = REFERENCE_RUN["seed"]
    init: str = InitKind.GROUND_PHOTON.value
    n_range: tuple[int, int] = (0, 20)
    n_max: int | None = None
    gap_factor: float = 0.0
    samples: int | None = None
    lab_frame: bool = False
    out: str | None = None
    fmt: str = "csv"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.steps < 2:
            raise ConfigError("--steps must be at least 2")
        if not self.gt_max > 0:
            raise ConfigError("--gt-max must be positive")
        if not self.methods:
            raise ConfigError("--methods must name at least one method")
        bad = [m for m in self.methods if m not in {x.value for x in Method}]
        if bad:
            raise ConfigError(f"unknown method(s): {', '.join(bad)}")
        if self.n_range[0] < 0 or self.n_range[1] < self.n_range[0]:
            raise ConfigError("photon-number range must satisfy 0 <= n_min <= n_max")
        if self.A < 0:
            raise ConfigError("--A must be non-negative")

    @property
    def gt_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.gt_max, self.steps)


# ---------------------------------------------------------------- output

def fmt_num(x) -> str:
    return format(float(x) + 0.0, ".12g")


def csv_text(meta: dict, header: list[str], columns: list[np.ndarray], int_cols: tuple[int, ...] = ()) -> str:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}: {value}\n")
    buf.write(",".join(header) + "\n")
    rows = np.column_stack(columns) if columns else np.zeros((0, 0))
    for row in rows:
        cells = [str(int(v)) if i in int_cols else fmt_num(v) for i, v in enumerate(row)]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def _svg_open(width: int, height: int, meta: dict) -> list[str]:
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        "<desc>",
    ]
    lines += [f"{k}: {v}".replace("&", "&amp;").replace("<", "&lt;") for k, v in meta.items()]
    lines.append("</desc>")
    lines.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>')
    return lines


def svg_heatmap(n_values: list[int], gt: np.ndarray, values: np.ndarray, meta: dict) -> str:
    """Grayscale cells, one row per n; black is concurrence 1."""
    cell_w = max(1.0, 800.0 / gt.size)
    cell_h = max(4.0, 400.0 / len(n_values))
    width = int(np.ceil(cell_w * gt.size)) + 60
    height = int(np.ceil(cell_h * len(n_values))) + 40
    lines = _svg_open(width, height, meta)
    for r, n in enumerate(n_values):
        y = 10 + r * cell_h
        lines.append(f'<text x="4" y="{y + 0.8 * cell_h:.2f}" font-size="{min(10, cell_h):.1f}">{n}</text>')
        for c in range(gt.size):
            level = int(round(255 * (1.0 - np.clip(values[r, c], 0.0, 1.0))))
            lines.append(
                f'<rect x="{50 + c * cell_w:.2f}" y="{y:.2f}" width="{cell_w:.2f}" height="{cell_h:.2f}" '
                f'fill="rgb({level},{level},{level})"/>'
            )
    lines.append(f'<text x="50" y="{height - 8}" font-size="10">gt 0 .. {fmt_num(gt[-1])}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


SVG_STROKES = ("black", "#d62728", "#1f77b4", "#2ca02c")


def svg_traces(gt: np.ndarray, traces: dict[str, np.ndarray], meta: dict) -> str:
    width, height, pad = 900, 360, 40
    lines = _svg_open(width, height, meta)
    span = gt[-1] - gt[0] or 1.0
    lines.append(
        f'<rect x="{pad}" y="{pad // 2}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        f'fill="none" stroke="gray"/>'
    )
    for i, (name, values) in enumerate(traces.items()):
        xs = pad + (gt - gt[0]) / span * (width - 2 * pad)
        ys = pad // 2 + (1.0 - np.clip(values, 0.0, 1.0)) * (height - 2 * pad)
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
        colour = SVG_STROKES[i % len(SVG_STROKES)]
        lines.append(f'<polyline fill="none" stroke="{colour}" stroke-width="0.8" points="{pts}"/>')
        lines.append(f'<text x="{pad + 10 + 120 * i}" y="{height - 8}" font-size="11" fill="{colour}">{name}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------- commands

def cmd_dicke_scan(cfg: RunConfig) -> int:
    n_values = list(range(cfg.n_range[0], cfg.n_range[1] + 1))
    gt = cfg.gt_grid
    rows = concurrence_heatmap(n_values, gt)
    meta = {
        "command": "dicke-scan",
        "version": __version__,
        "n_min": cfg.n_range[0],
        "n_max": cfg.n_range[1],
        "gt_max": fmt_num(cfg.gt_max),
        "steps": cfg.steps,
        "g": 1,
    }
    if cfg.fmt == "svg":
        text = svg_heatmap(n_values, gt, rows[:, 2].reshape(len(n_values), gt.size), meta)
    else:
        text = csv_text(meta, ["n", "gt", "concurrence"], [rows[:, 0], rows[:, 1], rows[:, 2]], int_cols=(0,))
    emit(text, cfg.out)
    return EXIT_OK


def build_environment(cfg: RunConfig) -> EnvironmentSpec:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return make_environment(cfg.A, cfg.g_tilde, cfg.delta_mean, cfg.delta_std, cfg.seed, cfg.gap_factor)


def env_traces(cfg: RunConfig, spec: EnvironmentSpec) -> dict[str, np.ndarray]:
    gt = cfg.gt_grid
    init = InitKind.parse(cfg.init)
    traces = {}
    for name in cfg.methods:
        method = Method(name)
        if method is Method.ANALYTIC_SUM:
            traces[name] = concurrence_sum(spec, 1.0, init, gt, samples=cfg.samples, seed=cfg.seed)
        elif method is Method.GAUSSIAN:
            if cfg.A < 1:
                raise ConfigError("the gaussian method needs --A >= 1")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                traces[name] = concurrence_gaussian(
                    cfg.g_tilde, cfg.delta_mean, cfg.A, init, gt, delta_std=cfg.delta_std
                ).values
        else:
            lab = cfg.lab_frame and method is Method.EFFECTIVE
            _, traces[name] = evolve_reduced(spec, 1.0, init, gt, method, n_max=cfg.n_max, lab_frame=lab)
    return traces


def cmd_env_run(cfg: RunConfig) -> int:
    spec = build_environment(cfg)
    traces = env_traces(cfg, spec)
    meta = {
        "command": "env-run",
        "version": __version__,
        "A": cfg.A,
        "g": 1,
        "g_tilde": fmt_num(cfg.g_tilde),
        "delta_mean": fmt_num(cfg.delta_mean),
        "delta_std": fmt_num(cfg.delta_std),
        "seed": cfg.seed,
        "gap_factor": fmt_num(cfg.gap_factor),
        "init": InitKind.parse(cfg.init).value,
        "gt_max": fmt_num(cfg.gt_max),
        "steps": cfg.steps,
        "methods": ",".join(cfg.methods),
        "n_max": "default" if cfg.n_max is None else cfg.n_max,
        "samples": "exhaustive" if cfg.samples is None else cfg.samples,
        "lab_frame": cfg.lab_frame,
        "deltas": ",".join(fmt_num(d) for d in spec.deltas),
    }
    gt = cfg.gt_grid
    if cfg.fmt == "svg":
        text = svg_traces(gt, traces, meta)
    else:
        text = csv_text(meta, ["gt", *traces], [gt, *traces.values()])
    emit(text, cfg.out)
    return EXIT_OK


def cmd_predict(cfg: RunConfig) -> int:
    k_max = int(cfg.extra.get("k_max", 1))
    if k_max < 1:
        raise ConfigError("--k-max must be at least 1")
    if cfg.A < 1:
        raise ConfigError("predictions need --A >= 1")
    gt_c, gt_r = collapse_revival_times(cfg.g_tilde, cfg.delta_mean, cfg.A, k_max)
    lines = [
        f"A: {cfg.A}",
        f"g_tilde: {fmt_num(cfg.g_tilde)}",
        f"delta_mean: {fmt_num(cfg.delta_mean)}",
        f"gt_c: {fmt_num(gt_c)}",
    ]
    lines += [f"gt_R[{k}]: {fmt_num(v)}" for k, v in enumerate(gt_r, start=1)]
    g_hz = cfg.extra.get("g_hz")
    if g_hz is not None:
        delta_hz = cfg.extra.get("delta_mean_hz")
        if delta_hz is None:
            raise ConfigError("--g-hz needs --delta-mean-hz")
        phys = physical_feasibility(g_hz, delta_hz, cfg.extra.get("g_tilde_hz"), cfg.A, k_max)
        lines.append(f"g_hz: {fmt_num(g_hz)}")
        lines.append(f"delta_mean_hz: {fmt_num(delta_hz)}")
        lines.append(f"phys_gt_c: {fmt_num(phys['gt_c'])}")
        lines.append(f"t_c_s: {fmt_num(phys['t_c_s'])}")
        lines += [f"t_R_s[{k}]: {fmt_num(v)}" for k, v in enumerate(phys["t_R_s"], start=1)]
    emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------- validation

def _textbook_concurrence(rho: np.ndarray) -> float:
    # sqrt of the eigenvalues of rho rho~, independent of the factor-based route
    lam = np.sqrt(np.abs(np.linalg.eigvals(rho @ spin_flip(rho))))
    lam = np.sort(lam)[::-1]
    return max(0.0, lam[0] - lam[1:].sum())


def _local_unitary(a: float, b: float, c: float) -> np.ndarray:
    # exp(-i a sz) exp(-i b sy) exp(-i c sz) in closed form
    ry = np.array([[np.cos(b / 2), -np.sin(b / 2)], [np.sin(b / 2), np.cos(b / 2)]])
    return np.diag(np.exp([-0.5j * a, 0.5j * a])) @ ry @ np.diag(np.exp([-0.5j * c, 0.5j * c]))


def validation_checks() -> list[tuple[str, float, str, bool]]:
    """(name, measured value, threshold text, passed) for every self-check."""
    checks = []

    def bound(name, dev, thr):
        checks.append((name, dev, f"<= {thr:g}", bool(dev <= thr)))

    # Werner-type mixtures under fixed complex local unitaries: C = max(0, (3p - 1)/2)
    p = np.linspace(0, 1, 41)
    local = np.kron(_local_unitary(0.3, 1.1, -0.7), _local_unitary(-1.2, 0.4, 2.0))
    werner = [local @ (pp * PROJ_PSI_PLUS + (1 - pp) * np.eye(4) / 4) @ local.conj().T for pp in p]
    expected = np.maximum(0.0, (3 * p - 1) / 2)
    dev = max(abs(_textbook_concurrence(r) - e) for r, e in zip(werner, expected))
    bound("concurrence_werner_spin_flip", dev, 1e-6)
    dev = max(abs(wootters_concurrence(r) - e) for r, e in zip(werner, expected))
    bound("concurrence_werner", dev, 1e-10)

    gt = np.linspace(0, 4 * np.pi, 200)
    dev = max(
        float(np.max(np.abs(analytic_concurrence(DickeParams(n), gt) - exact_concurrence(DickeParams(n), gt))))
        for n in range(1, 7)
    )
    bound("dicke_analytic_vs_exact", dev, 1e-8)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        empty = EnvironmentSpec(1.0, ())
        gt = np.linspace(0, 20, 201)
        for init in InitKind:
            _, exact = evolve_reduced(empty, 1.0, init, gt, Method.EXACT_FULL)
            dev = float(np.max(np.abs(concurrence_sum(empty, 1.0, init, gt) - exact)))
            bound(f"A0_analytic_vs_exact[{init.value}]", dev, 1e-8)

        spec4 = make_environment(4, 1.0, 20.0, 0.5, seed=7, gap_factor=0.0)
        for init in InitKind:
            _, eff = evolve_reduced(spec4, 1.0, init, gt, Method.EFFECTIVE)
            ana = psi_plus_weight(spec4, 1.0, init, gt, exact_amplitudes=True)
            bound(f"A4_analytic_vs_effective[{init.value}]", float(np.max(np.abs(ana - eff))), 1e-8)

        ref_env = make_environment(gap_factor=0.0, **REFERENCE_RUN)
        grid = np.linspace(0, 450, 901)
        c1 = concurrence_sum(ref_env, 1.0, InitKind.GROUND_PHOTON, grid)
        c2 = concurrence_sum(ref_env, 1.0, InitKind.SYMMETRIC_VACUUM, grid)
        bound("c1_plus_c2", float(np.max(np.abs(c1 + c2 - 1.0))), 1e-12)

        layout = SystemLayout(1, 4)
        h = effective_hamiltonian(spec4, 1.0, layout)
        dev = 0.0
        for s in ((0.5, -0.5, 0.5, 0.5), (-0.5, -0.5, -0.5, -0.5), (0.5, 0.5, -0.5, 0.5)):
            env = tuple(1 if x > 0 else 0 for x in s)
            idx = [int(np.argmax(np.abs(basis_state(layout, a, b, n, env)))) for a, b, n in ((0, 0, 1), (1, 0, 0), (0, 1, 0))]
            prop = HermitianPropagator(h[np.ix_(idx, idx)])
            for t in (0.7, 5.3, 31.0):
                u_num = np.column_stack([prop.evolve(e, t) for e in np.eye(3)])
                dev = max(dev, float(np.max(np.abs(closed_form_u(configuration(spec4, s), t) - u_num))))
        bound("closed_form_u", dev, 1e-9)

        # effective vs full deviation should shrink ~4x when the mean detuning doubles
        gt = np.linspace(0, 20, 201)
        offsets = np.random.default_rng(7).standard_normal(4)
        devs = []
        for dm in (20.0, 40.0):
            spec = EnvironmentSpec(1.0, tuple(dm + 0.5 * offsets), gap_factor=0.0)
            full, _ = evolve_reduced(spec, 1.0, InitKind.GROUND_PHOTON, gt, Method.EXACT_FULL)
            eff, _ = evolve_reduced(spec, 1.0, InitKind.GROUND_PHOTON, gt, Method.EFFECTIVE, lab_frame=True)
            devs.append(float(np.max(np.abs(full - eff))))
        ratio = devs[0] / devs[1]
        checks.append(("eps2_scaling_ratio", ratio, "in [2.5, 6]", bool(2.5 <= ratio <= 6.0)))
    return checks


def cmd_validate(cfg: RunConfig) -> int:
    checks = validation_checks()
    lines = ["check,value,threshold,status"]
    lines += [f"{name},{fmt_num(v)},{thr},{'PASS' if ok else 'FAIL'}" for name, v, thr, ok in checks]
    emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK if all(c[3] for c in checks) else EXIT_VALIDATION


# ---------------------------------------------------------------- argument parsing

def _methods(text: str) -> tuple[str, ...]:
    return tuple(m.strip() for m in text.split(",") if m.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dicke-env", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    io_args = argparse.ArgumentParser(add_help=False)
    io_args.add_argument("--out", default=None, help="output path (default: stdout)")
    io_args.add_argument("--format", dest="fmt", choices=("csv", "svg"), default="csv")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--gt-max", type=float, default=None)
    grid.add_argument("--steps", type=int, default=None, help="number of grid points, both ends included")

    env = argparse.ArgumentParser(add_help=False)
    env.add_argument("--A", type=int, default=REFERENCE_RUN["A"], help="number of environment atoms")
    env.add_argument("--g-tilde", type=float, default=REFERENCE_RUN["g_tilde"])
    env.add_argument("--delta-mean", type=float, default=REFERENCE_RUN["delta_mean"])
    env.add_argument("--delta-std", type=float, default=REFERENCE_RUN["delta_std"])

    p = sub.add_parser("dicke-scan", parents=[io_args, grid], help="concurrence heatmap over photon number and gt")
    p.add_argument("--n-min", type=int, default=0)
    p.add_argument("--n-max", type=int, default=20)

    p = sub.add_parser("env-run", parents=[io_args, grid, env], help="concurrence trace with an environment")
    p.add_argument("--seed", type=int, default=REFERENCE_RUN["seed"])
    p.add_argument("--init", default=InitKind.GROUND_PHOTON.value, choices=[k.value for k in InitKind])
    p.add_argument("--methods", type=_methods, default=("analytic_sum",), help="comma-separated: " + ",".join(m.value for m in Method))
    p.add_argument("--n-max", type=int, default=None, help="photon cutoff override for state-vector methods")
    p.add_argument("--gap-factor", type=float, default=0.0, help="minimum detuning separation in units of g")
    p.add_argument("--samples", type=int, default=None, help="Monte Carlo configurations (default: all)")
    p.add_argument("--lab-frame", action="store_true", help="rotate effective evolution back to the lab frame")

    p = sub.add_parser("predict", parents=[io_args, env], help="collapse and revival times")
    p.add_argument("--k-max", type=int, default=1)
    p.add_argument("--g-hz", type=float, default=None, help="g/2pi in Hz")
    p.add_argument("--delta-mean-hz", type=float, default=None, help="mean detuning /2pi in Hz")
    p.add_argument("--g-tilde-hz", type=float, default=None, help="environment coupling /2pi in Hz (default g)")

    sub.add_parser("validate", parents=[io_args], help="cross-method self-checks")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    common = {"subcommand": args.command, "out": args.out, "fmt": args.fmt}
    if args.command == "dicke-scan":
        return RunConfig(
            **common,
            gt_max=15.0 if args.gt_max is None else args.gt_max,
            steps=600 if args.steps is None else args.steps,
            n_range=(args.n_min, args.n_max),
        )
    if args.command == "env-run":
        return RunConfig(
            **common,
            gt_max=450.0 if args.gt_max is None else args.gt_max,
            steps=4500 if args.steps is None else args.steps,
            methods=args.methods,
            A=args.A,
            g_tilde=args.g_tilde,
            delta_mean=args.delta_mean,
            delta_std=args.delta_std,
            seed=args.seed,
            init=args.init,
            n_max=args.n_max,
            gap_factor=args.gap_factor,
            samples=args.samples,
            lab_frame=args.lab_frame,
        )
    if args.command == "predict":
        if args.fmt != "csv":
            raise ConfigError("predict writes a text report; --format svg is not supported")
        extra = {
            "k_max": args.k_max,
            "g_hz": args.g_hz,
            "delta_mean_hz": args.delta_mean_hz,
            "g_tilde_hz": args.g_tilde_hz,
        }
        return RunConfig(
            **common, A=args.A, g_tilde=args.g_tilde, delta_mean=args.delta_mean, delta_std=args.delta_std, extra=extra
        )
    if args.fmt != "csv":
        raise ConfigError("validate writes a text report; --format svg is not supported")
    return RunConfig(**common)


COMMANDS = {
    "dicke-scan": cmd_dicke_scan,
    "env-run": cmd_env_run,
    "predict": cmd_predict,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.subcommand](cfg)
    except (DimensionGuardExceeded, ConstraintUnsatisfiable, TooManyConfigurations) as exc:
        print(f"dicke-env: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigError, DickeEnvError, ValueError, OSError) as exc:
        print(f"dicke-env: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
