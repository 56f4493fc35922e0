"""Command-line front end: parameter grids in, CSV or JSON tables out.

Every subcommand evaluates a Cartesian grid of points, one row per point,
in grid order.  A failing point yields a row with an ``error`` string and
NaN outputs.  Exit codes: 0 success, 2 usage error, 3 every row failed,
4 some rows failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .adiabatic import bounds_suite, correlation_breakdown
from .dicke import irregular_faces
from .ellipse import DEFAULT_SIGMAS, correlation_samples, fit_ellipse
from .functionals import constrained_optimizer, levy_lieb
from .params import (
    BoundaryError,
    BracketError,
    ConvergenceError,
    ConvergenceOptions,
    DegenerateGroundStateError,
    DensityPair,
    ExternalPair,
    FitError,
    ModelParams,
    ParameterError,
    UnsupportedSizeError,
)
from .observables import expectations_from_vector
from .photon_free import compare_pf, estimate_eta, v_dc_exact, v_dc_photon_free
from .quadrature import QuadratureSpec
from .spectra import ground_state

EXIT_OK, EXIT_USAGE, EXIT_CONVERGENCE, EXIT_PARTIAL = 0, 2, 3, 4
THREADS_ENV = "QEDFT_THREADS"
ROW_ERRORS = (ConvergenceError, DegenerateGroundStateError, BoundaryError, BracketError, FitError, ParameterError)

# flag names double as config-file keys
KEYS = ("omega", "t", "g", "lambda", "v", "j", "sigma", "xi", "nmax", "quad-nodes", "tol",
        "out", "format", "threads", "sites", "table")
DEFAULTS = {"omega": "1", "t": "1", "g": "0", "lambda": "1", "v": "0", "j": "0", "sigma": "0", "xi": "0",
            "nmax": "1280", "quad-nodes": "65", "tol": "1e-10", "out": "-", "format": "csv", "sites": "2",
            "table": "potential"}


class UsageError(ValueError):
    """Malformed flags, config or grids."""


# ---------------------------------------------------------------- parsing

def parse_grid(text: str) -> list[float]:
    """Scalar, comma list, or inclusive ``min:max:step`` range."""
    text = str(text).strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise UsageError(f"range must be min:max:step, got {text!r}")
            lo, hi, step = (float(x) for x in parts)
            if not step > 0:
                raise UsageError(f"range step must be > 0, got {text!r}")
            count = math.floor((hi - lo) / step + 1e-9) + 1
            return [lo + k * step for k in range(max(count, 0))]
        if text == "":
            return []
        return [float(x) for x in text.split(",")]
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"cannot parse grid {text!r}") from exc


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in KEYS:
            raise UsageError(f"{path}:{num}: unknown key {key!r}")
        out[key] = value
    return out


def write_config(config: dict[str, str]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in config.items() if v is not None)


@dataclass
class RunConfig:
    """Resolved settings of one invocation; ``raw`` is the re-runnable echo."""

    command: str
    raw: dict[str, str | None]
    params: ModelParams
    opts: ConvergenceOptions
    quad: QuadratureSpec
    threads: int
    grids: dict[str, list[float]] = field(default_factory=dict)

    def grid(self, key: str) -> list[float]:
        if key not in self.grids:
            text = self.raw.get(key)
            self.grids[key] = parse_grid(text if text is not None else DEFAULTS[key])
            if not self.grids[key]:
                raise UsageError(f"grid for --{key} is empty")
        return self.grids[key]

    def scalar(self, key: str) -> float:
        values = self.grid(key)
        if len(values) != 1:
            raise UsageError(f"--{key} must be a single value for {self.command}")
        return values[0]


def _int(raw: dict, key: str) -> int:
    try:
        return int(raw[key])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"--{key} must be an integer, got {raw[key]!r}") from exc


def resolve(command: str, flags: dict[str, str | None], config: dict[str, str]) -> RunConfig:
    """Merge defaults, config file and flags (flags win)."""
    raw: dict[str, str | None] = {}
    for key in KEYS:
        raw[key] = flags.get(key) if flags.get(key) is not None else config.get(key)
    if raw["threads"] is None and os.environ.get(THREADS_ENV):
        raw["threads"] = os.environ[THREADS_ENV]
    full = {k: (raw[k] if raw[k] is not None else DEFAULTS.get(k)) for k in KEYS}
    if full["format"] not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got {full['format']!r}")
    threads = _int(full, "threads") if full["threads"] is not None else 1
    if threads < 1:
        raise UsageError("--threads must be >= 1")
    nmax = _int(full, "nmax")
    if nmax < 2:
        raise UsageError("--nmax must be >= 2")
    try:
        tol = float(full["tol"])
        opts = ConvergenceOptions(n_start=min(40, nmax), n_limit=nmax, tol_energy=tol)
        quad = QuadratureSpec("simpson", _int(full, "quad-nodes"))
    except ParameterError as exc:
        raise UsageError(str(exc)) from exc
    except ValueError as exc:
        raise UsageError(f"--tol must be a number, got {full['tol']!r}") from exc
    cfg = RunConfig(command, raw, ModelParams(), opts, quad, threads)
    # single-valued model parameters unless a command sweeps them
    swept = {"functional": ("lambda",), "adiabatic": ("lambda",), "fit": ("lambda", "t"),
             "photonfree": ("lambda", "g")}.get(command, ())
    kwargs = {}
    for key, name in (("omega", "omega"), ("t", "t"), ("g", "g"), ("lambda", "lam")):
        kwargs[name] = cfg.grid(key)[0] if key in swept else cfg.scalar(key)
    try:
        cfg.params = ModelParams(**kwargs)
    except ParameterError as exc:
        raise UsageError(str(exc)) from exc
    return cfg


# ---------------------------------------------------------------- evaluation

@dataclass
class Table:
    columns: list[str]
    rows: list[dict]
    n_max_used: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def failures(self) -> int:
        return sum(1 for r in self.rows if r.get("error"))


def _evaluate(points, func, columns: list[str], threads: int) -> Table:
    """Apply ``func(point) -> (row, n_max)`` to each point, keeping grid order."""

    def safe(point):
        try:
            row, n_used = func(point)
            row.setdefault("error", "")
            return row, n_used
        except ROW_ERRORS as exc:
            row = {c: float("nan") for c in columns}
            row.update(point)
            row["error"] = f"{type(exc).__name__}: {exc}"
            return row, None

    points = list(points)
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(safe, points))
    else:
        results = [safe(pt) for pt in points]
    cols = columns + ["error"]
    rows = [{c: r.get(c, float("nan")) for c in cols} for r, _ in results]
    return Table(cols, rows, [n for _, n in results])


def _product(cfg: RunConfig, keys: tuple[str, ...]) -> list[dict]:
    return [dict(zip(keys, combo)) for combo in itertools.product(*(cfg.grid(k) for k in keys))]


def cmd_energy(cfg: RunConfig) -> Table:
    """Ground energy, densities and gap on a (v, j) grid."""

    def point(pt):
        sol = ground_state(cfg.params, ExternalPair(pt["v"], pt["j"]), cfg.opts, check_positivity=False)
        ex = expectations_from_vector(sol.vector, cfg.params.omega)
        return dict(pt, E=sol.energy, sigma=ex.sigma, xi=ex.xi, gap=sol.gap), sol.n_max_used

    return _evaluate(_product(cfg, ("v", "j")), point, ["v", "j", "E", "sigma", "xi", "gap"], cfg.threads)


def cmd_functional(cfg: RunConfig) -> Table:
    """Levy-Lieb functional and its external pair on a (σ, ξ, λ) grid."""

    def point(pt):
        p = cfg.params.with_lambda(pt["lambda"])
        val = levy_lieb(DensityPair(pt["sigma"], pt["xi"]), p, cfg.opts)
        n_used = None if abs(pt["sigma"]) == 1.0 else constrained_optimizer(pt["sigma"], p, opts=cfg.opts).n_max
        return dict(pt, F=val.value, v=val.v, j=val.j, source=val.source), n_used

    cols = ["sigma", "xi", "lambda", "F", "v", "j", "source"]
    return _evaluate(_product(cfg, ("sigma", "xi", "lambda")), point, cols, cfg.threads)


def cmd_adiabatic(cfg: RunConfig) -> Table:
    """Correlation integral, its components and the bound checks on a (σ, λ) grid."""

    def point(pt):
        br = correlation_breakdown(pt["sigma"], pt["lambda"], cfg.params, cfg.quad)
        bounds = bounds_suite(pt["sigma"], pt["lambda"], cfg.params, cfg.quad)
        n_used = None
        if pt["lambda"] != 0 and abs(pt["sigma"]) < 1:
            n_used = constrained_optimizer(pt["sigma"], cfg.params.with_lambda(pt["lambda"])).n_max
        row = dict(pt, I=br.I, G=br.G, Pc=br.Pc, Tc=br.Tc, Wc=br.Wc, quad_residual=br.quad_residual,
                   quad_error=br.quad_error, bounds_ok=int(bounds.passed),
                   saturation=float("nan") if bounds.saturation is None else bounds.saturation)
        return row, n_used

    cols = ["sigma", "lambda", "I", "G", "Pc", "Tc", "Wc", "quad_residual", "quad_error", "bounds_ok", "saturation"]
    return _evaluate(_product(cfg, ("sigma", "lambda")), point, cols, cfg.threads)


def cmd_fit(cfg: RunConfig) -> Table:
    """Elliptic fit of the correlation integral on a (λ, t) grid."""
    sigmas = DEFAULT_SIGMAS if cfg.raw.get("sigma") is None else np.array(cfg.grid("sigma"))
    if sigmas.size < 8:
        raise UsageError("fit needs at least 8 sigma samples")
    base = cfg.params

    def point(pt):
        q = ModelParams(base.omega, pt["t"], base.g, 1.0)
        values = np.clip(correlation_samples(pt["lambda"], q, sigmas), 0.0, None)
        fit = fit_ellipse(sigmas, values, base.omega)
        return dict(pt, a=fit.a, b=fit.b, d=fit.d, rms=fit.rms, flag=fit.flag), None

    cols = ["lambda", "t", "a", "b", "d", "rms", "flag"]
    return _evaluate(_product(cfg, ("lambda", "t")), point, cols, cfg.threads)


def cmd_photonfree(cfg: RunConfig) -> Table:
    """Photon-free comparisons: ``potential``, ``eta`` or ``spectrum`` table."""
    table = cfg.raw.get("table") or DEFAULTS["table"]
    p = cfg.params
    if table == "potential":
        lam, xi = cfg.scalar("lambda"), cfg.scalar("xi")
        if cfg.raw.get("sigma") is None:
            cfg.grids["sigma"] = [round(-0.9 + 0.05 * k, 12) for k in range(37)]
        try:
            eta = estimate_eta(lam, p)
        except ROW_ERRORS as exc:
            eta, eta_err = float("nan"), f"{type(exc).__name__}: {exc}"
        else:
            eta_err = ""

        def point(pt):
            if eta_err:
                raise ParameterError(eta_err)
            s = pt["sigma"]
            return dict(pt, v_dc_exact=v_dc_exact(s, xi, lam, p), v_dc_pf=v_dc_photon_free(s, xi, lam, p),
                        v_dc_pf_eta=v_dc_photon_free(s, xi, lam, p, eta), eta_c=eta), None

        cols = ["sigma", "v_dc_exact", "v_dc_pf", "v_dc_pf_eta", "eta_c"]
        return _evaluate(_product(cfg, ("sigma",)), point, cols, cfg.threads)
    if table == "eta":
        cfg.scalar("g")

        def point(pt):
            return dict(pt, eta_c=estimate_eta(pt["lambda"], p)), None

        return _evaluate(_product(cfg, ("lambda",)), point, ["lambda", "eta_c"], cfg.threads)
    if table == "spectrum":
        ext = ExternalPair(cfg.scalar("v"), cfg.scalar("j"))

        def point(pt):
            q = ModelParams(p.omega, p.t, pt["g"], pt["lambda"])
            cmp = compare_pf(q, ext, 2)
            row = dict(pt, E0=cmp.full_energies[0], E1=cmp.full_energies[1], pf_E0=cmp.pf_energies[0],
                       pf_E1=cmp.pf_energies[1], d_sigma=cmp.d_sigma, d_sx=cmp.d_sx, d_xi=cmp.d_xi)
            return row, None

        cols = ["g", "lambda", "E0", "E1", "pf_E0", "pf_E1", "d_sigma", "d_sx", "d_xi"]
        return _evaluate(_product(cfg, ("g", "lambda")), point, cols, cfg.threads)
    raise UsageError(f"--table must be potential, eta or spectrum, got {table!r}")


def cmd_dicke(cfg: RunConfig) -> Table:
    """Census of irregular faces for N = 1, 2 or 3 sites."""
    n_sites = _int({"sites": cfg.raw.get("sites") or DEFAULTS["sites"]}, "sites")
    try:
        census = irregular_faces(n_sites)
    except (UnsupportedSizeError, ParameterError) as exc:
        raise UsageError(str(exc)) from exc
    rows = []
    for dim, faces in enumerate((census.corners, census.segments, census.planes)):
        for face in faces:
            rows.append({"dim": dim, "kind": face.kind, "corners": " ".join(map(str, face.corners)), "error": ""})
    return Table(["dim", "kind", "corners", "error"], rows, [None] * len(rows), {"census": census.to_dict()})


COMMANDS = {
    "energy": cmd_energy,
    "functional": cmd_functional,
    "adiabatic": cmd_adiabatic,
    "fit": cmd_fit,
    "photonfree": cmd_photonfree,
    "dicke": cmd_dicke,
}


# ---------------------------------------------------------------- output

def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(row[c]) for c in table.columns])
    return buf.getvalue()


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, (np.integer, np.bool_)):
        return int(value)
    return value


def to_json(table: Table, cfg: RunConfig) -> str:
    envelope = {
        "tool": "rabidft",
        "version": __version__,
        "command": cfg.command,
        "config": {k: v for k, v in cfg.raw.items() if v is not None and k not in ("out", "format")},
        "columns": table.columns,
        "rows": [{c: _json_value(r[c]) for c in table.columns} for r in table.rows],
        "n_max_used": table.n_max_used,
    }
    envelope.update(table.extra)
    return json.dumps(envelope, indent=2) + "\n"


HELP = {
    "omega": "photon frequency",
    "t": "tunnelling amplitude",
    "g": "coupling constant",
    "lambda": "coupling scale (grid)",
    "v": "potential on the two-level system (grid)",
    "j": "current on the photon mode (grid)",
    "sigma": "polarization (grid)",
    "xi": "photon displacement (grid)",
    "nmax": "largest Fock cutoff allowed (default 1280)",
    "quad-nodes": "Simpson nodes for coupling-scale integrals (default 65)",
    "tol": "cutoff convergence tolerance on the energy (default 1e-10)",
    "out": "output file (default stdout)",
    "format": "csv or json (default csv)",
    "threads": "worker threads (default $QEDFT_THREADS or 1)",
    "sites": "number of two-level sites for dicke (default 2)",
    "table": "photonfree table: potential, eta or spectrum",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override its entries")
    for key in KEYS:
        common.add_argument(f"--{key}", dest=key.replace("-", "_"), default=None, help=HELP.get(key))
    parser = argparse.ArgumentParser(prog="rabidft", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rabidft {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=func.__doc__.splitlines()[0])
    return parser


def _join_negative(argv: list[str]) -> list[str]:
    """Rewrite ``--key -1:1:0.5`` as ``--key=-1:1:0.5`` so argparse accepts it."""
    out: list[str] = []
    it = iter(range(len(argv)))
    for i in it:
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok.startswith("--") and tok[2:] in KEYS and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == "."):
            out.append(f"{tok}={nxt}")
            next(it, None)
        else:
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _join_negative(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    flags = {k: getattr(args, k.replace("-", "_")) for k in KEYS}
    try:
        config = read_config(args.config) if args.config else {}
        cfg = resolve(args.command, flags, config)
        table = COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"rabidft: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = to_json(table, cfg) if (cfg.raw["format"] or "csv") == "json" else to_csv(table)
    out = cfg.raw["out"] or "-"
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    if table.failures and table.failures == len(table.rows):
        return EXIT_CONVERGENCE
    if table.failures:
        return EXIT_PARTIAL
    return EXIT_OK
