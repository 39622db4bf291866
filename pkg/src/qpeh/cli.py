"""Command-line experiment runner.

    qpeh figure1 --ell 800 --time-ratio 0.1 0.2 0.25 10 inf --z 1 2 3 4 --out runs/fig1
    qpeh entropy --ell 400 --alpha 1 2 --out runs/entropy
    qpeh cft-check --beta 0.5 1 --time-ratio 0.1 0.3 --out runs/cft

Every output file starts with a '#' header block echoing the full config and
the package version. Floats are written with 17 significant digits, so
identical configs give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import compare, renyi_exact
from .corr import dimer_correlation, gge_correlation, ring_oracle_correlation
from .model import QuenchSpec, dimer_occupation, hopping_dispersion
from .peschel import coupling_profile, extract_eh
from .qpp import (
    KernelPrediction,
    cft_factorization_check,
    gge_coupling,
    predict_profiles,
    renyi_qpp,
    renyi_stationary,
    sample_positions,
)

log = logging.getLogger("qpeh")

EXIT_OK, EXIT_INVALID, EXIT_BREACH = 0, 1, 2
ORACLE_TOL = 1e-8
GGE_TOL = 1e-3
MIN_QUAD_TOL = 1e-15

COMMANDS = ("figure1", "figure2", "entropy", "gge", "cft-check", "oracle-check")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    protocol: str = "dimer"
    ell: int = 800
    time_ratios: tuple = (0.1, 0.2, 0.25, 10.0, math.inf)
    z_list: tuple = (1, 2, 3, 4)
    cutoff: float = 1e-4
    exclusion: float = 0.05
    quad_tol: float = 1e-8
    alpha_list: tuple = (1.0, 2.0)
    beta_list: tuple = (0.5, 1.0)
    velocity: float = 1.0
    sampling: str = "midpoint"
    ring_size: int = 4096
    jobs: int = 1
    output_dir: str = "."
    format: str = "csv"
    extra: dict = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if self.protocol not in ("dimer", "gge", "cft-check"):
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        if int(self.ell) != self.ell or self.ell < 2:
            raise ConfigError(f"ell must be an integer >= 2, got {self.ell!r}")
        if any(not (r >= 0) for r in self.time_ratios):
            raise ConfigError(f"time ratios must be >= 0 or 'inf', got {self.time_ratios}")
        if any(int(z) != z or not 0 <= z < self.ell for z in self.z_list):
            raise ConfigError(f"distances must be integers in [0, {self.ell}), got {self.z_list}")
        if not 0.0 <= self.cutoff < 0.5:
            raise ConfigError(f"cutoff must lie in [0, 1/2), got {self.cutoff}")
        if not 0.0 <= self.exclusion < 0.5:
            raise ConfigError(f"exclusion must lie in [0, 1/2), got {self.exclusion}")
        if not self.quad_tol >= MIN_QUAD_TOL:
            raise ConfigError(f"quad_tol must be at least {MIN_QUAD_TOL:g} (double precision), got {self.quad_tol}")
        if any(not a > 0 for a in self.alpha_list):
            raise ConfigError(f"Renyi indices must be positive, got {self.alpha_list}")
        if self.sampling not in ("midpoint", "endpoint"):
            raise ConfigError(f"sampling must be 'midpoint' or 'endpoint', got {self.sampling!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be 'csv' or 'json', got {self.format!r}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        return self

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        d["time_ratios"] = [_token(r) for r in self.time_ratios]
        for key in ("z_list", "alpha_list", "beta_list"):
            d[key] = list(d[key])
        return d


DEFAULTS = {
    "figure1": {},
    "figure2": {"time_ratios": (0.2, math.inf), "z_list": (1, 3, 5, 7, 9)},
    "entropy": {"ell": 400, "time_ratios": tuple(round(0.05 * i, 2) for i in range(13)), "z_list": ()},
    "gge": {"protocol": "gge", "ell": 400, "time_ratios": (math.inf,), "z_list": tuple(range(10)), "cutoff": 0.0},
    "cft-check": {"protocol": "cft-check", "time_ratios": (0.1, 0.3), "z_list": tuple(range(9))},
    "oracle-check": {"ell": 8, "time_ratios": (0.0, 0.1625, 1.0), "z_list": ()},
}


def _token(r: float):
    return "inf" if math.isinf(r) else r


def _parse_ratio(text) -> float:
    if isinstance(text, str) and text.strip().lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def write_table(path: Path, command: str, config: RunConfig, columns: list, rows: list) -> Path:
    """Write rows with the '#'-prefixed header block (csv) or as a single document (json)."""
    header = {"artifact": "qpeh", "version": __version__, "command": command, "config": config.echo()}
    path = path.with_suffix("." + config.format)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            if config.format == "csv":
                fh.write(f"# qpeh {__version__}\n")
                fh.write(f"# command: {command}\n")
                fh.write("# config: " + json.dumps(header["config"], sort_keys=True) + "\n")
                fh.write(",".join(columns) + "\n")
                for row in rows:
                    fh.write(",".join(_fmt(v) for v in row) + "\n")
            else:
                doc = dict(header, columns=columns, rows=[[_json_value(v) for v in row] for row in rows])
                fh.write(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def _json_value(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return int(v)
    v = float(v)
    return v if math.isfinite(v) else _fmt(v)


def _map(fn, items, jobs: int) -> list:
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))  # map preserves input order


def _spec(config: RunConfig, t: float) -> QuenchSpec:
    return QuenchSpec(hopping_dispersion(), dimer_occupation(), config.ell, t)


def _profile_slice(config: RunConfig, ratio: float):
    """Exact couplings and predictions at one time for every distance in the config."""
    ell = config.ell
    t = ratio * ell
    occ = dimer_occupation()
    if math.isinf(t):
        # Stationary state: the full spectrum is described by the GGE, no cutoff.
        h = extract_eh(gge_correlation(ell, occ), 0.0)
        couplings = gge_coupling(np.array(config.z_list), occ, config.quad_tol)
        preds = {
            z: KernelPrediction(ell, t, z, sample_positions(ell, z, config.sampling),
                                np.full(ell - z, couplings[i]), config.sampling)
            for i, z in enumerate(config.z_list)
        }
    else:
        h = extract_eh(dimer_correlation(ell, t), config.cutoff)
        preds = predict_profiles(_spec(config, t), config.z_list, config.quad_tol, config.sampling)
    out = []
    for z in config.z_list:
        prof = coupling_profile(h, z)
        out.append((z, t, prof, preds[z], compare(prof, preds[z], config.exclusion)))
    return out


def run_profiles(config: RunConfig, command: str = "figure1") -> list:
    """Per-distance coupling files plus a comparison summary."""
    config.validate()
    slices = _map(lambda r: _profile_slice(config, r), list(config.time_ratios), config.jobs)
    out_dir = Path(config.output_dir)
    written = []
    summary = []
    for col, z in enumerate(config.z_list):
        rows = []
        for sl in slices:
            _, t, prof, pred, report = sl[col]
            ex, pr = prof.values, pred.couplings
            for j in range(len(ex)):
                rows.append((j, z, t, ex[j].real, ex[j].imag, pr[j].real, pr[j].imag))
            summary.append((z, t, report.max_abs_error, report.rms_error, report.peak_coupling,
                            report.relative_error, report.excluded_fraction, report.parity_violation))
        cols = ["j", "z", "t", "re_exact", "im_exact", "re_pred", "im_pred"]
        written.append(write_table(out_dir / f"{command}_z{z}", command, config, cols, rows))
    summary.sort(key=lambda r: (r[1], r[0]))
    cols = ["z", "t", "max_abs_error", "rms_error", "peak_coupling", "relative_error",
            "excluded_fraction", "parity_violation"]
    written.append(write_table(out_dir / f"{command}_summary", command, config, cols, summary))
    return written


def run_figure1(config: RunConfig) -> list:
    return run_profiles(config, "figure1")


def run_figure2(config: RunConfig) -> list:
    return run_profiles(config, "figure2")


def _entropy_rows(config: RunConfig, ratio: float) -> list:
    ell = config.ell
    t = ratio * ell
    occ = dimer_occupation()
    c = gge_correlation(ell, occ) if math.isinf(t) else dimer_correlation(ell, t)
    rows = []
    for alpha in config.alpha_list:
        s_exact = renyi_exact(c, alpha)
        if math.isinf(t):
            s_qpp = renyi_stationary(alpha, occ, ell, config.quad_tol)
        else:
            s_qpp = renyi_qpp(alpha, _spec(config, t), config.quad_tol)
        rel = abs(s_exact - s_qpp) / s_exact if s_exact > 1e-10 else math.nan
        rows.append((t, alpha, s_exact, s_qpp, rel))
    return rows


def run_entropy(config: RunConfig) -> list:
    """Exact and quasiparticle Renyi entropies over the time grid."""
    config.validate()
    if not config.alpha_list:
        raise ConfigError("alpha_list must be nonempty")
    blocks = _map(lambda r: _entropy_rows(config, r), list(config.time_ratios), config.jobs)
    rows = [row for block in blocks for row in block]
    cols = ["t", "alpha", "S_exact", "S_qpp", "rel_error"]
    return [write_table(Path(config.output_dir) / "entropy", "entropy", config, cols, rows)]


def run_gge(config: RunConfig) -> tuple:
    """Central-row couplings of the stationary EH against the momentum integral."""
    config.validate()
    ell = config.ell
    occ = dimer_occupation()
    h = extract_eh(gge_correlation(ell, occ), config.cutoff).matrix
    centre = ell // 2
    pred = gge_coupling(np.array(config.z_list), occ, config.quad_tol)
    rows = []
    worst = 0.0
    for i, z in enumerate(config.z_list):
        ex = h[centre, centre + z] if centre + z < ell else math.nan
        err = abs(ex - pred[i])
        worst = max(worst, err)
        rows.append((z, ex.real, ex.imag, pred[i].real, pred[i].imag, err))
    cols = ["z", "re_exact", "im_exact", "re_gge", "im_gge", "abs_error"]
    path = write_table(Path(config.output_dir) / "gge", "gge", config, cols, rows)
    return [path], worst <= GGE_TOL


def run_cft_check(config: RunConfig) -> tuple:
    """Factorization deviation of the linear-dispersion kernel per (t, beta)."""
    config.validate()
    ell = config.ell
    rows = []
    ok = True
    for ratio in config.time_ratios:
        t = ratio * ell
        for beta in config.beta_list:
            dev = cft_factorization_check(beta, config.velocity, t, ell, config.quad_tol, z_values=config.z_list)
            ok &= dev <= 10.0 * config.quad_tol
            rows.append((t, beta, dev))
    path = write_table(Path(config.output_dir) / "cft_check", "cft-check", config, ["t", "beta", "max_deviation"], rows)
    return [path], ok


def run_oracle_check(config: RunConfig) -> tuple:
    """Closed-form dimer correlations against exact ring evolution."""
    config.validate()
    rows = []
    ok = True
    for ratio in config.time_ratios:
        t = ratio * config.ell
        a = dimer_correlation(config.ell, t).entries
        b = ring_oracle_correlation(config.ell, config.ring_size, t).entries
        dev = float(np.max(np.abs(a - b)))
        ok &= dev <= ORACLE_TOL
        rows.append((config.ell, config.ring_size, t, dev))
    cols = ["ell", "L", "t", "max_abs_deviation"]
    return [write_table(Path(config.output_dir) / "oracle_check", "oracle-check", config, cols, rows)], ok


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpeh", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qpeh {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON file with RunConfig fields; flags override it")
        p.add_argument("--protocol", choices=["dimer", "gge", "cft-check"])
        p.add_argument("--ell", type=int)
        p.add_argument("--time-ratio", dest="time_ratios", nargs="+", type=_parse_ratio, metavar="T/ELL")
        p.add_argument("--z", dest="z_list", nargs="+", type=int)
        p.add_argument("--cutoff", type=float)
        p.add_argument("--exclusion", type=float)
        p.add_argument("--quad-tol", dest="quad_tol", type=float)
        p.add_argument("--alpha", dest="alpha_list", nargs="+", type=float)
        p.add_argument("--beta", dest="beta_list", nargs="+", type=float)
        p.add_argument("--velocity", type=float)
        p.add_argument("--sampling", choices=["midpoint", "endpoint"])
        p.add_argument("--ring-size", dest="ring_size", type=int)
        p.add_argument("--jobs", type=int)
        p.add_argument("--out", dest="output_dir")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


_TUPLE_FIELDS = {"time_ratios", "z_list", "alpha_list", "beta_list"}


def load_config(command: str, args: argparse.Namespace | None = None) -> RunConfig:
    """Defaults for ``command``, then the config file, then explicit flags."""
    values = dict(DEFAULTS[command])
    names = {f.name for f in fields(RunConfig)} - {"extra"}
    if args is not None and getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    if args is not None:
        for name in names:
            v = getattr(args, name, None)
            if v is not None:
                values[name] = v
    for name in _TUPLE_FIELDS & set(values):
        seq = values[name]
        values[name] = tuple(_parse_ratio(x) for x in seq) if name == "time_ratios" else tuple(seq)
    return replace(RunConfig(), **values).validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        config = load_config(args.command, args)
    except ConfigError as exc:
        print(f"qpeh: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID

    ok = True
    if args.command == "figure1":
        paths = run_figure1(config)
    elif args.command == "figure2":
        paths = run_figure2(config)
    elif args.command == "entropy":
        paths = run_entropy(config)
    elif args.command == "gge":
        paths, ok = run_gge(config)
    elif args.command == "cft-check":
        paths, ok = run_cft_check(config)
    else:
        paths, ok = run_oracle_check(config)
    for p in paths:
        log.info("wrote %s", p)
    if not ok:
        print(f"qpeh {args.command}: threshold breached, see {paths[0]}", file=sys.stderr)
        return EXIT_BREACH
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
