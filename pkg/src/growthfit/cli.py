"""Command-line interface.

Subcommands::

    growthfit stats     --input FILE [--mode panel|rates] --out DIR
    growthfit fit       --input FILE --families a,b --seed N [--starts N] --out DIR
    growthfit compare   --input FILE --families a,b --seed N [--starts N] --out DIR
    growthfit simulate  --family NAME --n N --seed N [--mu ... | --param k=v] --out DIR
    growthfit diagnose  --input FILE [--families a,b] --seed N --out DIR [--upper-q Q] [--lower-q Q]

Every run writes ``manifest.json`` last, listing the artifacts it completed
and whether the run succeeded. Failures print one line
``error: <ErrorClass>: <message>`` to stderr and exit with status 1.
"""

import argparse
import json
import logging
import sys
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from . import diagnostics, records
from . import distributions as dist
from .estimation import FitOptions, fit_mle
from .exceptions import ConfigError, GrowthFitError
from .plotting import render_rank_svg
from .samples import describe, read_sample, write_rates_csv
from .selection import rank_models

logger = logging.getLogger("growthfit")

COMMANDS = ("stats", "fit", "compare", "simulate", "diagnose")
SHORTHAND_PARAMS = ("mu", "sigma", "nu", "alpha", "beta", "a_l", "a_r", "b_l", "b_r")


@dataclass
class RunConfig:
    command: str
    input_path: Path | None = None
    input_mode: str = "rates"
    families: tuple[str, ...] = ()
    seed: int | None = None
    output_dir: Path = Path("out")
    n_starts: int = 8
    max_iters: int = 5000
    n_jobs: int = 1
    upper_q: float = 0.95
    lower_q: float = 0.05
    grid_points: int = 200
    family: str | None = None
    n: int | None = None
    params: dict = field(default_factory=dict)

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.command != "simulate" and self.input_path is None:
            raise ConfigError("--input is required")
        if self.command in ("fit", "compare") and not self.families:
            raise ConfigError("--families must name at least one model")
        for label in self.families:
            dist.ModelSpec.from_label(label)
        if self.command in ("fit", "compare", "simulate", "diagnose") and self.seed is None:
            raise ConfigError("--seed is required")
        if self.command == "simulate":
            if not self.family:
                raise ConfigError("--family is required for simulate")
            if self.n is None or self.n < 1:
                raise ConfigError("--n must be a positive integer")
        if not 0 < self.lower_q < self.upper_q < 1:
            raise ConfigError("need 0 < lower-q < upper-q < 1")


class ArtifactWriter:
    """Serializes writes into the output directory and records each completed artifact."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.artifacts = []

    def path(self, name):
        return self.out_dir / name

    def done(self, name):
        self.artifacts.append(name)

    def write_text(self, name, text):
        self.path(name).write_text(text, encoding="utf-8")
        self.done(name)

    def write_jsonl(self, name, rows):
        records.write_jsonl(rows, self.path(name))
        self.done(name)

    def finish(self, config, status, error=None):
        manifest = {
            "command": config.command,
            "status": status,
            "artifacts": self.artifacts,
            "seed": config.seed,
            "families": list(config.families),
            "input_mode": config.input_mode,
        }
        if error is not None:
            manifest["error"] = error
        text = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
        self.path("manifest.json").write_text(text, encoding="utf-8")


def family_seed(seed, label):
    """Independent per-family seed derived from the run seed and the model label."""
    seq = np.random.SeedSequence(seed, spawn_key=(zlib.crc32(label.encode()),))
    return int(seq.generate_state(1)[0])


def _fit_one(label, values, config):
    spec = dist.ModelSpec.from_label(label)
    opts = FitOptions(n_starts=config.n_starts, max_iters=config.max_iters,
                      seed=family_seed(config.seed, spec.label))
    return fit_mle(spec, values, opts)


def fit_families(values, config):
    labels = list(dict.fromkeys(config.families))
    if config.n_jobs == 1 or len(labels) == 1:
        return [_fit_one(label, values, config) for label in labels]
    return Parallel(n_jobs=config.n_jobs)(delayed(_fit_one)(label, values, config) for label in labels)


def _load(config, writer):
    sample, report = read_sample(config.input_path, config.input_mode)
    if report.rejected:
        writer.write_jsonl("rejected_rows.jsonl", [
            {"line": r.line, "id": r.unit_id, "reason": r.reason} for r in report.rejected
        ])
    return sample, report


def cmd_stats(config, writer):
    sample, report = _load(config, writer)
    stats = describe(sample)
    writer.write_text("stats.txt", records.stats_table(sample.label, stats))
    record = {"sample": sample.label, "n_read": report.n_read, "n_rejected": report.n_rejected}
    record.update(stats.as_dict())
    writer.write_jsonl("stats.jsonl", [record])
    sys.stdout.write(records.stats_table(sample.label, stats))


def _write_fits(fits, sample, config, writer):
    rows = [records.fit_record(f, sample.label, family_seed(config.seed, f.label)) for f in fits]
    writer.write_jsonl("fits.jsonl", rows)
    writer.write_text("fits.txt", records.fits_table(fits))


def cmd_fit(config, writer):
    sample, _ = _load(config, writer)
    fits = fit_families(np.asarray(sample), config)
    _write_fits(fits, sample, config, writer)
    sys.stdout.write(records.fits_table(fits))


def cmd_compare(config, writer):
    sample, _ = _load(config, writer)
    fits = fit_families(np.asarray(sample), config)
    _write_fits(fits, sample, config, writer)
    table = rank_models(fits)
    writer.write_jsonl("ranking.jsonl", records.ranking_records(table, sample.label))
    text = records.ranking_table(table)
    writer.write_text("ranking.txt", text)
    sys.stdout.write(text)


def cmd_simulate(config, writer):
    spec = dist.ModelSpec.from_label(config.family)
    params = dist.params_from_dict(spec, config.params)
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    sample = dist.draw(spec, params, config.n, rng)
    write_rates_csv(sample, writer.path("simulated.csv"))
    writer.done("simulated.csv")
    record = {"family": spec.label, "n": config.n, "seed": config.seed}
    record.update(records.params_record(spec, params))
    writer.write_jsonl("simulation.jsonl", [record])


def cmd_diagnose(config, writer):
    sample, _ = _load(config, writer)
    values = np.asarray(sample)
    n = values.size
    tails = diagnostics.fit_exponential_tails(values, config.upper_q, config.lower_q)
    tent = diagnostics.tent_profile(values, tails)
    writer.write_jsonl("tails.jsonl", [{
        "sample": sample.label, "c_u": tails.c_u, "c_l": tails.c_l, "g_m": tails.g_m, "g_M": tails.g_M,
        "n_u": tails.n_u, "n_l": tails.n_l, "upper_q": config.upper_q, "lower_q": config.lower_q,
        "upper_residual": tent.upper_residual, "lower_residual": tent.lower_residual,
        "rank_convention": "ln(i), i=1 at the extreme observation",
    }])
    upper, lower = tent.upper, tent.lower
    fits = fit_families(values, config) if config.families else []
    if fits:
        _write_fits(fits, sample, config, writer)
    grid = diagnostics.model_grid(values, config.grid_points)
    targets = [(None, [], [])]
    for fit in fits:
        model_up = diagnostics.model_log_rank(fit.spec, fit.params, grid, n)
        model_lo = diagnostics.model_log_corank(fit.spec, fit.params, grid, n)
        targets.append((fit.label, [(fit.label, model_up)], [(fit.label, model_lo)]))
    for label, ups, los in targets:
        suffix = label or "empirical"
        up_series = [upper] + [s for _, s in ups] + [tent.upper_line]
        lo_series = [lower] + [s for _, s in los] + [tent.lower_line]
        diagnostics.write_series_csv(up_series, writer.path(f"rank_{suffix}.csv"))
        writer.done(f"rank_{suffix}.csv")
        diagnostics.write_series_csv(lo_series, writer.path(f"corank_{suffix}.csv"))
        writer.done(f"corank_{suffix}.csv")
        render_rank_svg(upper, ups + [("exponential tail", tent.upper_line)],
                        title=f"{sample.label}: log-rank ({suffix})", path=writer.path(f"rank_{suffix}.svg"))
        writer.done(f"rank_{suffix}.svg")
        render_rank_svg(lower, los + [("exponential tail", tent.lower_line)],
                        title=f"{sample.label}: log-corank ({suffix})", path=writer.path(f"corank_{suffix}.svg"))
        writer.done(f"corank_{suffix}.svg")


HANDLERS = {
    "stats": cmd_stats,
    "fit": cmd_fit,
    "compare": cmd_compare,
    "simulate": cmd_simulate,
    "diagnose": cmd_diagnose,
}


def run(config):
    """Execute one command; returns the process exit status."""
    writer = None
    try:
        config.validate()
        writer = ArtifactWriter(config.output_dir)
        HANDLERS[config.command](config, writer)
    except (GrowthFitError, OSError, ValueError) as exc:
        name = type(exc).__name__
        message = str(exc).replace("\n", " ")
        sys.stderr.write(f"error: {name}: {message}\n")
        if writer is not None:
            writer.finish(config, "failed", error=name)
        return 1
    writer.finish(config, "complete")
    return 0


def _parse_param(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="growthfit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", type=Path, required=True, help="CSV file")
            p.add_argument("--mode", choices=("panel", "rates"), default="rates",
                           help="panel: id,pop_start,pop_end; rates: a single g column")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")

    def fitting(p, required):
        p.add_argument("--families", default="" if not required else None, required=required,
                       help="comma-separated models: " + ",".join(dist.MODEL_LABELS))
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--starts", type=int, default=8)
        p.add_argument("--max-iters", type=int, default=5000)
        p.add_argument("--jobs", type=int, default=1, help="families fitted in parallel")

    common(sub.add_parser("stats", help="descriptive statistics"))
    for name in ("fit", "compare"):
        p = sub.add_parser(name, help="fit models" if name == "fit" else "fit and rank models")
        common(p)
        fitting(p, required=True)
    p = sub.add_parser("simulate", help="draw a synthetic sample")
    common(p, needs_input=False)
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    for name in SHORTHAND_PARAMS:
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=float)
    p.add_argument("--param", action="append", type=_parse_param, default=[],
                   help="NAME=VALUE, e.g. mu_1=0.17 (repeatable)")
    p = sub.add_parser("diagnose", help="log-rank/corank series and tail fits")
    common(p)
    fitting(p, required=False)
    p.add_argument("--upper-q", type=float, default=0.95)
    p.add_argument("--lower-q", type=float, default=0.05)
    p.add_argument("--grid-points", type=int, default=200)
    return parser


def config_from_args(args):
    families = tuple(f.strip() for f in (getattr(args, "families", "") or "").split(",") if f.strip())
    params = {}
    if args.command == "simulate":
        params = {k: getattr(args, k) for k in SHORTHAND_PARAMS if getattr(args, k) is not None}
        params.update(dict(args.param))
    return RunConfig(
        command=args.command,
        input_path=getattr(args, "input", None),
        input_mode=getattr(args, "mode", "rates"),
        families=families,
        seed=getattr(args, "seed", None),
        output_dir=args.out,
        n_starts=getattr(args, "starts", 8),
        max_iters=getattr(args, "max_iters", 5000),
        n_jobs=getattr(args, "jobs", 1),
        upper_q=getattr(args, "upper_q", 0.95),
        lower_q=getattr(args, "lower_q", 0.05),
        grid_points=getattr(args, "grid_points", 200),
        family=getattr(args, "family", None),
        n=getattr(args, "n", None),
        params=params,
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
