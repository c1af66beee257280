"""Flat, line-delimited records and aligned text tables for results.

Machine-readable records are JSON objects with sorted keys and full
precision floats, one per line. Text tables print 6 significant digits.
"""

import json
import math
from pathlib import Path

from . import distributions as dist
from .selection import CriteriaRow


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if hasattr(value, "item"):
        return _clean(value.item())
    return value


def dumps(record):
    return json.dumps({k: _clean(v) for k, v in record.items()}, sort_keys=True, allow_nan=False)


def write_jsonl(records, path):
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(dumps(record) + "\n")
    return path


def read_jsonl(path):
    with Path(path).open(encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def params_record(spec, params, prefix="params."):
    return {prefix + k: float(v) for k, v in dist.params_as_dict(params).items()}


def fit_record(fit, sample_label=None, seed=None):
    """Flat record for one fit, including its criteria."""
    row = CriteriaRow.from_fit(fit)
    record = {
        "family": fit.label,
        "sample": sample_label,
        "n": fit.n_obs,
        "k": fit.k,
        "log_lik": fit.log_lik,
        "aic": row.aic,
        "bic": row.bic,
        "hqc": row.hqc,
        "converged": fit.converged,
        "se_status": fit.se_status,
        "n_starts_used": fit.n_starts_used,
        "best_start_index": fit.best_start_index,
        "seed": seed,
    }
    record.update(params_record(fit.spec, fit.params))
    for name in dist.param_names(fit.spec):
        record[f"se.{name}"] = fit.std_errors.get(name) if fit.std_errors else None
    return record


def params_from_record(record):
    """Rebuild ``(spec, params)`` from a fit record."""
    spec = dist.ModelSpec.from_label(record["family"])
    mapping = {k[len("params."):]: v for k, v in record.items() if k.startswith("params.")}
    return spec, dist.params_from_dict(spec, mapping)


def ranking_records(table, sample_label=None):
    out = []
    for r in table.rows:
        out.append({
            "sample": sample_label,
            "family": r.model_label,
            "n": r.n,
            "k": r.k,
            "log_lik": r.log_lik,
            "aic": r.aic,
            "bic": r.bic,
            "hqc": r.hqc,
            "converged": r.converged,
            "best_aic": table.winners["aic"] == r.model_label,
            "best_bic": table.winners["bic"] == r.model_label,
            "best_hqc": table.winners["hqc"] == r.model_label,
            "tie_aic": r.model_label in table.ties.get("aic", ()),
            "tie_bic": r.model_label in table.ties.get("bic", ()),
            "tie_hqc": r.model_label in table.ties.get("hqc", ()),
        })
    return out


def g6(value):
    if value is None:
        return "--"
    if isinstance(value, float) and not math.isfinite(value):
        return "--"
    return f"{value:.6g}"


def format_table(header, rows):
    """Left-aligned first column, right-aligned others."""
    cells = [list(header)] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for j, row in enumerate(cells):
        parts = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(parts).rstrip())
        if j == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def stats_table(label, stats):
    return format_table(
        ["sample", "Obs", "Mean", "SD", "Min", "Max"],
        [[label, stats.n_obs, g6(stats.mean), g6(stats.sd), g6(stats.min), g6(stats.max)]],
    )


def fits_table(fits):
    rows = []
    for fit in fits:
        values = dist.params_as_dict(fit.params)
        for name in dist.param_names(fit.spec):
            se = fit.std_errors.get(name) if fit.std_errors else None
            rows.append([fit.label, name, g6(values[name]), g6(se)])
        rows.append([fit.label, "log_lik", g6(fit.log_lik), "converged" if fit.converged else "NOT CONVERGED"])
    return format_table(["family", "parameter", "estimate", "SE"], rows)


def ranking_table(table):
    rows = []
    for r in table.rows:
        marks = []
        for crit in ("aic", "bic", "hqc"):
            value = g6(getattr(r, crit))
            if table.winners[crit] == r.model_label:
                value += "*"
            elif r.model_label in table.ties.get(crit, ()):
                value += "="
            marks.append(value)
        rows.append([r.model_label, r.k, g6(r.log_lik)] + marks + ["" if r.converged else "not converged"])
    text = format_table(["model", "k", "log-likelihood", "AIC", "BIC", "HQC", "note"], rows)
    return text + "* lowest value in column; = tied lowest value\n"
