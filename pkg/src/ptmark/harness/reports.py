"""Report emission: CSV rows, JSON provenance, SVG charts."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List

from .config import RunConfig
from .evaluate import EvalResult, MetricsRow
from .runtime import cell_label, perturbation_cells
from .svg import bar_chart, line_chart


def _cell_labels(cfg: RunConfig) -> List[str]:
    return [cell_label(s) for s in perturbation_cells(cfg)]


def rows_to_csv(cfg: RunConfig, rows: List[MetricsRow]) -> str:
    labels = _cell_labels(cfg)
    header = ["method", "psnr", "ssim", "msssim"] + labels + ["avg"]
    lines = [",".join(header)]
    for row in rows:
        cells = [row.method, f"{row.psnr:.6f}", f"{row.ssim:.6f}", f"{row.msssim:.6f}"]
        cells += [f"{row.auc_by_cell.get(label, float('nan')):.6f}" for label in labels]
        cells.append(f"{row.auc_avg:.6f}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def result_to_json(cfg: RunConfig, result: EvalResult, kind: str) -> str:
    payload = {
        "kind": kind,
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash(),
        "rows": [r.to_dict() for r in result.rows],
        "records": [r.to_dict() for r in result.records],
        "clean_p": result.clean_p,
        "failed": result.failed,
        "total": result.total,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def result_to_svg(cfg: RunConfig, result: EvalResult, title: str) -> str:
    labels = _cell_labels(cfg)
    groups: Dict[str, List[float]] = {}
    for row in result.rows:
        groups[row.method] = [row.auc_by_cell.get(label, 0.0) for label in labels]
    return bar_chart(labels, groups, title, y_label="AUC")


def curves_svg(series: Dict[str, List], title: str, x_label: str, y_label: str) -> str:
    return line_chart(series, title, x_label=x_label, y_label=y_label)


def _numeric_axis(rows: List[MetricsRow]) -> str:
    """Name of the shared numeric parameter if the rows form a 1-D sweep."""
    if len(rows) < 2:
        return ""
    keys = {tuple(sorted(r.params)) for r in rows}
    if len(keys) != 1:
        return ""
    names = keys.pop()
    if len(names) != 1:
        return ""
    name = names[0]
    if all(isinstance(r.params[name], (int, float)) for r in rows):
        return name
    return ""


def sweep_curves(cfg: RunConfig, rows: List[MetricsRow], axis: str,
                 kind: str) -> Dict[str, str]:
    """Quality and per-perturbation robustness curves along a numeric sweep."""
    xs = [float(r.params[axis]) for r in rows]
    quality = {
        "psnr": list(zip(xs, [r.psnr for r in rows])),
    }
    robustness: Dict[str, list] = {}
    for label in _cell_labels(cfg):
        pts = [(x, r.auc_by_cell[label]) for x, r in zip(xs, rows)
               if label in r.auc_by_cell]
        if pts:
            robustness[label] = pts
    robustness["avg"] = list(zip(xs, [r.auc_avg for r in rows]))
    return {
        "quality": line_chart(quality, f"{kind}: quality vs {axis}",
                              x_label=axis, y_label="PSNR (dB)"),
        "robustness": line_chart(robustness, f"{kind}: detection vs {axis}",
                                 x_label=axis, y_label="AUC"),
    }


def write_reports(cfg: RunConfig, result: EvalResult, kind: str,
                  out_dir: str) -> Dict[str, str]:
    """Write CSV, JSON and SVG into ``out_dir``; returns the file paths.

    One-parameter sweeps (iteration count, starting step) additionally emit
    quality and robustness line charts over the sweep axis.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": str(out / f"{kind}.csv"),
        "json": str(out / f"{kind}.json"),
        "svg": str(out / f"{kind}.svg"),
    }
    (out / f"{kind}.csv").write_text(rows_to_csv(cfg, result.rows))
    (out / f"{kind}.json").write_text(result_to_json(cfg, result, kind))
    (out / f"{kind}.svg").write_text(result_to_svg(cfg, result, f"{kind}: detection AUC"))
    axis = _numeric_axis(result.rows)
    if axis:
        for name, svg_text in sweep_curves(cfg, result.rows, axis, kind).items():
            path = out / f"{kind}-{name}.svg"
            path.write_text(svg_text)
            paths[name] = str(path)
    return paths


def reemit_from_json(json_path: str, out_dir: str) -> Dict[str, str]:
    """Rebuild CSV and SVG from a previously written JSON report."""
    from .config import config_from_dict

    data = json.loads(Path(json_path).read_text())
    cfg = config_from_dict(data["config"])
    rows = [
        MetricsRow(method=r["method"], psnr=r["psnr"], ssim=r["ssim"],
                   msssim=r["msssim"], auc_by_cell=r["auc"], auc_avg=r["auc_avg"],
                   params=r.get("params", {}))
        for r in data["rows"]
    ]
    kind = data.get("kind", "report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fake = EvalResult(rows=rows, records=[], clean_p={}, failed=data.get("failed", 0),
                      total=data.get("total", 0))
    paths = {
        "csv": str(out / f"{kind}.csv"),
        "svg": str(out / f"{kind}.svg"),
    }
    (out / f"{kind}.csv").write_text(rows_to_csv(cfg, rows))
    (out / f"{kind}.svg").write_text(result_to_svg(cfg, fake, f"{kind}: detection AUC"))
    return paths
