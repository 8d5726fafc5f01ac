"""``fapareto`` command line: run, baselines, report.

Exit codes: 0 ok, 1 configuration error, 2 dataset error, 3 missing or
corrupt run artifacts. The default output directory comes from
``$FAPARETO_OUT`` (falling back to ``./runs``).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import engine
from .errors import ConfigError, DatasetError, UndefinedCorrelationError
from .metrics import ObjectivePoint, pearson
from .pareto import Archive, dominates, update_archive

log = logging.getLogger("fapareto")

EXIT_CONFIG, EXIT_DATA, EXIT_ARTIFACTS = 1, 2, 3


class ArtifactError(Exception):
    pass


def default_out():
    return os.environ.get("FAPARETO_OUT", "runs")


def _common(p):
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--generations", type=int)
    p.add_argument("--population", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--data", help="'synthetic' or a CSV path")
    p.add_argument("--out", default=None, help="output directory (default: $FAPARETO_OUT or ./runs)")


def build_parser():
    ap = argparse.ArgumentParser(prog="fapareto", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("run", help="evolve Pareto sets of classifiers"))
    _common(sub.add_parser("baselines", help="train the six single-model baselines"))
    rp = sub.add_parser("report", help="summarise a run directory into CSV/text")
    rp.add_argument("--out", default=None, help="run directory to read and write")
    return ap


def load_config(args) -> engine.RunConfig:
    cfg = engine.RunConfig()
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        cfg = engine.RunConfig.from_dict(raw)
    overrides = {
        "master_seed": args.seed,
        "generations": args.generations,
        "population_size": args.population,
        "trials": args.trials,
        "worker_count": args.workers,
        "data": args.data,
    }
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return cfg.validate()


def _prepare(args):
    cfg = load_config(args)
    if cfg.data != "synthetic" and not Path(cfg.data).is_file():
        raise DatasetError(f"data file not found: {cfg.data}")
    out = Path(args.out or default_out())
    out.mkdir(parents=True, exist_ok=True)
    return cfg, engine.load_splits(cfg), out


def cmd_run(args) -> int:
    cfg, splits, out = _prepare(args)
    # worker_count is a scheduling hint; leaving it out keeps artifacts comparable
    manifest = {"config": cfg.to_dict(include_hints=False), "trial_seeds": {}}
    for t in range(cfg.trials):
        res = engine.run_moel(cfg, t, splits)
        engine.write_run(res, cfg, out)
        manifest["trial_seeds"][str(t)] = res.trial_seed
        log.info("trial %d: final HV %.6f, archive %d, %.1fs", t, res.hv[-1], len(res.archive), res.wall_seconds)
    (out / "run_manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def cmd_baselines(args) -> int:
    cfg, splits, out = _prepare(args)
    rows = engine.run_baselines(cfg, splits)
    engine.write_baselines(rows, out)
    for m, v, _ in rows:
        log.info("%-16s error=%.4f delta_tpr=%.4f", m, v.error, v.delta_tpr)
    return 0


# --- report ----------------------------------------------------------------

def _read_csv(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise ArtifactError(f"cannot read {path}: {exc}") from None


def _num(row, key, path, conv=float):
    try:
        v = conv(row[key])
    except (KeyError, TypeError, ValueError):
        raise ArtifactError(f"{path}: bad or missing {key!r} in row {row}") from None
    if conv is float and not math.isfinite(v):
        raise ArtifactError(f"{path}: non-finite {key!r}")
    return v


def load_run_dir(out: Path):
    """Returns (trials, baselines): trials maps index to dict(points, hv)."""
    tdirs = sorted(p for p in out.glob("trial_*") if p.is_dir())
    if not tdirs:
        raise ArtifactError(f"no trial_* directories under {out}")
    trials = {}
    for td in tdirs:
        try:
            t = int(td.name.split("_", 1)[1])
        except ValueError:
            raise ArtifactError(f"unexpected directory name {td.name}") from None
        pts_path, hv_path = td / "points.csv", td / "hv.csv"
        points = [
            (_num(r, "id", pts_path, int), ObjectivePoint(_num(r, "error", pts_path), _num(r, "delta_tpr", pts_path)))
            for r in _read_csv(pts_path)
        ]
        hv = [_num(r, "hv", hv_path) for r in _read_csv(hv_path)]
        if not points or not hv:
            raise ArtifactError(f"{td}: empty points or hv file")
        trials[t] = {"points": points, "hv": hv}
    lengths = {len(v["hv"]) for v in trials.values()}
    if len(lengths) != 1:
        raise ArtifactError(f"trials disagree on HV curve length: {sorted(lengths)}")
    baselines = []
    bpath = out / "baselines.csv"
    if bpath.exists():
        for r in _read_csv(bpath):
            if "method" not in r:
                raise ArtifactError(f"{bpath}: missing method column")
            baselines.append((r["method"], ObjectivePoint(_num(r, "error", bpath), _num(r, "delta_tpr", bpath))))
    return trials, baselines


class _Tagged:
    def __init__(self, trial, id_, objectives):
        self.trial, self.id, self.objectives = trial, id_, objectives


class _Carrier:
    # update_archive keeps whatever sits in ``params``; use it to carry the record
    def __init__(self, t):
        self.id, self.objectives, self.params = t.id, t.objectives, t


def front_of(tagged):
    """Non-dominated subset; of identical points only the first is kept."""
    entries = update_archive(Archive(), [_Carrier(t) for t in tagged]).entries
    return sorted((e.params for e in entries), key=lambda t: (*t.objectives, t.trial, t.id))


def build_report(out: Path) -> dict:
    trials, baselines = load_run_dir(out)
    fmt = engine.fmt
    order = sorted(trials)

    hv = np.array([trials[t]["hv"] for t in order])
    rows = [(g, fmt(hv[:, g].mean()), fmt(hv[:, g].std())) for g in range(hv.shape[1])]
    engine._write_rows(out / "hv_curve.csv", ["generation", "mean_hv", "std_hv"], rows)

    tagged = [_Tagged(t, i, o) for t in order for i, o in trials[t]["points"]]
    cols = ["error", "delta_tpr", "trial", "id"]
    as_row = lambda x: (fmt(x.objectives.error), fmt(x.objectives.delta_tpr), x.trial, x.id)
    engine._write_rows(out / "all_points.csv", cols, [as_row(x) for x in tagged])
    front = front_of(tagged)
    engine._write_rows(out / "front.csv", cols, [as_row(x) for x in front])

    per_trial = []
    for t in order:
        per_trial.extend(front_of([x for x in tagged if x.trial == t]))
    engine._write_rows(out / "fronts_by_trial.csv", cols, [as_row(x) for x in per_trial])

    fpts = [x.objectives for x in front]
    comp = [("front", fmt(p.error), fmt(p.delta_tpr), "", "") for p in fpts]
    stats = {"front_size": len(front), "baselines": {}}
    for m, b in baselines:
        dom = any(dominates(p, b) for p in fpts)
        weak = any(p.error <= b.error and p.delta_tpr <= b.delta_tpr for p in fpts)
        beats = any(dominates(b, p) for p in fpts)
        stats["baselines"][m] = {"dominated": dom, "weakly_dominated": weak, "dominates_front_point": beats}
        comp.append((m, fmt(b.error), fmt(b.delta_tpr), int(dom), int(beats)))
    engine._write_rows(
        out / "comparison.csv",
        ["source", "error", "delta_tpr", "dominated_by_front", "dominates_front_point"],
        comp,
    )

    try:
        r = pearson([p.error for p in fpts], [p.delta_tpr for p in fpts])
    except UndefinedCorrelationError:
        r = float("nan")
    stats["pearson_r"] = r
    lines = [
        f"trials: {len(order)}",
        f"front_size: {len(front)}",
        f"pearson_r: {fmt(r)}",
        f"baselines: {len(baselines)}",
        f"baselines_dominated: {sum(v['dominated'] for v in stats['baselines'].values())}",
        f"baselines_weakly_dominated: {sum(v['weakly_dominated'] for v in stats['baselines'].values())}",
        f"baselines_dominating_a_front_point: {sum(v['dominates_front_point'] for v in stats['baselines'].values())}",
        f"initial_mean_hv: {fmt(hv[:, 0].mean())}",
        f"final_mean_hv: {fmt(hv[:, -1].mean())}",
    ]
    for m, v in stats["baselines"].items():
        lines.append(f"baseline {m}: dominated={int(v['dominated'])} weakly_dominated={int(v['weakly_dominated'])}")
    (out / "stats.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return stats


def cmd_report(args) -> int:
    out = Path(args.out or default_out())
    try:
        build_report(out)
    except ArtifactError as exc:
        print(f"fapareto report: {exc}", file=sys.stderr)
        return EXIT_ARTIFACTS
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s", stream=sys.stderr)
    handler = {"run": cmd_run, "baselines": cmd_baselines, "report": cmd_report}[args.command]
    try:
        return handler(args)
    except DatasetError as exc:
        print(f"fapareto {args.command}: dataset error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConfigError as exc:
        print(f"fapareto {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
