"""Command-line surface: synth, analyze, laser, eval, compare.

Every command writes its outputs atomically (staged in a temp directory,
renamed into place) and leaves a run_manifest.json behind. Primary
outputs are byte-reproducible for identical inputs and seeds; wall-clock
timestamps live only in the run manifest.

Exit codes: 0 ok, 2 data error, 3 config error, 4 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import shutil
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from .anisotropy import frequency_bands, profile_layer
from .corpus import build_inventory
from .errors import ConfigError, DataError
from .laser import LaserConfig, laser
from .metrics import MetricsReport, layer_report
from .store import EmbeddingDataset, LayerMatrix, load_dataset, make_manifest, save_dataset
from .synth import default_spec, generate, write_ground_truth

EXIT_OK = 0
EXIT_DATA = 2
EXIT_CONFIG = 3
EXIT_INTERNAL = 4


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _config_hash(config: dict) -> str:
    return hashlib.sha256(_canonical_json(config).encode("utf-8")).hexdigest()


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def _write_manifest(out: Path, command: str, config: dict, inputs: list[str]) -> None:
    _write_json(
        out / "run_manifest.json",
        {
            "command": command,
            "config_hash": _config_hash(config),
            "input_paths": inputs,
            "output_paths": sorted(p.name for p in out.iterdir()),
            "toolkit_version": __version__,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        },
    )


class _staged_dir:
    """Stage outputs in a temp sibling; rename into place on success."""

    def __init__(self, target: str | Path):
        self.target = Path(target)

    def __enter__(self) -> Path:
        if self.target.exists() and any(self.target.iterdir()):
            raise ConfigError(f"output directory {self.target} exists and is not empty")
        self.target.parent.mkdir(parents=True, exist_ok=True)
        self.tmp = Path(
            tempfile.mkdtemp(prefix=self.target.name + ".tmp.", dir=self.target.parent)
        )
        return self.tmp

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            if self.target.exists():
                self.target.rmdir()
            self.tmp.replace(self.target)
        else:
            shutil.rmtree(self.tmp, ignore_errors=True)
        return False


def _digest_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# commands


def cmd_synth(args) -> int:
    if args.spec:
        with open(args.spec, encoding="utf-8") as f:
            spec = json.load(f)
    else:
        spec = default_spec(seed=args.seed)
    ds, truth = generate(spec)
    with _staged_dir(args.out) as tmp:
        save_dataset(ds, tmp)
        write_ground_truth(truth, tmp)
        _write_manifest(tmp, "synth", spec, [args.spec or "<default-spec>"])
    return EXIT_OK


def cmd_analyze(args) -> int:
    ds = load_dataset(args.dataset)
    bands = frequency_bands(ds.occurrences, args.bands)
    with _staged_dir(args.out) as tmp:
        for lm in ds.layers:
            prof = profile_layer(
                lm, ds.occurrences, k=args.k, seed=args.seed, d_top=args.d_top,
                pairing=args.pair_mode,
            )
            _write_json(
                tmp / f"profile_{lm.layer}.json",
                {
                    "layer": prof.layer,
                    "baseline_b": prof.baseline_b,
                    "sample_size": prof.sample_size,
                    "seed": prof.seed,
                    "pairing": args.pair_mode,
                    "explained_variance": [float(v) for v in prof.explained_variance],
                },
            )
            with open(tmp / f"projection_{lm.layer}.csv", "w", newline="\n") as f:
                f.write("occ_id,x,y,band\n")
                for o in ds.occurrences:
                    x, y = prof.top2_projection[o.occ_id]
                    f.write(f"{o.occ_id},{_fmt(x)},{_fmt(y)},{bands[o.occ_id]}\n")
        _write_manifest(
            tmp,
            "analyze",
            {"k": args.k, "seed": args.seed, "d_top": args.d_top,
             "bands": args.bands, "pair_mode": args.pair_mode},
            [str(args.dataset)],
        )
    return EXIT_OK


def _compute_report(ds: EmbeddingDataset, k: int, seed: int) -> MetricsReport:
    inventory = build_inventory(ds.occurrences)
    baselines = {
        lm.layer: profile_layer(lm, k=k, seed=seed).baseline_b for lm in ds.layers
    }
    return layer_report(ds, inventory, baselines)


def _write_report(report: MetricsReport, tmp: Path) -> None:
    rows = []
    for sc in report.sense_scores:
        rows.append(
            (sc.layer, "sense", sc.sense_key, sc.m, sc.sen_sim, sc.sen_sim_adjusted,
             "", "", "")
        )
    for ws in report.word_scores:
        rows.append(
            (ws.layer, "word", ws.lemma, "", ws.mean_sen_sim, ws.mean_sen_sim_adjusted,
             ws.inter_sim, ws.inter_sim_adjusted, ws.delta)
        )
    for ls in report.layer_summaries:
        rows.append(
            (ls.layer, "layer", "", ls.n_senses, ls.macro_sen_sim,
             ls.macro_sen_sim_adjusted, ls.macro_inter_sim,
             ls.macro_inter_sim_adjusted, ls.macro_delta)
        )
    with open(tmp / "metrics.csv", "w", newline="\n") as f:
        f.write("layer,scope,key,m,sen_sim,sen_sim_adj,inter_sim,inter_sim_adj,delta\n")
        for row in rows:
            f.write(
                ",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n"
            )
    _write_json(
        tmp / "metrics.json",
        {
            "senses": [sc.__dict__ for sc in report.sense_scores],
            "words": [ws.__dict__ for ws in report.word_scores],
            "layers": [
                {k: v for k, v in ls.__dict__.items()} for ls in report.layer_summaries
            ],
        },
    )


def cmd_eval(args) -> int:
    ds = load_dataset(args.dataset)
    report = _compute_report(ds, args.k, args.seed)
    if not report.sense_scores:
        raise DataError("dataset has no eligible sense annotations")
    with _staged_dir(args.out) as tmp:
        _write_report(report, tmp)
        _write_manifest(
            tmp, "eval", {"k": args.k, "seed": args.seed}, [str(args.dataset)]
        )
    return EXIT_OK


def cmd_laser(args) -> int:
    ds = load_dataset(args.dataset)
    with open(args.config, encoding="utf-8") as f:
        cfg = LaserConfig.from_dict(json.load(f))
    inventory = build_inventory(ds.occurrences)
    outputs = [laser(lm, inventory, cfg) for lm in ds.layers]
    new_layers = [o.q for o in outputs]
    out_ds = EmbeddingDataset(
        manifest=make_manifest(
            ds.manifest["model_name"] + "+laser", new_layers, len(ds.occurrences)
        ),
        occurrences=ds.occurrences,
        layers=new_layers,
    )
    with _staged_dir(args.out) as tmp:
        save_dataset(out_ds, tmp)
        _write_json(
            tmp / "laser_meta.json",
            {
                "config": cfg.to_dict(),
                "layers": [
                    {
                        "layer": o.q.layer,
                        "mean_vector": [float(v) for v in o.mean_vector],
                        "removed_components": [
                            [float(v) for v in row] for row in o.removed_components
                        ],
                        "convergence": o.convergence,
                    }
                    for o in outputs
                ],
            },
        )
        _write_manifest(tmp, "laser", cfg.to_dict(), [str(args.dataset)])
    return EXIT_OK


def cmd_compare(args) -> int:
    before_dir, after_dir = Path(args.before), Path(args.after)
    d1 = _digest_file(before_dir / "occurrences.tsv")
    d2 = _digest_file(after_dir / "occurrences.tsv")
    if d1 != d2:
        a = (before_dir / "occurrences.tsv").read_text().splitlines()
        b = (after_dir / "occurrences.tsv").read_text().splitlines()
        diff = next(
            (f"line {i}: {x!r} != {y!r}" for i, (x, y) in enumerate(zip(a, b)) if x != y),
            f"row counts differ: {len(a)} vs {len(b)}",
        )
        raise DataError(f"occurrence tables differ between datasets ({diff})")
    before = load_dataset(before_dir)
    after = load_dataset(after_dir)
    rep_b = _compute_report(before, args.k, args.seed)
    rep_a = _compute_report(after, args.k, args.seed)
    with _staged_dir(args.out) as tmp:
        cols = [
            "layer", "baseline_before", "baseline_after",
            "sen_sim_adj_before", "sen_sim_adj_after",
            "inter_sim_adj_before", "inter_sim_adj_after",
            "delta_before", "delta_after", "delta_gain",
        ]
        rows = []
        for lb, la in zip(rep_b.layer_summaries, rep_a.layer_summaries):
            rows.append(
                {
                    "layer": lb.layer,
                    "baseline_before": lb.baseline_b,
                    "baseline_after": la.baseline_b,
                    "sen_sim_adj_before": lb.macro_sen_sim_adjusted,
                    "sen_sim_adj_after": la.macro_sen_sim_adjusted,
                    "inter_sim_adj_before": lb.macro_inter_sim_adjusted,
                    "inter_sim_adj_after": la.macro_inter_sim_adjusted,
                    "delta_before": lb.macro_delta,
                    "delta_after": la.macro_delta,
                    "delta_gain": la.macro_delta - lb.macro_delta,
                }
            )
        with open(tmp / "comparison.csv", "w", newline="\n") as f:
            f.write(",".join(cols) + "\n")
            for r in rows:
                f.write(
                    ",".join(
                        _fmt(r[c]) if isinstance(r[c], float) else str(r[c]) for c in cols
                    )
                    + "\n"
                )
        _write_json(tmp / "comparison.json", rows)
        # Per-sense relatedness shift, one row per (layer, sense): figure data.
        by_key_a = {(s.layer, s.sense_key): s for s in rep_a.sense_scores}
        with open(tmp / "sense_shift.csv", "w", newline="\n") as f:
            f.write("layer,sense_key,sen_sim_before,sen_sim_after\n")
            for s in rep_b.sense_scores:
                sa = by_key_a.get((s.layer, s.sense_key))
                if sa is not None:
                    f.write(
                        f"{s.layer},{s.sense_key},{_fmt(s.sen_sim)},{_fmt(sa.sen_sim)}\n"
                    )
        _write_manifest(
            tmp, "compare", {"k": args.k, "seed": args.seed},
            [str(args.before), str(args.after)],
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="laserkit",
        description="Anisotropy and word-sense geometry analysis for "
        "contextual embedding datasets.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common_sampling(sp):
        sp.add_argument("--k", type=int, default=1000, help="baseline sample size")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("synth", help="generate a synthetic dataset")
    sp.add_argument("--spec", help="synth spec JSON (omit for the built-in template)")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("analyze", help="per-layer anisotropy profiles")
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--out", required=True)
    common_sampling(sp)
    sp.add_argument("--d-top", type=int, default=10, dest="d_top")
    sp.add_argument("--bands", type=int, default=4)
    sp.add_argument(
        "--pair-mode", choices=["all_pairs", "k_pairs"], default="all_pairs",
        dest="pair_mode",
    )
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("laser", help="apply the post-processing pipeline")
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--config", required=True, help="pipeline config JSON")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_laser)

    sp = sub.add_parser("eval", help="sense cohesion/separation metrics")
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--out", required=True)
    common_sampling(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("compare", help="before/after comparison tables")
    sp.add_argument("--before", required=True)
    sp.add_argument("--after", required=True)
    sp.add_argument("--out", required=True)
    common_sampling(sp)
    sp.set_defaults(func=cmd_compare)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # pragma: no cover
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
