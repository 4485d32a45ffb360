"""Pipeline orchestration: ingest, stats, split, convert, featurize,
train-eval, report.

Every stage reads and writes files under one output directory, so stages
can run in separate invocations (or be deleted and regenerated) without
touching upstream artifacts. All stages are deterministic for a fixed
config: re-running produces byte-identical manifests, splits, images,
feature CSVs, and reports.
"""

import argparse
import concurrent.futures
import hashlib
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from binviz import corpus, features, imaging, learn
from binviz.corpus import CorpusError
from binviz.learn.knn import predict as knn_batch_predict

log = logging.getLogger("binviz")

FEATURE_KINDS = ("hog", "haralick", "histogram")
ERROR_PREFIX = "binviz: error:"


@dataclass(frozen=True)
class PipelineConfig:
    corpus_root: str = ""
    out_dir: str = "out"
    label_file: str = None
    techniques: tuple = imaging.TECHNIQUES
    feature_kinds: tuple = FEATURE_KINDS
    ratios: tuple = (80, 10, 10)
    seed: int = 42
    search_budget: int = 20
    jobs: int = 1
    hilbert_style: str = "byteclass"
    bigram_mode: str = "saturate"
    norm_scope: str = "train"  # "train" (leakage-free) or "all" (paper-faithful)
    hog_orientations: int = 9
    hog_cell: int = 8
    hog_block: int = 2
    haralick_levels: int = 16
    haralick_aggregate: str = "mean"
    forest_trees: int = 100
    forest_max_features: int = 16
    forest_min_leaf: int = 1

    def validate(self):
        for t in self.techniques:
            if t not in imaging.TECHNIQUES:
                raise ValueError(f"unknown technique: {t}")
        for k in self.feature_kinds:
            if k not in FEATURE_KINDS:
                raise ValueError(f"unknown feature kind: {k}")
        if not self.techniques:
            raise ValueError("techniques must be non-empty")
        if sum(self.ratios) != 100:
            raise ValueError("ratios must sum to 100")
        if self.norm_scope not in ("train", "all"):
            raise ValueError("norm_scope must be 'train' or 'all'")

    def hog_config(self):
        return features.HogConfig(
            orientations=self.hog_orientations, cell=self.hog_cell,
            block=self.hog_block,
        )

    def forest_config(self):
        return learn.ForestConfig(
            trees=self.forest_trees, max_features=self.forest_max_features,
            min_leaf=self.forest_min_leaf, seed=self.seed,
        )

    def snapshot(self):
        # jobs is an execution detail, not part of the experiment identity
        snap = asdict(self)
        del snap["jobs"]
        return snap


def load_config(path=None, **overrides):
    cfg = PipelineConfig()
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - set(asdict(cfg))
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key in ("techniques", "feature_kinds", "ratios"):
            if key in data:
                data[key] = tuple(data[key])
        cfg = replace(cfg, **data)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------- paths

def _out(cfg):
    path = Path(cfg.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _manifest_path(cfg):
    return _out(cfg) / "manifest.csv"


def _split_path(cfg):
    return _out(cfg) / "split.csv"


def _features_dir(cfg):
    return _out(cfg) / "features"


def _reports_dir(cfg):
    return _out(cfg) / "reports"


def _require(path, hint):
    if not Path(path).exists():
        raise CorpusError(f"{path} not found; run `binviz {hint}` first")
    return path


def _sha256(data):
    return hashlib.sha256(data).hexdigest()


def _update_ledger(cfg, stage, file_hashes):
    """Record config snapshot + per-stage output checksums."""
    path = _out(cfg) / "ledger.json"
    ledger = {}
    if path.exists():
        ledger = json.loads(path.read_text(encoding="utf-8"))
    ledger[stage] = {
        "config": cfg.snapshot(),
        "files": dict(sorted(file_hashes.items())),
        "completed_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    path.write_text(json.dumps(ledger, indent=2, sort_keys=True), encoding="utf-8")


def _hash_file(path):
    return _sha256(Path(path).read_bytes())


# ---------------------------------------------------------------- stages

def cmd_ingest(cfg):
    if not cfg.corpus_root:
        raise CorpusError("no corpus root configured (use --root or the config file)")
    manifest = corpus.ingest(cfg.corpus_root, label_file=cfg.label_file)
    path = _manifest_path(cfg)
    manifest.write_csv(path)
    log.info("ingested %d samples, %d families -> %s",
             len(manifest), len(manifest.family_census), path)
    _update_ledger(cfg, "ingest", {path.name: _hash_file(path)})
    return manifest


def cmd_stats(cfg):
    manifest = corpus.CorpusManifest.read_csv(_require(_manifest_path(cfg), "ingest"))
    stats = corpus.family_stats(manifest)
    path = _out(cfg) / "stats.csv"
    corpus.write_stats_csv(stats, path)
    log.info("wrote stats for %d families -> %s", len(stats), path)
    _update_ledger(cfg, "stats", {path.name: _hash_file(path)})
    return stats


def cmd_split(cfg):
    manifest = corpus.CorpusManifest.read_csv(_require(_manifest_path(cfg), "ingest"))
    split = corpus.stratified_split(manifest, ratios=cfg.ratios, seed=cfg.seed)
    path = _split_path(cfg)
    corpus.write_split_csv(split, path)
    log.info("split %d samples -> %s", len(split.assignment), path)
    _update_ledger(cfg, "split", {path.name: _hash_file(path)})
    return split


def _spiral_context(cfg, manifest):
    """Gini ranking + per-feature norms for the spiral technique.

    Computed on the training partition by default; ``norm_scope="all"``
    uses the whole corpus instead.
    """
    if cfg.norm_scope == "train":
        split_file = _split_path(cfg)
        if not split_file.exists():
            raise CorpusError(
                "spiral conversion needs the training partition; "
                "run `binviz split` first (or set norm_scope='all')"
            )
        split = corpus.read_split_csv(split_file)
        scope = [e for e in manifest if split.assignment.get(e.id) == "train"]
    else:
        scope = list(manifest)
    hists = np.vstack([corpus.byte_histogram(e) for e in scope])
    labels = [e.family for e in scope]
    ranking = learn.fit_forest(hists, labels, cfg.forest_config())
    mins, maxs = learn.feature_norms(hists)
    ranking.write_csv(_out(cfg) / "spiral_ranking.csv")
    return ranking, mins, maxs


def _write_if_changed(path, data):
    """Write bytes unless an identical file already exists; return sha256."""
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.exists() and path.read_bytes() == data:
        return _sha256(data)
    path.write_bytes(data)
    return _sha256(data)


def _convert_one(args):
    entry, techniques, options, out_dir, spiral_data = args
    sample = corpus.load_sample(entry)
    hashes = {}
    for tech in techniques:
        if tech == "spiral":
            ranking, mins, maxs = spiral_data
            canvas = imaging.to_spiral(
                corpus.byte_histogram(entry), ranking, (mins, maxs)
            )
        else:
            canvas = imaging.convert(sample, tech, **options)
        path = Path(out_dir) / tech / entry.family / f"{entry.id}.png"
        rel = f"{tech}/{entry.family}/{entry.id}.png"
        hashes[rel] = _write_if_changed(path, imaging.encode_png(canvas))
    return hashes


def _pool_iter(func, args, jobs):
    """Yield func(arg) results in order, optionally from a process pool."""
    if jobs <= 1:
        for arg in args:
            yield func(arg)
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            yield from pool.map(func, args, chunksize=4)


def _pool_map(func, args, jobs):
    return list(_pool_iter(func, args, jobs))


def cmd_convert(cfg):
    manifest = corpus.CorpusManifest.read_csv(_require(_manifest_path(cfg), "ingest"))
    spiral_data = None
    if "spiral" in cfg.techniques:
        spiral_data = _spiral_context(cfg, manifest)
    options = {"hilbert_style": cfg.hilbert_style, "bigram_mode": cfg.bigram_mode}
    args = [(e, cfg.techniques, options, str(_out(cfg)), spiral_data)
            for e in manifest]
    all_hashes = {}
    if spiral_data is not None:
        all_hashes["spiral_ranking.csv"] = _hash_file(_out(cfg) / "spiral_ranking.csv")
    for hashes in _pool_map(_convert_one, args, cfg.jobs):
        all_hashes.update(hashes)
    log.info("converted %d samples x %d techniques",
             len(manifest), len(cfg.techniques))
    _update_ledger(cfg, "convert", all_hashes)
    return all_hashes


def _featurize_one(args):
    png_path, kind, cfg = args
    canvas = imaging.read_png(png_path)
    return features.featurize(
        canvas, kind, hog_cfg=cfg.hog_config(),
        haralick_levels=cfg.haralick_levels,
        haralick_aggregate=cfg.haralick_aggregate,
    ).values


def cmd_featurize(cfg):
    manifest = corpus.CorpusManifest.read_csv(_require(_manifest_path(cfg), "ingest"))
    split = corpus.read_split_csv(_require(_split_path(cfg), "split"))
    missing_parts = [e.id for e in manifest if e.id not in split.assignment]
    if missing_parts:
        raise CorpusError(f"split has no partition for: {missing_parts[:5]}")
    partitions = [split.assignment[e.id] for e in manifest]
    ids = [e.id for e in manifest]
    families = [e.family for e in manifest]
    fdir = _features_dir(cfg)
    fdir.mkdir(parents=True, exist_ok=True)
    hashes = {}

    image_kinds = [k for k in cfg.feature_kinds if k in ("hog", "haralick")]
    if image_kinds:
        missing = []
        for tech in cfg.techniques:
            paths = [_out(cfg) / tech / e.family / f"{e.id}.png" for e in manifest]
            if not all(p.exists() for p in paths):
                missing.append(tech)
        if missing:
            raise CorpusError(
                f"images missing for techniques {missing}; run `binviz convert` first"
            )
        for tech in cfg.techniques:
            paths = [_out(cfg) / tech / e.family / f"{e.id}.png" for e in manifest]
            for kind in image_kinds:
                rows = _pool_iter(
                    _featurize_one, [(str(p), kind, cfg) for p in paths], cfg.jobs
                )
                out_path = fdir / f"{tech}_{kind}.csv"
                features.write_feature_csv(out_path, ids, families, partitions, rows)
                hashes[f"features/{out_path.name}"] = _hash_file(out_path)
                log.info("featurized %s/%s -> %s", tech, kind, out_path)

    if "histogram" in cfg.feature_kinds:
        rows = (corpus.byte_histogram(e) for e in manifest)
        out_path = fdir / "histogram.csv"
        features.write_feature_csv(out_path, ids, families, partitions, rows)
        hashes[f"features/{out_path.name}"] = _hash_file(out_path)
        log.info("featurized histogram -> %s", out_path)

    _update_ledger(cfg, "featurize", hashes)
    return hashes


def _feature_file_name(path):
    stem = Path(path).stem
    if stem == "histogram":
        return "baseline", "histogram"
    technique, _, kind = stem.rpartition("_")
    return technique, kind


def cmd_train_eval(cfg, feature_file=None):
    if feature_file:
        paths = [Path(feature_file)]
    else:
        paths = sorted(_features_dir(cfg).glob("*.csv"))
        if not paths:
            raise CorpusError(
                f"no feature files under {_features_dir(cfg)}; "
                "run `binviz featurize` first"
            )
    rdir = _reports_dir(cfg)
    rdir.mkdir(parents=True, exist_ok=True)
    hashes = {}
    reports = []
    for path in paths:
        ids, families, partitions, matrix = features.read_feature_csv(
            _require(path, "featurize")
        )
        parts = {p: [i for i, part in enumerate(partitions) if part == p]
                 for p in corpus.PARTITIONS}
        for p, rows in parts.items():
            if not rows:
                raise CorpusError(f"{path}: partition {p!r} is empty")
        fam = np.asarray(families)
        trials = []
        model = learn.search_knn(
            matrix[parts["train"]], fam[parts["train"]],
            matrix[parts["val"]], fam[parts["val"]],
            budget=cfg.search_budget, seed=cfg.seed, trials_log=trials,
        )
        predictions = knn_batch_predict(model, matrix[parts["test"]])
        label_order = sorted(set(families))
        report = learn.evaluate(
            predictions, fam[parts["test"]], label_order,
            chosen_hyperparameters=model.hyperparameters(),
        )
        technique, kind = _feature_file_name(path)
        doc = {
            "source": path.name,
            "technique": technique,
            "kind": kind,
            "seed": cfg.seed,
            "search": {"budget": cfg.search_budget, "trials": trials},
            "config": cfg.snapshot(),
            **report.to_dict(),
        }
        report_path = rdir / f"{path.stem}.json"
        report_path.write_text(
            json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8"
        )
        conf_path = rdir / f"{path.stem}_confusion.csv"
        report.confusion.write_csv(conf_path)
        hashes[f"reports/{report_path.name}"] = _hash_file(report_path)
        hashes[f"reports/{conf_path.name}"] = _hash_file(conf_path)
        log.info("train-eval %s: accuracy %.4f (k=%d %s %s)",
                 path.stem, report.accuracy, model.k, model.weights, model.metric)
        reports.append(doc)
    _update_ledger(cfg, "train_eval", hashes)
    return reports


SUMMARY_METRICS = ("accuracy", "precision", "recall", "f1")


def cmd_report(cfg):
    rdir = _reports_dir(cfg)
    docs = []
    if rdir.is_dir():
        for path in sorted(rdir.glob("*.json")):
            docs.append(json.loads(path.read_text(encoding="utf-8")))
    hashes = {}
    if not docs:
        log.warning("no evaluation reports under %s; emitting empty summary", rdir)
        path = _out(cfg) / "summary.csv"
        path.write_text("technique,kind," + ",".join(SUMMARY_METRICS) + ",best_in\n",
                        encoding="utf-8")
        _update_ledger(cfg, "report", {path.name: _hash_file(path)})
        return []

    by_kind = {}
    for doc in docs:
        by_kind.setdefault(doc["kind"], []).append(doc)
    outputs = []
    for kind, group in sorted(by_kind.items()):
        group.sort(key=lambda d: d["technique"])
        best = {
            m: max(d["metrics"][m] for d in group) for m in SUMMARY_METRICS
        }
        csv_path = _out(cfg) / f"summary_{kind}.csv"
        md_path = _out(cfg) / f"summary_{kind}.md"
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write("technique," + ",".join(SUMMARY_METRICS) + ",best_in\n")
            for doc in group:
                m = doc["metrics"]
                wins = [k for k in SUMMARY_METRICS if m[k] == best[k]]
                fh.write(doc["technique"] + ","
                         + ",".join(repr(m[k]) for k in SUMMARY_METRICS)
                         + "," + ";".join(wins) + "\n")
        with open(md_path, "w", encoding="utf-8") as fh:
            fh.write(f"# {kind} features\n\n")
            fh.write("| technique | " + " | ".join(SUMMARY_METRICS) + " |\n")
            fh.write("|---" * (len(SUMMARY_METRICS) + 1) + "|\n")
            for doc in group:
                m = doc["metrics"]
                cells = [
                    f"**{m[k]:.4f}**" if m[k] == best[k] else f"{m[k]:.4f}"
                    for k in SUMMARY_METRICS
                ]
                fh.write(f"| {doc['technique']} | " + " | ".join(cells) + " |\n")
        hashes[csv_path.name] = _hash_file(csv_path)
        hashes[md_path.name] = _hash_file(md_path)
        outputs.append(csv_path)
        log.info("summary for %s features -> %s", kind, csv_path)
    _update_ledger(cfg, "report", hashes)
    return outputs


# ---------------------------------------------------------------- parser

def _add_global_flags(parser):
    # registered on the main parser AND each subparser (SUPPRESS defaults,
    # so they can be given on either side of the subcommand)
    parser.add_argument("--config", default=argparse.SUPPRESS,
                        help="JSON config file")
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="global RNG seed (default 42)")
    parser.add_argument("--out", default=argparse.SUPPRESS,
                        help="output directory")
    parser.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="parallel workers for convert/featurize")
    parser.add_argument("-v", "--verbose", action="store_true",
                        default=argparse.SUPPRESS)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="binviz",
        description="Byte-stream to image conversion and evaluation pipeline",
    )
    _add_global_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    def subcommand(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _add_global_flags(p)
        return p

    p = subcommand("ingest", "scan a corpus tree into a manifest")
    p.add_argument("--root", help="corpus root directory")
    p.add_argument("--labels", help="CSV of path,family overriding directory labels")

    subcommand("stats", "per-family size statistics")

    p = subcommand("split", "seeded stratified train/val/test split")
    p.add_argument("--ratios", help="three percentages, e.g. 80,10,10")

    p = subcommand("convert", "render analysis images")
    p.add_argument("--techniques", help="comma list (default: all eight)")
    p.add_argument("--norm-scope", choices=("train", "all"), dest="norm_scope")

    p = subcommand("featurize", "extract feature matrices")
    p.add_argument("--kinds", help="comma list of hog,haralick,histogram")
    p.add_argument("--techniques", help="comma list (default: all eight)")

    p = subcommand("train-eval", "tune, train, and evaluate KNN")
    p.add_argument("--features", help="one feature CSV (default: all)")
    p.add_argument("--budget", type=int, help="search trials (default 20)")

    subcommand("report", "summarize evaluation reports")
    return parser


def _config_from_args(args):
    overrides = {
        "seed": getattr(args, "seed", None),
        "out_dir": getattr(args, "out", None),
        "jobs": getattr(args, "jobs", None),
        "corpus_root": getattr(args, "root", None),
        "label_file": getattr(args, "labels", None),
        "norm_scope": getattr(args, "norm_scope", None),
        "search_budget": getattr(args, "budget", None),
    }
    if getattr(args, "ratios", None):
        overrides["ratios"] = tuple(int(v) for v in args.ratios.split(","))
    if getattr(args, "techniques", None):
        overrides["techniques"] = tuple(args.techniques.split(","))
    if getattr(args, "kinds", None):
        overrides["feature_kinds"] = tuple(args.kinds.split(","))
    return load_config(getattr(args, "config", None), **overrides)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _config_from_args(args)
        if args.command == "ingest":
            cmd_ingest(cfg)
        elif args.command == "stats":
            cmd_stats(cfg)
        elif args.command == "split":
            cmd_split(cfg)
        elif args.command == "convert":
            cmd_convert(cfg)
        elif args.command == "featurize":
            cmd_featurize(cfg)
        elif args.command == "train-eval":
            cmd_train_eval(cfg, feature_file=args.features)
        elif args.command == "report":
            cmd_report(cfg)
        return 0
    except (CorpusError, ValueError, OSError) as exc:
        print(f"{ERROR_PREFIX} {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
