"""Corpus ingestion, sample normalization, statistics, and splits.

Every sample is normalized to a fixed 50,176-byte buffer (224 * 224):
longer files are truncated, shorter ones zero-padded. Byte histograms are
the one exception - they are computed over ALL original bytes of a file,
not the truncated buffer, so the baseline features see the whole sample.
"""

import csv
import hashlib
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from binviz import BUFFER_LEN
from binviz.rng import subseed

log = logging.getLogger(__name__)

PARTITIONS = ("train", "val", "test")


class CorpusError(RuntimeError):
    """Corpus-level failure (empty corpus, unusable family, bad labels)."""


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    family: str
    source_path: str
    original_len: int


@dataclass(frozen=True)
class RawSample:
    """A labeled byte buffer of exactly BUFFER_LEN bytes."""

    id: str
    family: str
    original_len: int
    bytes: np.ndarray
    source_path: str


@dataclass(frozen=True)
class FamilyStats:
    family: str
    count: int
    min_bytes: int
    max_bytes: int
    mean_bytes: float
    pct_truncated: float
    pct_padded: float


@dataclass(frozen=True)
class SplitAssignment:
    seed: int
    ratios: tuple
    assignment: dict  # id -> "train" | "val" | "test"

    def ids(self, partition):
        return [i for i, p in self.assignment.items() if p == partition]


class CorpusManifest:
    """Ordered list of corpus entries plus a per-family census."""

    def __init__(self, entries):
        ids = [e.id for e in entries]
        if len(set(ids)) != len(ids):
            raise CorpusError("duplicate sample ids in manifest")
        self.entries = list(entries)
        self.family_census = {}
        for e in self.entries:
            self.family_census[e.family] = self.family_census.get(e.family, 0) + 1

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def by_id(self, sample_id):
        for e in self.entries:
            if e.id == sample_id:
                return e
        raise KeyError(sample_id)

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "family", "source_path", "original_len"])
            for e in self.entries:
                writer.writerow([e.id, e.family, e.source_path, e.original_len])

    @classmethod
    def read_csv(cls, path):
        entries = []
        with open(path, "r", encoding="utf-8", newline="") as fh:
            for row in csv.DictReader(fh):
                entries.append(
                    ManifestEntry(
                        id=row["id"],
                        family=row["family"],
                        source_path=row["source_path"],
                        original_len=int(row["original_len"]),
                    )
                )
        return cls(entries)


def _sample_id(rel_path):
    stem = Path(rel_path).stem
    safe = re.sub(r"[^A-Za-z0-9._-]", "_", stem)[:48] or "sample"
    digest = hashlib.sha1(str(rel_path).encode("utf-8")).hexdigest()[:10]
    return f"{safe}-{digest}"


def _read_label_file(path):
    labels = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() == "path":
                continue
            if len(row) < 2:
                raise CorpusError(f"label file row needs 2 columns: {row!r}")
            labels[row[0].strip()] = row[1].strip()
    return labels


def ingest(root_dir, label_file=None):
    """Scan a directory tree into a manifest.

    Families come from each file's parent directory name, unless
    ``label_file`` (CSV of ``path,family`` with paths relative to
    ``root_dir``) is given, in which case it is the sole label source and
    files absent from it are skipped. Zero-byte and unreadable files are
    skipped with a logged reason. Entry order is lexicographic by relative
    path, so ingestion is reproducible.
    """
    root = Path(root_dir)
    if not root.is_dir():
        raise CorpusError(f"corpus root not found: {root}")
    labels = _read_label_file(label_file) if label_file else None
    label_path = Path(label_file).resolve() if label_file else None

    entries = []
    paths = sorted(
        (p for p in root.rglob("*") if p.is_file()),
        key=lambda p: p.relative_to(root).as_posix(),
    )
    for path in paths:
        if label_path is not None and path.resolve() == label_path:
            continue
        rel = path.relative_to(root).as_posix()
        try:
            size = path.stat().st_size
        except OSError as exc:
            log.warning("skipping %s: %s", rel, exc)
            continue
        if size == 0:
            log.warning("skipping %s: empty file", rel)
            continue
        if labels is not None:
            family = labels.get(rel)
            if family is None:
                log.warning("skipping %s: not in label file", rel)
                continue
        else:
            family = path.parent.name
        entries.append(
            ManifestEntry(
                id=_sample_id(rel),
                family=family,
                source_path=str(path),
                original_len=size,
            )
        )
    if not entries:
        raise CorpusError(f"no usable samples under {root}")
    return CorpusManifest(entries)


def load_sample(entry):
    """Load an entry as a fixed-length RawSample (truncate or zero-pad)."""
    data = np.fromfile(entry.source_path, dtype=np.uint8)
    if data.size == 0:
        raise CorpusError(f"empty file: {entry.source_path}")
    buf = np.zeros(BUFFER_LEN, dtype=np.uint8)
    n = min(data.size, BUFFER_LEN)
    buf[:n] = data[:n]
    return RawSample(
        id=entry.id,
        family=entry.family,
        original_len=int(data.size),
        bytes=buf,
        source_path=entry.source_path,
    )


def byte_histogram(entry):
    """Normalized byte-value frequencies over ALL bytes of the source file."""
    data = np.fromfile(entry.source_path, dtype=np.uint8)
    if data.size == 0:
        raise CorpusError(f"empty file: {entry.source_path}")
    counts = np.bincount(data, minlength=256)
    return counts.astype(np.float64) / data.size


def family_stats(manifest):
    """Per-family size statistics over original (pre-truncation) lengths."""
    if len(manifest) == 0:
        raise CorpusError("empty manifest")
    stats = []
    for family in sorted(manifest.family_census):
        lens = [e.original_len for e in manifest if e.family == family]
        n = len(lens)
        stats.append(
            FamilyStats(
                family=family,
                count=n,
                min_bytes=min(lens),
                max_bytes=max(lens),
                mean_bytes=sum(lens) / n,
                pct_truncated=100.0 * sum(1 for v in lens if v > BUFFER_LEN) / n,
                pct_padded=100.0 * sum(1 for v in lens if v < BUFFER_LEN) / n,
            )
        )
    return stats


def write_stats_csv(stats, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["family", "count", "min_bytes", "max_bytes", "mean_bytes",
             "pct_truncated", "pct_padded"]
        )
        for s in stats:
            writer.writerow(
                [s.family, s.count, s.min_bytes, s.max_bytes,
                 repr(s.mean_bytes), repr(s.pct_truncated), repr(s.pct_padded)]
            )


def _allocate(n, ratios):
    """Largest-remainder allocation of n samples to the three partitions.

    Every partition is guaranteed at least one sample (requires n >= 3);
    the shortfall is taken from the largest partition.
    """
    quotas = [n * r / 100.0 for r in ratios]
    counts = [math.floor(q) for q in quotas]
    order = sorted(range(3), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[: n - sum(counts)]:
        counts[i] += 1
    for i in range(3):
        if counts[i] == 0:
            donor = max(range(3), key=lambda j: (counts[j], -j))
            counts[donor] -= 1
            counts[i] += 1
    return counts


def stratified_split(manifest, ratios=(80, 10, 10), seed=42):
    """Seeded per-family shuffle and allocation into train/val/test.

    Each family is shuffled with its own RNG derived from (seed, family),
    so adding or removing one family never perturbs another family's
    assignment.
    """
    if len(ratios) != 3 or sum(ratios) != 100 or min(ratios) <= 0:
        raise ValueError(f"ratios must be 3 positive values summing to 100: {ratios}")
    assignment = {}
    for family in sorted(manifest.family_census):
        ids = [e.id for e in manifest if e.family == family]
        if len(ids) < 3:
            raise CorpusError(
                f"family {family!r} has {len(ids)} samples; "
                "need >= 3 to populate train/val/test"
            )
        counts = _allocate(len(ids), ratios)
        rng = np.random.default_rng(subseed(seed, family))
        perm = rng.permutation(len(ids))
        shuffled = [ids[i] for i in perm]
        bounds = (counts[0], counts[0] + counts[1])
        for pos, sample_id in enumerate(shuffled):
            if pos < bounds[0]:
                assignment[sample_id] = "train"
            elif pos < bounds[1]:
                assignment[sample_id] = "val"
            else:
                assignment[sample_id] = "test"
    return SplitAssignment(seed=seed, ratios=tuple(ratios), assignment=assignment)


def write_split_csv(split, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "partition"])
        for sample_id in sorted(split.assignment):
            writer.writerow([sample_id, split.assignment[sample_id]])


def read_split_csv(path, seed=None, ratios=None):
    assignment = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            if row["partition"] not in PARTITIONS:
                raise CorpusError(f"unknown partition {row['partition']!r}")
            assignment[row["id"]] = row["partition"]
    return SplitAssignment(seed=seed, ratios=ratios, assignment=assignment)
