"""Embedding-space probe: PCA projections and silhouette scores.

Token- and sentence-level embeddings arrive through a small interchange
format (a JSON manifest plus a raw float32 binary) produced by a separate
exporter, so this module never touches a text encoder.  Analysis is plain
numpy: PCA via SVD on mean-centered vectors, silhouettes by the brute-force
definition, which at these set sizes (tens of items) is also the fastest
thing to do.

Clustering configurations are data, not code: a config names groups whose
members are either literal item labels or ``category:<name>`` selectors
expanded against the embedding set at scoring time.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ValidationError

__all__ = [
    "CATEGORIES",
    "LEVELS",
    "EmbeddingItem",
    "EmbeddingSet",
    "ClusterConfig",
    "ProbeReport",
    "load_embeddings",
    "write_embeddings",
    "load_cluster_configs",
    "default_cluster_configs",
    "pca_project",
    "silhouette_score",
    "run_probe_suite",
]

CATEGORIES = ("named_illuminant", "kelvin_value", "general_lighting", "generic_numeral")
LEVELS = ("token", "sentence")

_METRICS = ("cosine", "euclidean")


@dataclass(frozen=True)
class EmbeddingItem:
    label: str
    category: str
    row_index: int


@dataclass
class EmbeddingSet:
    """Vectors plus per-row labels and categories for one encoder and level."""

    encoder_id: str
    level: str
    vectors: np.ndarray  # count x dim, float32 so interchange round-trips bit-exactly
    items: list
    data_file: str | None = None  # binary name from the manifest, kept for round-trips

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ValidationError(f"level must be one of {LEVELS}, got {self.level!r}")
        vectors = np.asarray(self.vectors, dtype=np.float32)
        if vectors.ndim != 2:
            raise ValidationError(f"vectors must be 2-D (count x dim), got shape {vectors.shape}")
        if vectors.shape[0] < 2:
            raise ValidationError(f"need >= 2 items, got {vectors.shape[0]}")
        if vectors.shape[1] < 1:
            raise ValidationError("embedding dim must be >= 1")
        if not np.all(np.isfinite(vectors)):
            raise ValidationError(f"{self.encoder_id}/{self.level}: non-finite embedding values")
        self.vectors = vectors
        if len(self.items) != vectors.shape[0]:
            raise ValidationError(
                f"{len(self.items)} items for {vectors.shape[0]} vector rows"
            )
        labels = [it.label for it in self.items]
        if len(set(labels)) != len(labels):
            dupe = next(l for l in labels if labels.count(l) > 1)
            raise ValidationError(f"duplicate item label {dupe!r}")
        rows = sorted(it.row_index for it in self.items)
        if rows != list(range(vectors.shape[0])):
            raise ValidationError("item row_index values must cover 0..count-1 exactly once")
        for it in self.items:
            if it.category not in CATEGORIES:
                raise ValidationError(
                    f"unknown category {it.category!r} for item {it.label!r}; "
                    f"valid: {', '.join(CATEGORIES)}"
                )
        self._by_label = {it.label: it for it in self.items}

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def labels_for_category(self, category: str):
        return [it.label for it in self.items if it.category == category]

    def row_for_label(self, label: str) -> int:
        try:
            return self._by_label[label].row_index
        except KeyError:
            raise ValidationError(f"label {label!r} not present in {self.encoder_id}/{self.level}") from None


def _default_data_file(encoder_id: str, level: str) -> str:
    stem = re.sub(r"[^A-Za-z0-9._-]+", "_", f"{encoder_id}_{level}")
    return f"{stem}.f32"


def _set_to_manifest_entry(es: EmbeddingSet, data_dir: Path) -> dict:
    name = es.data_file or _default_data_file(es.encoder_id, es.level)
    payload = np.ascontiguousarray(es.vectors, dtype="<f4").tobytes()
    (data_dir / name).write_bytes(payload)
    items = sorted(es.items, key=lambda it: it.row_index)
    return {
        "encoder_id": es.encoder_id,
        "level": es.level,
        "dim": es.dim,
        "count": es.count,
        "dtype": "f32le",
        "data_file": name,
        "checksum": hashlib.sha256(payload).hexdigest(),
        "items": [
            {"label": it.label, "category": it.category, "row_index": it.row_index}
            for it in items
        ],
    }


def write_embeddings(sets, manifest_path) -> Path:
    """Write one or more embedding sets as a manifest plus raw f32 binaries.

    Binary files land next to the manifest.  Loading and rewriting a manifest
    reproduces the binaries byte-identically (vectors are kept as float32).
    """
    if isinstance(sets, EmbeddingSet):
        sets = [sets]
    manifest_path = Path(manifest_path)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    entries = [_set_to_manifest_entry(es, manifest_path.parent) for es in sets]
    names = [e["data_file"] for e in entries]
    if len(set(names)) != len(names):
        raise ValidationError(f"embedding sets collide on data file names: {names}")
    doc = entries[0] if len(entries) == 1 else entries
    manifest_path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return manifest_path


def _parse_manifest_entry(obj: dict, manifest_path: Path) -> EmbeddingSet:
    where = str(manifest_path)
    try:
        encoder_id = obj["encoder_id"]
        level = obj["level"]
        dim = int(obj["dim"])
        count = int(obj["count"])
        dtype = obj["dtype"]
        data_file = obj["data_file"]
        checksum = obj["checksum"]
        raw_items = obj["items"]
    except KeyError as missing:
        raise ValidationError(f"{where}: manifest entry missing field {missing}") from None
    if dtype != "f32le":
        raise ValidationError(f"{where}: unsupported dtype {dtype!r} (expected 'f32le')")
    data_path = manifest_path.parent / data_file
    if not data_path.is_file():
        raise OSError(f"{where}: data file not found: {data_path}")
    payload = data_path.read_bytes()
    digest = hashlib.sha256(payload).hexdigest()
    if digest != checksum:
        raise ValidationError(
            f"{data_path}: checksum mismatch (manifest {checksum}, file {digest})"
        )
    expected = count * dim * 4
    if len(payload) != expected:
        complete_rows = len(payload) // (dim * 4)
        culprit = next((it for it in raw_items if it.get("row_index") == complete_rows), None)
        hint = f" (row {culprit['label']!r} is incomplete)" if culprit else ""
        raise ValidationError(
            f"{data_path}: holds {len(payload)} bytes but {count}x{dim} f32 rows "
            f"need {expected}; short at byte offset {complete_rows * dim * 4}{hint}"
        )
    vectors = np.frombuffer(payload, dtype="<f4").reshape(count, dim)
    items = [
        EmbeddingItem(
            label=it["label"], category=it["category"], row_index=int(it["row_index"])
        )
        for it in raw_items
    ]
    return EmbeddingSet(
        encoder_id=encoder_id, level=level, vectors=vectors, items=items, data_file=data_file
    )


def load_embeddings(manifest_path) -> list:
    """Load every embedding set a manifest describes (object or array form)."""
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise OSError(f"cannot read embedding manifest: {manifest_path}")
    try:
        doc = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ValidationError(f"{manifest_path}: invalid manifest: {err}") from None
    entries = doc if isinstance(doc, list) else [doc]
    return [_parse_manifest_entry(entry, manifest_path) for entry in entries]


@dataclass(frozen=True)
class ClusterConfig:
    """Named grouping; members are item labels or ``category:<name>`` selectors."""

    name: str
    groups: dict

    def __post_init__(self):
        if not self.name:
            raise ValidationError("cluster config needs a name")
        if len(self.groups) < 2:
            raise ValidationError(f"config {self.name!r} needs >= 2 groups")
        for gname, members in self.groups.items():
            if not members:
                raise ValidationError(f"config {self.name!r}: group {gname!r} is empty")

    def resolve(self, es: EmbeddingSet) -> dict:
        """Expand selectors against a set; returns group -> list of labels."""
        out = {}
        claimed = {}
        for gname, members in self.groups.items():
            labels = []
            for member in members:
                if member.startswith("category:"):
                    category = member.split(":", 1)[1]
                    if category not in CATEGORIES:
                        raise ValidationError(
                            f"config {self.name!r}: unknown category selector {member!r}"
                        )
                    expanded = es.labels_for_category(category)
                    if not expanded:
                        raise ValidationError(
                            f"config {self.name!r}: {member!r} matches no items in "
                            f"{es.encoder_id}/{es.level}"
                        )
                    labels.extend(expanded)
                else:
                    es.row_for_label(member)  # raises naming the label if absent
                    labels.append(member)
            for label in labels:
                if label in claimed and claimed[label] != gname:
                    raise ValidationError(
                        f"config {self.name!r}: label {label!r} lands in both "
                        f"{claimed[label]!r} and {gname!r}"
                    )
                claimed[label] = gname
            # selectors can repeat a label inside one group; keep first occurrence
            seen = set()
            out[gname] = [l for l in labels if not (l in seen or seen.add(l))]
        return out


def default_cluster_configs() -> list:
    """The four bundled pairings used by the probe when no config file is given."""
    text = resources.files("lumikit.data").joinpath("probe_configs.json").read_text("utf-8")
    return _parse_configs(json.loads(text), "<bundled probe_configs.json>")


def load_cluster_configs(path) -> list:
    path = Path(path)
    if not path.is_file():
        raise OSError(f"cannot read cluster config file: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ValidationError(f"{path}: invalid config file: {err}") from None
    return _parse_configs(doc, str(path))


def _parse_configs(doc, where: str) -> list:
    if isinstance(doc, dict):
        doc = [doc]
    if not isinstance(doc, list) or not doc:
        raise ValidationError(f"{where}: expected a config object or non-empty list")
    configs = []
    for entry in doc:
        try:
            configs.append(ClusterConfig(name=entry["name"], groups=dict(entry["groups"])))
        except (KeyError, TypeError) as err:
            raise ValidationError(f"{where}: malformed config entry: {err}") from None
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise ValidationError(f"{where}: duplicate config names in {names}")
    return configs


def pca_project(es: EmbeddingSet, out_dims: int = 2):
    """Project onto the top principal directions of the sample covariance.

    Returns ``(projections, explained)`` where projections is count x
    out_dims and explained holds each direction's fraction of total
    variance.  Directions are orthonormal with the sign convention that each
    direction's largest-magnitude coordinate is positive, which pins the
    otherwise arbitrary eigenvector signs.
    """
    limit = min(es.dim, es.count - 1)
    if not 1 <= out_dims <= limit:
        raise ValidationError(
            f"out_dims must lie in [1, {limit}] for {es.count} items of dim {es.dim}, "
            f"got {out_dims}"
        )
    x = es.vectors.astype(np.float64)
    centered = x - x.mean(axis=0)
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    total = float(np.sum(s**2))
    if total <= 1e-12 * es.count:
        raise ValidationError("embedding set is rank-deficient: all vectors identical")
    directions = vt[:out_dims]
    flip = np.sign(directions[np.arange(out_dims), np.argmax(np.abs(directions), axis=1)])
    flip[flip == 0] = 1.0
    directions = directions * flip[:, None]
    projections = centered @ directions.T
    explained = (s[:out_dims] ** 2) / total
    return projections, explained


def _pairwise_distances(x: np.ndarray, metric: str) -> np.ndarray:
    if metric == "euclidean":
        sq = np.sum(x**2, axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
        return np.sqrt(np.maximum(d2, 0.0))
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms == 0.0):
        raise ValidationError("cosine distance is undefined for a zero vector")
    unit = x / norms[:, None]
    return np.clip(1.0 - unit @ unit.T, 0.0, 2.0)


def silhouette_score(es: EmbeddingSet, config: ClusterConfig, metric: str = "cosine") -> float:
    """Mean silhouette over all grouped items, by the textbook definition.

    For item i: a = mean distance to its own group (self excluded), b = the
    smallest mean distance to any other group, s = (b - a) / max(a, b).
    Singleton-group items score 0 by convention.
    """
    if metric not in _METRICS:
        raise ValidationError(f"metric must be one of {_METRICS}, got {metric!r}")
    groups = config.resolve(es)
    rows = {g: np.array([es.row_for_label(l) for l in labels]) for g, labels in groups.items()}
    used = np.concatenate(list(rows.values()))
    x = es.vectors.astype(np.float64)[used]
    remap = {int(r): k for k, r in enumerate(used)}
    dist = _pairwise_distances(x, metric)
    scores = []
    for gname, members in rows.items():
        mine = np.array([remap[int(r)] for r in members])
        for i in mine:
            if len(mine) == 1:
                scores.append(0.0)
                continue
            a = dist[i, mine[mine != i]].mean()
            b = min(
                dist[i, np.array([remap[int(r)] for r in rows[other]])].mean()
                for other in rows
                if other != gname
            )
            top = max(a, b)
            scores.append(0.0 if top == 0.0 else (b - a) / top)
    return float(np.mean(scores))


@dataclass
class ProbeReport:
    """Per-set PCA and per-config silhouettes, with per-cell error notes."""

    metric: str
    entries: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"metric": self.metric, "sets": self.entries}

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


def run_probe_suite(sets, configs, metric: str = "cosine", out_dims: int = 2) -> ProbeReport:
    """Score every (set, config) cell and project every set.

    Cell failures (e.g. a selector matching nothing in some set) are
    recorded as error strings and the suite continues; output order follows
    the input order, so reports are deterministic.
    """
    if not sets or not configs:
        raise ValidationError("run_probe_suite needs at least one set and one config")
    report = ProbeReport(metric=metric)
    for es in sets:
        entry = {
            "encoder_id": es.encoder_id,
            "level": es.level,
            "count": es.count,
            "dim": es.dim,
        }
        try:
            projections, explained = pca_project(es, out_dims=out_dims)
            entry["pca"] = {
                "labels": [it.label for it in sorted(es.items, key=lambda it: it.row_index)],
                "projections": [[float(v) for v in row] for row in projections],
                "explained_variance": [float(v) for v in explained],
            }
        except ValidationError as err:
            entry["pca"] = {"error": str(err)}
        cells = {}
        for config in configs:
            try:
                cells[config.name] = silhouette_score(es, config, metric=metric)
            except ValidationError as err:
                cells[config.name] = {"error": str(err)}
        entry["silhouette"] = cells
        report.entries.append(entry)
    return report
