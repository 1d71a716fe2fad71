"""Flow-record ingestion, encoding, and synthetic dataset generation.

Datasets are headerless CSV files described by a sidecar schema (one
"name,kind" line per column). Kinds:

    srcip        host identifier, excluded from the feature matrix
    numeric      float feature
    categorical  string feature, one-hot encoded
    label        ground-truth class (0 normal / 1 attack)
    drop         ignored column (ports, dstip, attack_cat, ...)
"""

import csv
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

KINDS = ("srcip", "numeric", "categorical", "label", "drop")


class DatasetError(ValueError):
    """Malformed input file, schema, or generator configuration."""


@dataclass(frozen=True)
class Schema:
    """Ordered column descriptors for a headerless CSV dataset."""

    columns: tuple[tuple[str, str], ...]

    def __post_init__(self):
        for name, kind in self.columns:
            if kind not in KINDS:
                raise DatasetError(f"unknown column kind {kind!r} for {name!r}")
        if sum(1 for _, k in self.columns if k == "srcip") != 1:
            raise DatasetError("schema needs exactly one srcip column")
        if sum(1 for _, k in self.columns if k == "label") != 1:
            raise DatasetError("schema needs exactly one label column")

    @property
    def arity(self) -> int:
        return len(self.columns)

    @property
    def feature_columns(self) -> tuple[tuple[str, str], ...]:
        return tuple((n, k) for n, k in self.columns if k in ("numeric", "categorical"))

    def index_of_kind(self, kind: str) -> int:
        return next(i for i, (_, k) in enumerate(self.columns) if k == kind)


def load_schema(path) -> Schema:
    """Read a sidecar schema file (CSV lines of "name,kind")."""
    columns = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh)):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise DatasetError(f"{path}: line {lineno}: expected 'name,kind'")
            columns.append((row[0].strip(), row[1].strip()))
    if not columns:
        raise DatasetError(f"{path}: empty schema")
    return Schema(tuple(columns))


def save_schema(schema: Schema, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerows(schema.columns)


def unsw_nb15_schema() -> Schema:
    """Bundled 49-column descriptor for the UNSW-NB15 raw CSV parts."""
    ref = resources.files("activeids") / "schemas" / "unsw_nb15.csv"
    with resources.as_file(ref) as path:
        return load_schema(path)


@dataclass(frozen=True)
class FlowRecord:
    """One network flow: host id, raw feature values, ground-truth label."""

    srcip: str
    features: tuple
    label: int


class RecordSet:
    """Immutable, columnar collection of flow records.

    Record order is identity: samples are index sets into the record list,
    and row i of any derived FeatureMatrix corresponds to record i.
    """

    def __init__(self, schema: Schema, srcips, labels, feature_data: dict):
        self.schema = schema
        self.srcips = np.asarray(srcips, dtype=object)
        self.labels = np.asarray(labels, dtype=np.int8)
        self.feature_data = feature_data
        n = len(self.srcips)
        if len(self.labels) != n:
            raise DatasetError("srcip/label column length mismatch")
        for name, col in feature_data.items():
            if len(col) != n:
                raise DatasetError(f"feature column {name!r} length mismatch")
        bad = ~np.isin(self.labels, (0, 1))
        if bad.any():
            raise DatasetError(f"labels must be 0 or 1 (row {int(np.argmax(bad))})")

    def __len__(self) -> int:
        return len(self.srcips)

    def record(self, i: int) -> FlowRecord:
        values = tuple(self.feature_data[name][i] for name, _ in self.schema.feature_columns)
        return FlowRecord(str(self.srcips[i]), values, int(self.labels[i]))

    def __iter__(self):
        return (self.record(i) for i in range(len(self)))

    def host_types(self) -> dict[str, str]:
        """Ground-truth host tag: attack if any record of the srcip is an attack."""
        out: dict[str, str] = {}
        for srcip, label in zip(self.srcips, self.labels):
            key = str(srcip)
            if label == 1:
                out[key] = "attack"
            else:
                out.setdefault(key, "normal")
        return out


def load(path, schema: Schema) -> RecordSet:
    """Load a headerless CSV into a RecordSet per the schema.

    Empty cells in numeric columns are treated as missing and read as 0.0;
    anything else unparsable raises naming the offending row.
    """
    srcip_idx = schema.index_of_kind("srcip")
    label_idx = schema.index_of_kind("label")
    numeric = {i: name for i, (name, kind) in enumerate(schema.columns) if kind == "numeric"}
    categorical = {i: name for i, (name, kind) in enumerate(schema.columns) if kind == "categorical"}

    srcips: list[str] = []
    labels: list[int] = []
    columns: dict[str, list] = {name: [] for name, _ in schema.feature_columns}

    with open(path, newline="", encoding="utf-8") as fh:
        for rowno, row in enumerate(csv.reader(fh)):
            if len(row) != schema.arity:
                raise DatasetError(
                    f"{path}: row {rowno}: expected {schema.arity} columns, got {len(row)}"
                )
            raw_label = row[label_idx].strip()
            if raw_label not in ("0", "1"):
                raise DatasetError(f"{path}: row {rowno}: unknown label {raw_label!r}")
            srcips.append(row[srcip_idx].strip())
            labels.append(int(raw_label))
            for i, name in numeric.items():
                cell = row[i].strip()
                if not cell:
                    columns[name].append(0.0)
                    continue
                try:
                    columns[name].append(float(cell))
                except ValueError:
                    raise DatasetError(
                        f"{path}: row {rowno}: column {name!r}: not numeric: {cell!r}"
                    ) from None
            for i, name in categorical.items():
                columns[name].append(row[i].strip())

    if not srcips:
        raise DatasetError(f"{path}: empty dataset")

    feature_data = {}
    for name, kind in schema.feature_columns:
        dtype = np.float64 if kind == "numeric" else object
        feature_data[name] = np.asarray(columns[name], dtype=dtype)
    return RecordSet(schema, srcips, labels, feature_data)


def save_csv(rs: RecordSet, path) -> None:
    """Write a RecordSet back out in the headerless CSV format."""
    feature_cols = [(name, kind) for name, kind in rs.schema.feature_columns]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        lookup = {name: rs.feature_data[name] for name, _ in feature_cols}
        for i in range(len(rs)):
            row = []
            for name, kind in rs.schema.columns:
                if kind == "srcip":
                    row.append(str(rs.srcips[i]))
                elif kind == "label":
                    row.append(str(int(rs.labels[i])))
                elif kind == "drop":
                    row.append("")
                else:
                    value = lookup[name][i]
                    row.append(repr(float(value)) if kind == "numeric" else str(value))
            writer.writerow(row)


@dataclass(frozen=True)
class FeatureMatrix:
    """Encoded, standardized numeric view of a RecordSet.

    Row i corresponds to record i. Categorical features are one-hot
    encoded (category order sorted for determinism); every column is then
    z-scored against the full dataset. Constant columns standardize to all
    zeros instead of dividing by zero.
    """

    values: np.ndarray
    col_names: tuple[str, ...]
    encoding_map: dict[str, dict[str, int]]
    means: np.ndarray
    stds: np.ndarray

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def _onehot_columns(rs: RecordSet):
    """Raw (un-standardized) encoded matrix plus column metadata."""
    blocks = []
    names: list[str] = []
    encoding_map: dict[str, dict[str, int]] = {}
    offset = 0
    for name, kind in rs.schema.feature_columns:
        col = rs.feature_data[name]
        if kind == "numeric":
            blocks.append(col.astype(np.float64).reshape(-1, 1))
            names.append(name)
            offset += 1
        else:
            values = sorted(set(str(v) for v in col))
            mapping = {v: offset + j for j, v in enumerate(values)}
            encoding_map[name] = mapping
            block = np.zeros((len(rs), len(values)), dtype=np.float64)
            for i, v in enumerate(col):
                block[i, mapping[str(v)] - offset] = 1.0
            blocks.append(block)
            names.extend(f"{name}={v}" for v in values)
            offset += len(values)
    return np.hstack(blocks), tuple(names), encoding_map


def encode(rs: RecordSet) -> FeatureMatrix:
    """Encode and standardize a RecordSet (fit on the full dataset)."""
    if len(rs) == 0:
        raise DatasetError("cannot encode an empty RecordSet")
    raw, names, encoding_map = _onehot_columns(rs)
    means = raw.mean(axis=0)
    stds = raw.std(axis=0)
    values = np.zeros_like(raw)
    nonconst = stds > 0
    values[:, nonconst] = (raw[:, nonconst] - means[nonconst]) / stds[nonconst]
    return FeatureMatrix(values, names, encoding_map, means, stds)


def apply_encoding(rs: RecordSet, reference: FeatureMatrix) -> FeatureMatrix:
    """Encode new records with a previously fit map and standardization.

    Unseen categorical values have no column to land in and raise.
    """
    if len(rs) == 0:
        raise DatasetError("cannot encode an empty RecordSet")
    raw = np.zeros((len(rs), reference.cols), dtype=np.float64)
    col_index = {name: j for j, name in enumerate(reference.col_names)}
    for name, kind in rs.schema.feature_columns:
        col = rs.feature_data[name]
        if kind == "numeric":
            raw[:, col_index[name]] = col.astype(np.float64)
        else:
            mapping = reference.encoding_map.get(name, {})
            for i, v in enumerate(col):
                key = str(v)
                if key not in mapping:
                    raise DatasetError(f"unseen categorical value {key!r} for {name!r}")
                raw[i, mapping[key]] = 1.0
    values = np.zeros_like(raw)
    nonconst = reference.stds > 0
    values[:, nonconst] = (raw[:, nonconst] - reference.means[nonconst]) / reference.stds[nonconst]
    return FeatureMatrix(values, reference.col_names, reference.encoding_map,
                         reference.means, reference.stds)


@dataclass(frozen=True)
class SynthConfig:
    """Desk-scale synthetic dataset with planted attacker hosts.

    Attack hosts emit round(attack_rate * records_per_host) attack-labeled
    records whose feature means sit `separation` standard deviations from
    the normal cloud; everything else is standard normal noise.
    """

    n_hosts: int = 40
    n_attack_hosts: int = 4
    records_per_host: int = 100
    n_features: int = 40
    attack_rate: float = 0.9
    separation: float = 1.5

    def __post_init__(self):
        if self.n_hosts < 1 or self.records_per_host < 1 or self.n_features < 1:
            raise DatasetError("host, record, and feature counts must be positive")
        if not 0 <= self.n_attack_hosts <= self.n_hosts:
            raise DatasetError("n_attack_hosts must be within [0, n_hosts]")
        if not 0 < self.attack_rate <= 1:
            raise DatasetError("attack_rate must be in (0, 1]")


def synth_schema(n_features: int) -> Schema:
    columns = [("srcip", "srcip")]
    columns += [(f"f{j:02d}", "numeric") for j in range(n_features)]
    columns.append(("label", "label"))
    return Schema(tuple(columns))


def _synth_srcip(host: int, attacker: bool) -> str:
    block = 200 if attacker else 10
    return f"10.{block}.{host // 256}.{host % 256}"


def synth_generate(cfg: SynthConfig, seed: int) -> RecordSet:
    """Generate a synthetic RecordSet; byte-identical for the same cfg+seed."""
    rng = np.random.default_rng(seed)
    schema = synth_schema(cfg.n_features)
    n_attack = int(round(cfg.attack_rate * cfg.records_per_host))

    srcips: list[str] = []
    labels = np.zeros(cfg.n_hosts * cfg.records_per_host, dtype=np.int8)
    features = rng.standard_normal((cfg.n_hosts * cfg.records_per_host, cfg.n_features))

    for host in range(cfg.n_hosts):
        attacker = host < cfg.n_attack_hosts
        start = host * cfg.records_per_host
        srcips.extend([_synth_srcip(host, attacker)] * cfg.records_per_host)
        if attacker and n_attack > 0:
            rows = start + rng.permutation(cfg.records_per_host)[:n_attack]
            labels[rows] = 1
            features[rows] += cfg.separation

    feature_data = {f"f{j:02d}": features[:, j].copy() for j in range(cfg.n_features)}
    return RecordSet(schema, srcips, labels, feature_data)
