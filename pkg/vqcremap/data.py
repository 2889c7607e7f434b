"""Datasets: reading the UCI files, splitting and feature scaling.

Each dataset is described by a DatasetSchema - which file, which columns hold the
features and the label, how many rows to expect. Files are read from a data directory
(--data-dir, or the VQCREMAP_DATA_DIR environment variable). The Iris table ships with
the package, so "iris" and "iris-2class" work without any files.

Splits are stratified 75/12.5/12.5 train/valid/test. Scaling statistics come from the
train split only and are applied, with clipping, to all three.
"""
from pathlib import Path
from typing import IO, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union
import importlib.resources
import io
import logging
import os

import numpy as np
import pandas as pd  # type: ignore

from .embedding import AMPLITUDE, ANGLE
from .exceptions import ConfigurationError, IngestionError
from .utils import SPLIT_STREAM, stream

DATA_DIR_ENV = "VQCREMAP_DATA_DIR"
MISSING_TOKEN = "?"
TRAIN_FRACTION = 0.75
RAW = "raw"

Label = Union[str, float]


class DatasetSchema(NamedTuple):
    name: str
    filename: str
    n_columns: int
    label_column: int
    feature_columns: Tuple[int, ...]
    label_values: Tuple[Label, ...]  # Class i is label_values[i].
    expected_rows: int
    categorical_columns: Tuple[int, ...] = ()
    delimiter: str = ","
    # Class 0 is label_values[0], every other value is class 1.
    binary_label: bool = False
    # Set when the file holds more rows than the dataset. Rows with other labels are
    # dropped.
    file_rows: Optional[int] = None

    @property
    def n_features(self) -> int:
        return len(self.feature_columns)

    @property
    def n_classes(self) -> int:
        return 2 if self.binary_label else len(self.label_values)


IRIS_LABELS = ("Iris-setosa", "Iris-versicolor", "Iris-virginica")

SCHEMAS: Dict[str, DatasetSchema] = {
    schema.name: schema
    for schema in (
        # Sex (M, F, I) from the eight measurements, rings included.
        DatasetSchema(
            "abalone", "abalone.data", 9, 0, tuple(range(1, 9)), ("M", "F", "I"), 4177
        ),
        DatasetSchema(
            "banknote",
            "data_banknote_authentication.txt",
            5,
            4,
            tuple(range(4)),
            (0, 1),
            1372,
        ),
        # Type 1..7; the first column is a row id.
        DatasetSchema(
            "glass", "glass.data", 11, 10, tuple(range(1, 10)), tuple(range(1, 8)), 214
        ),
        # Processed Cleveland file; "num" 0 is absence, 1-4 presence.
        DatasetSchema(
            "heart",
            "processed.cleveland.data",
            14,
            13,
            tuple(range(13)),
            (0, 1),
            303,
            categorical_columns=(2, 6, 10, 12),
            binary_label=True,
        ),
        DatasetSchema(
            "diabetes", "pima-indians-diabetes.data", 9, 8, tuple(range(8)), (0, 1), 768
        ),
        DatasetSchema("iris", "iris.data", 5, 4, tuple(range(4)), IRIS_LABELS, 150),
        DatasetSchema(
            "iris-2class",
            "iris.data",
            5,
            4,
            tuple(range(4)),
            IRIS_LABELS[:2],
            100,
            file_rows=150,
        ),
        DatasetSchema(
            "seeds",
            "seeds_dataset.txt",
            8,
            7,
            tuple(range(7)),
            (1, 2, 3),
            210,
            delimiter=r"\s+",
        ),
        DatasetSchema(
            "wine", "wine.data", 14, 0, tuple(range(1, 14)), (1, 2, 3), 178
        ),
    )
}
DATASET_NAMES = tuple(SCHEMAS)


class RawTable(NamedTuple):
    name: str
    features: np.ndarray  # (N, n_features)
    labels: np.ndarray  # (N,) class indices
    n_classes: int


class SplitData(NamedTuple):
    name: str
    embedding: str  # The scaling applied, RAW before preprocessing.
    train_x: np.ndarray
    train_y: np.ndarray
    valid_x: np.ndarray
    valid_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray
    train_index: np.ndarray
    valid_index: np.ndarray
    test_index: np.ndarray


class Scaler(NamedTuple):
    minimum: np.ndarray
    maximum: np.ndarray
    low: float
    high: float


def get_schema(name: str) -> DatasetSchema:
    try:
        return SCHEMAS[name]
    except KeyError:
        raise ConfigurationError(
            f"Unknown dataset {name!r}, expected one of {', '.join(DATASET_NAMES)}"
        ) from None


# Loading


def _read(source: Union[str, Path, IO[str]], schema: DatasetSchema) -> pd.DataFrame:
    try:
        return pd.read_csv(
            source,
            header=None,
            sep=schema.delimiter,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
        )
    except FileNotFoundError:
        raise IngestionError(f"{schema.name}: no such file {source}") from None
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise IngestionError(f"{schema.name}: can't parse {source}: {exc}") from None


def _label_lookup(schema: DatasetSchema) -> Dict[Label, int]:
    return {value: index for index, value in enumerate(schema.label_values)}


def _encode_labels(frame: pd.DataFrame, schema: DatasetSchema) -> np.ndarray:
    """Class index per row, -1 for a label outside the schema."""
    column = frame[schema.label_column]
    lookup = _label_lookup(schema)
    if all(isinstance(value, str) for value in schema.label_values):
        raw: Sequence[Label] = list(column)
    else:
        numbers = pd.to_numeric(column, errors="coerce")
        _raise_unparseable(frame, numbers, schema.label_column, schema)
        raw = [float(value) for value in numbers]
        lookup = {float(value): index for value, index in lookup.items()}
    if schema.binary_label:
        return np.array([0 if value == schema.label_values[0] else 1 for value in raw])
    return np.array([lookup.get(value, -1) for value in raw])


def _raise_unparseable(
    frame: pd.DataFrame, numbers: pd.Series, column: int, schema: DatasetSchema
) -> None:
    bad = numbers.isna().to_numpy()
    if bad.any():
        row = frame.index[int(np.argmax(bad))]
        value = frame.at[row, column]
        raise IngestionError(
            f"{schema.name}: can't parse {value!r} at row {row + 1}, "
            f"column {column + 1}",
            {"row": row + 1, "column": column + 1, "value": value},
        )


def _encode_features(frame: pd.DataFrame, schema: DatasetSchema) -> np.ndarray:
    columns: List[np.ndarray] = []
    for column in schema.feature_columns:
        if column in schema.categorical_columns:
            codes, _ = pd.factorize(frame[column], sort=True)
            columns.append(codes.astype(float))
        else:
            numbers = pd.to_numeric(frame[column], errors="coerce")
            _raise_unparseable(frame, numbers, column, schema)
            columns.append(numbers.to_numpy(dtype=float))
    return np.column_stack(columns)


def load_csv(source: Union[str, Path, IO[str]], schema: DatasetSchema) -> RawTable:
    """Read and validate one dataset file.

    Raises:
        IngestionError: The file is missing, has the wrong shape, or a cell can't be
            parsed. The message names the dataset and, for cells, the row and column
            (both counted from 1). The error's data holds the same numbers.
    """
    frame = _read(source, schema)
    if frame.shape[1] != schema.n_columns:
        raise IngestionError(
            f"{schema.name}: expected {schema.n_columns} columns, "
            f"found {frame.shape[1]}",
            {"expected": schema.n_columns, "found": frame.shape[1]},
        )
    rows = schema.file_rows or schema.expected_rows
    if len(frame) != rows:
        raise IngestionError(
            f"{schema.name}: expected {rows} rows, found {len(frame)}",
            {"expected": rows, "found": len(frame)},
        )
    frame = frame.apply(lambda column: column.str.strip())
    used = [schema.label_column, *schema.feature_columns]
    missing = (frame[used] == MISSING_TOKEN).any(axis=1)
    if missing.any():
        logging.info(
            "%s: dropped %d rows with missing values", schema.name, int(missing.sum())
        )
        frame = frame[~missing]
    labels = _encode_labels(frame, schema)
    unknown = labels < 0
    if unknown.any():
        if schema.file_rows is None:
            row = frame.index[int(np.argmax(unknown))]
            raise IngestionError(
                f"{schema.name}: unknown label "
                f"{frame.at[row, schema.label_column]!r} at row {row + 1}",
                {"row": row + 1, "column": schema.label_column + 1},
            )
        frame, labels = frame[~unknown], labels[~unknown]
        if len(frame) != schema.expected_rows:
            raise IngestionError(
                f"{schema.name}: expected {schema.expected_rows} rows, "
                f"found {len(frame)}",
                {"expected": schema.expected_rows, "found": len(frame)},
            )
    return RawTable(
        schema.name, _encode_features(frame, schema), labels, schema.n_classes
    )


def load_dataset(name: str, data_dir: Optional[str] = None) -> RawTable:
    """Load a dataset by name from data_dir, the environment's data directory, or the
    packaged Iris fixture.
    """
    schema = get_schema(name)
    directory = data_dir or os.environ.get(DATA_DIR_ENV)
    if directory:
        path = Path(directory) / schema.filename
        if path.exists():
            return load_csv(path, schema)
    if schema.filename == "iris.data":
        return load_csv(
            io.StringIO(importlib.resources.read_text(__package__, "iris.data")),
            schema,
        )
    raise IngestionError(
        f"{name}: {schema.filename} not found in "
        f"{directory or 'any data directory'} (use --data-dir or {DATA_DIR_ENV})"
    )


# Splitting


def _allocate(counts: np.ndarray, fraction: float) -> np.ndarray:
    """Per-class shares of round(fraction * total), largest remainder first."""
    targets = counts * fraction
    shares = np.floor(targets).astype(int)
    leftover = int(round(counts.sum() * fraction)) - shares.sum()
    order = np.argsort(-(targets - shares), kind="stable")
    shares[order[:leftover]] += 1
    return np.minimum(shares, counts)


def split(table: RawTable, seed: int) -> SplitData:
    """Stratified train/valid/test split, deterministic given the seed.

    A class with fewer than 3 samples goes entirely to the train split.
    """
    rng = stream(seed, SPLIT_STREAM)
    per_class = [np.flatnonzero(table.labels == c) for c in range(table.n_classes)]
    counts = np.array([len(indices) for indices in per_class])
    for c in np.flatnonzero((counts > 0) & (counts < 3)):
        logging.warning(
            "%s: class %d has %d samples, all used for training",
            table.name,
            c,
            counts[c],
        )
    eligible = np.where(counts >= 3, counts, 0)
    n_train = np.where(counts >= 3, _allocate(eligible, TRAIN_FRACTION), counts)
    n_valid = _allocate(eligible - np.where(counts >= 3, n_train, 0), 0.5)
    parts: Dict[str, List[np.ndarray]] = {"train": [], "valid": [], "test": []}
    for indices, train_count, valid_count in zip(per_class, n_train, n_valid):
        shuffled = rng.permutation(indices)
        parts["train"].append(shuffled[:train_count])
        parts["valid"].append(shuffled[train_count : train_count + valid_count])
        parts["test"].append(shuffled[train_count + valid_count :])
    index = {
        name: np.sort(np.concatenate(chunks)).astype(int)
        for name, chunks in parts.items()
    }
    return SplitData(
        name=table.name,
        embedding=RAW,
        train_x=table.features[index["train"]],
        train_y=table.labels[index["train"]],
        valid_x=table.features[index["valid"]],
        valid_y=table.labels[index["valid"]],
        test_x=table.features[index["test"]],
        test_y=table.labels[index["test"]],
        train_index=index["train"],
        valid_index=index["valid"],
        test_index=index["test"],
    )


# Scaling


def feature_range(kind: str) -> Tuple[float, float]:
    """Angle features span [0, π], where RX from |0⟩ is one-to-one in ⟨Z⟩. Amplitude
    features span [0, 1] before the embedding normalizes each sample.
    """
    if kind == ANGLE:
        return 0.0, float(np.pi)
    elif kind == AMPLITUDE:
        return 0.0, 1.0
    raise ConfigurationError(f"Unknown embedding {kind!r}")


def fit_scaler(reference: np.ndarray, kind: str, name: str = "dataset") -> Scaler:
    low, high = feature_range(kind)
    reference = np.asarray(reference, dtype=float)
    minimum, maximum = reference.min(axis=0), reference.max(axis=0)
    for column in np.flatnonzero(maximum == minimum):
        logging.warning(
            "%s: feature %d is constant, scaled to the midpoint", name, column
        )
    return Scaler(minimum, maximum, low, high)


def scale(scaler: Scaler, features: np.ndarray) -> np.ndarray:
    features = np.clip(
        np.asarray(features, dtype=float), scaler.minimum, scaler.maximum
    )
    span = scaler.maximum - scaler.minimum
    constant = span == 0
    unit = (features - scaler.minimum) / np.where(constant, 1.0, span)
    scaled = scaler.low + unit * (scaler.high - scaler.low)
    scaled[..., constant] = (scaler.low + scaler.high) / 2
    return scaled


def preprocess(
    features: np.ndarray, kind: str, reference: Optional[np.ndarray] = None
) -> np.ndarray:
    """Min-max scale for the given embedding, with statistics from `reference` (the
    train split) when given.
    """
    scaler = fit_scaler(features if reference is None else reference, kind)
    return scale(scaler, features)


def _drop_zero_rows(splits: SplitData) -> SplitData:
    """Remove samples whose amplitude features are all zero; they have no state."""
    kept: Dict[str, np.ndarray] = {}
    for part in ("train", "valid", "test"):
        x = getattr(splits, f"{part}_x")
        nonzero = np.any(x != 0, axis=1)
        if not nonzero.all():
            logging.warning(
                "%s: dropped %d %s samples that scale to the zero vector",
                splits.name,
                int((~nonzero).sum()),
                part,
            )
        for field in ("x", "y", "index"):
            kept[f"{part}_{field}"] = getattr(splits, f"{part}_{field}")[nonzero]
    return splits._replace(**kept)


def prepare_splits(table: RawTable, kind: str, seed: int) -> SplitData:
    """Split, then scale every part with the train split's statistics.

    With amplitude embedding, a sample at or below the train minimum in every feature
    scales to the zero vector and is dropped with a warning.
    """
    splits = split(table, seed)
    scaler = fit_scaler(splits.train_x, kind, table.name)
    scaled = splits._replace(
        embedding=kind,
        train_x=scale(scaler, splits.train_x),
        valid_x=scale(scaler, splits.valid_x),
        test_x=scale(scaler, splits.test_x),
    )
    return _drop_zero_rows(scaled) if kind == AMPLITUDE else scaled
