"""On-disk corpus layout: HDF5 acquisitions, text series, label files and checksum manifests."""

import hashlib
import logging
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import h5py
import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .models import BenchmarkError, FaultLabel

logger = logging.getLogger(__name__)

DATASET_KEY = "acc"
FILE_PATTERN = re.compile(r"^acc(\d{5})-(\d\d?)\.h5$")
MANIFEST_NAME = "manifest.json"
TEXT_FORMAT = "%.17g"


class CorpusError(BenchmarkError, ValueError):
    """Raised for missing, corrupted or inconsistent corpus files."""


class ManifestEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    index: int = Field(ge=0)
    sha256: str
    accepted: bool = True
    n_retries: int = Field(default=1, ge=0)
    f_extracted: float = 0.0
    f_analytical: float = 0.0
    fault_class: Optional[str] = None


class Manifest(BaseModel):
    """Checksums of every acquisition payload of one sub-dataset."""
    model_config = ConfigDict(frozen=True)

    code: str
    master_seed: int
    expected_count: int = Field(ge=0)
    entries: Tuple[ManifestEntry, ...] = Field(default=())

    @property
    def realized_count(self) -> int:
        return len(self.entries)

    @property
    def rejected_count(self) -> int:
        return sum(1 for entry in self.entries if not entry.accepted)


@dataclass(frozen=True)
class StoredAcquisition:
    samples: np.ndarray
    attrs: Dict[str, object]


def acquisition_filename(index: int, suffix: str) -> str:
    """``accXXXXX-YZ.h5`` with a zero-padded global index."""
    return f"acc{index:05d}-{suffix}.h5"


def parse_filename(name: str) -> Tuple[int, str]:
    """Index and sub-dataset suffix of an acquisition file name.

    Raises:
        CorpusError: If the name does not follow the corpus pattern.
    """
    match = FILE_PATTERN.match(name)
    if match is None:
        raise CorpusError(f"Not an acquisition file name: {name}")
    return int(match.group(1)), match.group(2)


def payload_digest(samples: np.ndarray) -> str:
    """SHA-256 of the float32 payload bytes."""
    data = np.ascontiguousarray(samples, dtype=np.float32)
    return hashlib.sha256(data.tobytes()).hexdigest()


def write_acquisition(path: Path, samples: np.ndarray, attrs: Mapping[str, object]) -> str:
    """Write one acquisition and return its payload digest.

    The file is written next to its destination and moved into place once complete.
    """
    path = Path(path)
    staging = path.with_name(path.name + ".part")
    data = np.asarray(samples, dtype=np.float32)
    with h5py.File(staging, "w") as f:
        dset = f.create_dataset(DATASET_KEY, data=data, track_times=False)
        for key, value in attrs.items():
            if value is not None:
                dset.attrs[key] = value
    os.replace(staging, path)
    return payload_digest(data)


def read_acquisition(path: Path) -> StoredAcquisition:
    """Read samples (float32) and attributes of one acquisition.

    Raises:
        CorpusError: If the file is unreadable or has no ``acc`` dataset.
    """
    try:
        with h5py.File(path, "r") as f:
            if DATASET_KEY not in f:
                raise CorpusError(f"{path} has no '{DATASET_KEY}' dataset")
            dset = f[DATASET_KEY]
            samples = dset[()]
            attrs = {key: _plain(value) for key, value in dset.attrs.items()}
    except OSError as e:
        raise CorpusError(f"Cannot read {path}: {e}") from e
    return StoredAcquisition(samples=samples, attrs=attrs)


def _plain(value):
    if isinstance(value, bytes):
        return value.decode()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def write_manifest(directory: Path, manifest: Manifest) -> Path:
    path = Path(directory) / MANIFEST_NAME
    ordered = manifest.model_copy(update={"entries": tuple(sorted(manifest.entries, key=lambda e: e.name))})
    path.write_text(ordered.model_dump_json(indent=2), encoding="utf-8")
    return path


def load_manifest(directory: Path) -> Manifest:
    path = Path(directory) / MANIFEST_NAME
    if not path.exists():
        raise CorpusError(f"No manifest in {directory}")
    return Manifest.model_validate_json(path.read_text(encoding="utf-8"))


def verify_manifest(directory: Path) -> List[str]:
    """Problems found comparing the files of ``directory`` with its manifest (empty when intact)."""
    directory = Path(directory)
    manifest = load_manifest(directory)
    problems: List[str] = []
    listed = set()
    for entry in manifest.entries:
        listed.add(entry.name)
        path = directory / entry.name
        if not path.exists():
            problems.append(f"missing: {entry.name}")
            continue
        try:
            digest = payload_digest(read_acquisition(path).samples)
        except CorpusError as e:
            problems.append(f"unreadable: {entry.name} ({e})")
            continue
        if digest != entry.sha256:
            problems.append(f"checksum mismatch: {entry.name}")
    for path in sorted(directory.glob("acc*.h5")):
        if path.name not in listed:
            problems.append(f"unlisted: {path.name}")
    for path in sorted(directory.glob("*.part")):
        problems.append(f"partial write: {path.name}")
    return problems


def write_columns(path: Path, columns: Sequence[np.ndarray], header: Sequence[str]) -> Path:
    """Write equal-length columns as a whitespace-separated text matrix.

    Raises:
        CorpusError: If the columns are misaligned.
    """
    lengths = {len(column) for column in columns}
    if len(lengths) != 1:
        raise CorpusError(f"Column lengths differ: {sorted(lengths)}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.column_stack(columns), fmt=TEXT_FORMAT, header=" ".join(header))
    return path


def read_columns(path: Path) -> np.ndarray:
    return np.loadtxt(path, ndmin=2)


def write_label_rows(path: Path, index: np.ndarray, timestamps: np.ndarray, r_fast: np.ndarray,
                     d_slow: np.ndarray, sfm: Sequence[str]) -> Path:
    """Per-acquisition labels: index, timestamp, fast decay rate, corrosion depth (mm), fault tag."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write("# index timestamp r_fast d_slow_mm sfm\n")
        for i, ts, r, d, tag in zip(index, timestamps, r_fast, d_slow, sfm):
            f.write(f"{int(i)} {ts} {r:.17g} {d:.17g} {tag or '-'}\n")
    return path


def write_fault_labels(path: Path, labels: Sequence[FaultLabel]) -> Path:
    """One row per contaminated acquisition: ``index,class,param_summary,t_start,t_end``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write("index,class,param_summary,t_start,t_end\n")
        for label in sorted(labels, key=lambda item: item.index):
            f.write(f"{label.index},{label.fault_class.value},{label.param_summary},{label.t_start:g},{label.t_end:g}\n")
    return path


def read_fault_labels(path: Path) -> List[Dict[str, str]]:
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        keys = f.readline().strip().split(",")
        for line in f:
            if line.strip():
                rows.append(dict(zip(keys, line.rstrip("\n").split(","))))
    return rows
