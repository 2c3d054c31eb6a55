"""Reader and writer for the big-endian IDX image and label files."""
from __future__ import annotations

import gzip
import struct
from pathlib import Path
from typing import Iterable

import numpy as np

from ..errors import BadMagic, DimensionMismatch, IngestionError, TruncatedFile

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
SIDE = 28


def _read_bytes(path: str | Path) -> bytes:
    path = Path(path)
    try:
        if path.suffix == ".gz":
            with gzip.open(path, "rb") as fh:
                return fh.read()
        return path.read_bytes()
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc


def _header(buf: bytes, n_fields: int, magic: int, path) -> tuple[int, ...]:
    size = 4 * n_fields
    if len(buf) < size:
        raise TruncatedFile(f"{path}: header needs {size} bytes, file has {len(buf)}")
    fields = struct.unpack(f">{n_fields}I", buf[:size])
    if fields[0] != magic:
        raise BadMagic(f"{path}: magic 0x{fields[0]:08x}, expected 0x{magic:08x}")
    return fields[1:]


def read_images(path: str | Path) -> np.ndarray:
    """Images as a ``(count, 28, 28)`` float array scaled to ``[0, 1]``."""
    buf = _read_bytes(path)
    count, rows, cols = _header(buf, 4, IMAGE_MAGIC, path)
    if (rows, cols) != (SIDE, SIDE):
        raise DimensionMismatch(f"{path}: images are {rows}x{cols}, expected {SIDE}x{SIDE}")
    need = 16 + count * rows * cols
    if len(buf) < need:
        raise TruncatedFile(f"{path}: expected {need} bytes, found {len(buf)}")
    raw = np.frombuffer(buf, dtype=np.uint8, count=count * rows * cols, offset=16)
    return raw.reshape(count, rows, cols).astype(float) / 255.0


def read_labels(path: str | Path) -> np.ndarray:
    buf = _read_bytes(path)
    (count,) = _header(buf, 2, LABEL_MAGIC, path)
    if len(buf) < 8 + count:
        raise TruncatedFile(f"{path}: expected {8 + count} bytes, found {len(buf)}")
    return np.frombuffer(buf, dtype=np.uint8, count=count, offset=8).astype(int)


def ingest_idx(
    images_path: str | Path, labels_path: str | Path, keep_labels: Iterable[int]
) -> list[tuple[np.ndarray, int]]:
    """Records whose label is in ``keep_labels``, in file order."""
    images = read_images(images_path)
    labels = read_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise DimensionMismatch(f"{images.shape[0]} images but {labels.shape[0]} labels")
    keep = set(int(k) for k in keep_labels)
    return [(images[i], int(labels[i])) for i in range(labels.shape[0]) if int(labels[i]) in keep]


def write_images(path: str | Path, images) -> None:
    """Write uint8 images (values 0..255) in IDX format."""
    a = np.asarray(images, dtype=np.uint8)
    if a.ndim != 3:
        raise ValueError("images must have shape (count, rows, cols)")
    header = struct.pack(">4I", IMAGE_MAGIC, a.shape[0], a.shape[1], a.shape[2])
    Path(path).write_bytes(header + a.tobytes())


def write_labels(path: str | Path, labels) -> None:
    a = np.asarray(labels, dtype=np.uint8).reshape(-1)
    Path(path).write_bytes(struct.pack(">2I", LABEL_MAGIC, a.shape[0]) + a.tobytes())
