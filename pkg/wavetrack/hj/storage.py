"""Binary value-function files and their JSON sidecars.

Layout, little-endian:

    b"WTVF"  u32 version  u32 axis_count
    axis_count × (f64 min, f64 max, u32 count)
    u32 slice_count  slice_count × f64 time
    slice_count × prod(counts) × f32 value        (C order, time major)

The sidecar ``<file>.json`` carries the model hash, a SHA-256 of the binary
file and the solve diagnostics.
"""

import hashlib
from pathlib import Path
import struct

import arrow
import numpy as np
import ujson

from helpers.logger import logger
from wavetrack.core.errors import ArtifactError
from wavetrack.hj.grid import Grid
from wavetrack.hj.value_function import ValueFunction

MAGIC = b"WTVF"
FORMAT_VERSION = 1


def sidecar_path(path: Path | str) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def content_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def encode_value_function(value_fn: ValueFunction) -> bytes:
    grid = value_fn.grid
    parts = [MAGIC, struct.pack("<II", FORMAT_VERSION, grid.ndim)]
    parts.extend(
        struct.pack("<ddI", lo, hi, count)
        for lo, hi, count in zip(grid.lo, grid.hi, grid.counts, strict=True)
    )
    parts.append(struct.pack("<I", value_fn.times.shape[0]))
    parts.append(value_fn.times.astype("<f8").tobytes())
    parts.append(value_fn.slices.astype("<f4").tobytes())
    return b"".join(parts)


def _read(data: bytes, offset: int, fmt: str) -> tuple[tuple, int]:
    size = struct.calcsize(fmt)
    if offset + size > len(data):
        raise ArtifactError("value-function file is truncated")
    return struct.unpack_from(fmt, data, offset), offset + size


def decode_value_function(data: bytes) -> ValueFunction:
    if data[:4] != MAGIC:
        raise ArtifactError("not a value-function file (bad magic)")
    (version, axis_count), offset = _read(data, 4, "<II")
    if version != FORMAT_VERSION:
        raise ArtifactError(f"unsupported value-function format version {version}")
    if axis_count < 1:
        raise ArtifactError("value-function file has no axes")

    lo, hi, counts = [], [], []
    for _ in range(axis_count):
        (a, b, n), offset = _read(data, offset, "<ddI")
        lo.append(a)
        hi.append(b)
        counts.append(n)
    (slice_count,), offset = _read(data, offset, "<I")

    times_end = offset + 8 * slice_count
    values_end = times_end + 4 * slice_count * int(np.prod(counts))
    if len(data) < values_end:
        raise ArtifactError("value-function file is truncated")
    if len(data) > values_end:
        raise ArtifactError("value-function file has trailing bytes")

    times = np.frombuffer(data, dtype="<f8", count=slice_count, offset=offset)
    slices = np.frombuffer(
        data, dtype="<f4", count=slice_count * int(np.prod(counts)), offset=times_end
    ).reshape((slice_count, *counts))
    if not (np.all(np.isfinite(times)) and np.all(np.isfinite(slices))):
        raise ArtifactError("value-function file contains non-finite values")

    try:
        grid = Grid(tuple(lo), tuple(hi), tuple(counts))
        return ValueFunction(
            grid=grid,
            times=times.astype(np.float64),
            slices=slices.astype(np.float32),
            l_field=slices[-1].astype(np.float32),
        )
    except ValueError as e:
        raise ArtifactError(f"malformed value-function file: {e}") from e


def save_value_function(
    value_fn: ValueFunction, path: Path | str, metadata: dict | None = None
) -> str:
    """Write the binary file and sidecar; returns the content hash."""
    path = Path(path)
    data = encode_value_function(value_fn)
    digest = content_hash(data)
    sidecar = {
        **value_fn.meta,
        **(metadata or {}),
        "format": MAGIC.decode(),
        "version": FORMAT_VERSION,
        "content_hash": digest,
        "created_at": arrow.utcnow().isoformat(),
    }
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        sidecar_path(path).write_text(ujson.dumps(sidecar, indent=2, sort_keys=True))
    except OSError as e:
        raise ArtifactError(f"cannot write value function to {path}: {e}") from e
    logger.info(f"💾 Saved value function to {path} ({len(data)} bytes)")
    return digest


def load_value_function(path: Path | str) -> ValueFunction:
    """Read a value function, verifying the sidecar hash when one exists."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise ArtifactError(f"cannot read value function {path}: {e}") from e

    metadata: dict = {}
    meta_path = sidecar_path(path)
    if meta_path.exists():
        try:
            metadata = ujson.loads(meta_path.read_text())
        except (OSError, ValueError) as e:
            raise ArtifactError(f"unreadable sidecar {meta_path}: {e}") from e
        expected = metadata.get("content_hash")
        if expected and expected != content_hash(data):
            raise ArtifactError(f"content hash mismatch for {path}")
    else:
        logger.warning(f"No sidecar next to {path}; model hash cannot be checked")

    value_fn = decode_value_function(data)
    object.__setattr__(value_fn, "meta", metadata)
    return value_fn
