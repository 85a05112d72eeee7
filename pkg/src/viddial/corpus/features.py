"""VFEA frame-feature files.

Layout: magic ``b"VFEA"``, little-endian u32 rows, u32 cols, then
``rows * cols`` little-endian float32 values in row-major order. Frame ``i``
sits at time ``i / fps``.
"""
import math
import os
import struct

import numpy as np

from viddial.errors import DataError

MAGIC = b"VFEA"
_HEADER = struct.Struct("<4sII")


def write_features(path, frames):
    frames = np.asarray(frames, dtype="<f4")
    if frames.ndim != 2:
        raise DataError(f"frame matrix must be 2-D, got shape {frames.shape}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, frames.shape[0], frames.shape[1]))
        fh.write(np.ascontiguousarray(frames).tobytes())


def read_header(path):
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
    if len(raw) < _HEADER.size:
        raise DataError(f"{path}: truncated VFEA header")
    magic, rows, cols = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise DataError(f"{path}: bad magic {magic!r}")
    return rows, cols


def read_features(path):
    """Load a VFEA file as a float64 (rows, cols) array."""
    rows, cols = read_header(path)
    data = np.fromfile(path, dtype="<f4", offset=_HEADER.size)
    if data.size != rows * cols:
        raise DataError(f"{path}: expected {rows * cols} values, found {data.size}")
    return data.reshape(rows, cols).astype(np.float64)


def frame_rows(start, end, fps):
    """Half-open row range of frames whose timestamps lie in ``[start, end)``."""
    first = math.ceil(round(start * fps, 9))
    stop = math.ceil(round(end * fps, 9))
    return first, stop


class FrameStore:
    """Feature files for many videos, one ``<video_id>.vfea`` per video."""

    def __init__(self, directory):
        self.directory = directory
        self._cache = {}

    def path(self, video_id):
        return os.path.join(self.directory, f"{video_id}.vfea")

    def has(self, video_id):
        return os.path.exists(self.path(video_id))

    def load(self, video_id):
        if video_id not in self._cache:
            path = self.path(video_id)
            if not os.path.exists(path):
                raise DataError(f"no feature file for video {video_id!r} ({path})")
            self._cache[video_id] = read_features(path)
        return self._cache[video_id]


_PATH_CACHE = {}


def load_rows(path, rows):
    """Rows ``[a, b)`` of the VFEA file at ``path`` (files are cached)."""
    if path not in _PATH_CACHE:
        _PATH_CACHE[path] = read_features(path)
    a, b = rows
    return _PATH_CACHE[path][a:b]
