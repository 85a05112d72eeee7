"""Checkpoint files.

Layout (little-endian): magic ``b"VDCK"``, u32 format version, u32 config
length, UTF-8 JSON config, u32 parameter count, then per parameter: u16 name
length, UTF-8 name, u32 ndim, ndim x u32 dims, float64 payload (row-major).
"""
import json
import struct

import numpy as np

from viddial.errors import DataError

MAGIC = b"VDCK"
VERSION = 1


def model_config_json(model):
    return {
        "model": model.cfg.variant if model.kind != "lm" else "lm",
        "kind": model.kind,
        "config": model.cfg.to_dict(),
        "vocab": model.vocab.itos,
        "feat_dim": getattr(model, "feat_dim", None),
        "seed": model.seed,
    }


def save_checkpoint(model, path, extra=None):
    meta = model_config_json(model)
    if extra:
        meta["extra"] = extra
    blob = json.dumps(meta, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(blob)))
        fh.write(blob)
        params = list(model.store)
        fh.write(struct.pack("<I", len(params)))
        for name, p in params:
            raw = name.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(struct.pack("<I", p.data.ndim))
            fh.write(struct.pack(f"<{p.data.ndim}I", *p.data.shape))
            fh.write(np.ascontiguousarray(p.data, dtype="<f8").tobytes())


def read_checkpoint(path):
    """Return ``(meta, {name: array})``."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise DataError(f"{path}: not a checkpoint file")
    off = 4
    version, n = struct.unpack_from("<II", data, off)
    off += 8
    if version != VERSION:
        raise DataError(f"{path}: unsupported checkpoint version {version}")
    meta = json.loads(data[off:off + n].decode("utf-8"))
    off += n
    (count,) = struct.unpack_from("<I", data, off)
    off += 4
    params = {}
    for _ in range(count):
        (ln,) = struct.unpack_from("<H", data, off)
        off += 2
        name = data[off:off + ln].decode("utf-8")
        off += ln
        (ndim,) = struct.unpack_from("<I", data, off)
        off += 4
        shape = struct.unpack_from(f"<{ndim}I", data, off)
        off += 4 * ndim
        size = int(np.prod(shape)) if ndim else 1
        params[name] = np.frombuffer(data, dtype="<f8", count=size, offset=off).reshape(shape).astype(np.float64)
        off += 8 * size
    return meta, params


def load_checkpoint(path):
    from viddial.models import model_from_meta

    meta, params = read_checkpoint(path)
    model = model_from_meta(meta)
    model.store.load_state_dict(params)
    return model
