"""Single-file checkpoints.

Layout::

    b"DAGNCKPT" | uint32 LE header length | JSON header | float64 LE arrays

The header is canonical JSON (sorted keys) holding ``seed``, ``config_hash``,
optional extra metadata, and the ordered list of ``{"name", "shape"}``
entries; array payloads follow in the same order. Identical parameters and
metadata always serialize to identical bytes.
"""

import json
import struct

import numpy as np

MAGIC = b"DAGNCKPT"


class CheckpointError(ValueError):
    pass


def dumps(params, seed, config_hash, extra=None):
    header = {
        "seed": int(seed),
        "config_hash": config_hash,
        "extra": extra or {},
        "params": [{"name": p.name, "shape": list(p.shape)} for p in params],
    }
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    chunks = [MAGIC, struct.pack("<I", len(head)), head]
    chunks.extend(np.ascontiguousarray(p.data, dtype="<f8").tobytes() for p in params)
    return b"".join(chunks)


def save(path, params, seed, config_hash, extra=None):
    with open(path, "wb") as fh:
        fh.write(dumps(params, seed, config_hash, extra))


def loads(blob):
    """Return ``(header, {name: ndarray})``."""
    if blob[:len(MAGIC)] != MAGIC:
        raise CheckpointError("not a DAGN checkpoint (bad magic)")
    off = len(MAGIC)
    (n,) = struct.unpack_from("<I", blob, off)
    off += 4
    header = json.loads(blob[off:off + n].decode("utf-8"))
    off += n
    arrays = {}
    for entry in header["params"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape, dtype=np.int64))
        end = off + 8 * count
        if end > len(blob):
            raise CheckpointError(f"truncated payload for {entry['name']}")
        arrays[entry["name"]] = np.frombuffer(blob[off:end], dtype="<f8").reshape(shape).astype(np.float64)
        off = end
    if off != len(blob):
        raise CheckpointError("trailing bytes after last array")
    return header, arrays


def load(path):
    with open(path, "rb") as fh:
        return loads(fh.read())


def restore(params, arrays):
    """Copy arrays into parameters by name; shapes must match."""
    for p in params:
        if p.name not in arrays:
            raise CheckpointError(f"checkpoint lacks parameter {p.name}")
        a = arrays[p.name]
        if a.shape != p.shape:
            raise CheckpointError(f"{p.name}: shape {a.shape} != expected {p.shape}")
        p.data[...] = a
