"""Binary container for the one-time setup artifacts.

Layout: magic, format version, section count, then per section a name, a
payload length, a CRC-32 of the payload and the payload itself (one array in
``.npy`` form, or UTF-8 JSON for metadata).  Any truncation or corruption is
reported as :class:`ChecksumFailure`.
"""

import io
import json
import struct
import zlib

import numpy as np

from .errors import ChecksumFailure, VersionMismatch
from .graph import WeightedGraph
from .lrd import ClusterPairIndex, LrdHierarchy
from .resistance import ResistanceEmbedder

MAGIC = b"INGRASS\x00"
VERSION = 1
_HEAD = struct.Struct("<8sII")
_SEC = struct.Struct("<H")
_LEN = struct.Struct("<QI")


def _npy(a):
    buf = io.BytesIO()
    np.save(buf, np.ascontiguousarray(a), allow_pickle=False)
    return buf.getvalue()


def _sections(h0, hierarchy, index, emb, meta):
    meta = dict(meta or {})
    meta.update(n_nodes=h0.n_nodes, growth=hierarchy.growth, levels=hierarchy.levels,
                emb_m=emb.m, emb_seed=emb.seed, emb_smoothed=emb.smoothed, emb_ritz=emb.ritz)
    yield "meta", json.dumps(meta, sort_keys=True).encode()
    yield "h0.u", _npy(h0.u)
    yield "h0.v", _npy(h0.v)
    yield "h0.w", _npy(h0.w)
    yield "emb.vectors", _npy(emb.vectors)
    yield "emb.rayleigh", _npy(emb.rayleigh)
    yield "lrd.assignment", _npy(hierarchy.assignment)
    yield "lrd.diameter", _npy(hierarchy.diameter)
    yield "lrd.cluster_size", _npy(hierarchy.cluster_size)
    yield "lrd.threshold", _npy(hierarchy.threshold)
    for lev, arrs in enumerate(index.to_arrays(), 1):
        for name, a in zip(("ck", "ce", "ik", "ie"), arrs):
            yield f"idx.{lev}.{name}", _npy(np.asarray(a, dtype=np.int64))


def save_setup(path, h0, hierarchy, index, emb, meta=None):
    """Write the initial sparsifier, embedder, hierarchy and pair index."""
    secs = list(_sections(h0, hierarchy, index, emb, meta))
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(MAGIC, VERSION, len(secs)))
        for name, payload in secs:
            raw = name.encode()
            fh.write(_SEC.pack(len(raw)))
            fh.write(raw)
            fh.write(_LEN.pack(len(payload), zlib.crc32(payload)))
            fh.write(payload)


def _take(data, pos, k):
    if pos + k > len(data):
        raise ChecksumFailure("setup file is truncated")
    return data[pos:pos + k], pos + k


def load_setup(path):
    """Inverse of :func:`save_setup`; returns ``(h0, hierarchy, index, emb, meta)``."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEAD.size:
        if MAGIC.startswith(data[:8]) and data:
            raise ChecksumFailure("setup file is truncated")
        raise VersionMismatch("not a setup file")
    magic, version, count = _HEAD.unpack_from(data)
    if magic != MAGIC:
        raise VersionMismatch("not a setup file (bad magic)")
    if version != VERSION:
        raise VersionMismatch(f"setup format version {version}, expected {VERSION}")
    pos = _HEAD.size
    secs = {}
    for _ in range(count):
        chunk, pos = _take(data, pos, _SEC.size)
        (ln,) = _SEC.unpack(chunk)
        name, pos = _take(data, pos, ln)
        chunk, pos = _take(data, pos, _LEN.size)
        size, crc = _LEN.unpack(chunk)
        payload, pos = _take(data, pos, size)
        if zlib.crc32(payload) != crc:
            raise ChecksumFailure(f"checksum mismatch in section {name.decode(errors='replace')}")
        secs[name.decode()] = payload
    if pos != len(data):
        raise ChecksumFailure("trailing bytes after the last section")

    meta = json.loads(secs.pop("meta").decode())

    def arr(key):
        return np.load(io.BytesIO(secs[key]), allow_pickle=False)

    n = meta["n_nodes"]
    h0 = WeightedGraph(n, arr("h0.u"), arr("h0.v"), arr("h0.w"))
    emb = ResistanceEmbedder(arr("emb.vectors"), arr("emb.rayleigh"), meta["emb_m"],
                             meta["emb_seed"], meta["emb_smoothed"], meta["emb_ritz"])
    hier = LrdHierarchy(arr("lrd.assignment"), arr("lrd.diameter"), arr("lrd.cluster_size"),
                        arr("lrd.threshold"), float(meta["growth"]))
    levels = [tuple(arr(f"idx.{lev}.{k}") for k in ("ck", "ce", "ik", "ie"))
              for lev in range(1, meta["levels"] + 1)]
    index = ClusterPairIndex.from_arrays(n, levels)
    return h0, hier, index, emb, meta
