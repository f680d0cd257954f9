"""Caching of enumerated group tables.

Two layers: a process-level memo (tables are immutable, so sharing is
safe), and an optional on-disk store under ``ZETA_CACHE_DIR``.  Disk
entries carry a versioned header plus a content hash; anything that fails
validation is discarded with a warning and recomputed, never trusted.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys

import numpy as np

from .groups import ENUM_CAP, Family, GroupTable
from .rings import parse_ring

FORMAT_VERSION = 1

_memo = {}


def as_family(obj) -> Family:
    return obj if isinstance(obj, Family) else Family(obj)


def clear_memo():
    _memo.clear()


def _disk_key(fam: Family, ring) -> str:
    payload = json.dumps(
        [
            FORMAT_VERSION,
            fam.text,
            fam.include_torus,
            fam.struct_hash(),
            ring.literal,
        ],
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def _blob_hash(mats, inv):
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(mats).tobytes())
    h.update(np.ascontiguousarray(inv).tobytes())
    return h.hexdigest()


def _cache_path(fam, ring):
    root = os.environ.get("ZETA_CACHE_DIR")
    if not root:
        return None
    return os.path.join(root, f"table-{_disk_key(fam, ring)}.npz")


def _load_disk(fam: Family, ring):
    path = _cache_path(fam, ring)
    if path is None or not os.path.exists(path):
        return None
    try:
        with np.load(path, allow_pickle=False) as blob:
            header = json.loads(bytes(blob["header"]).decode())
            mats = blob["mats"]
            inv = blob["inv"]
            gen_mats = blob["gen_mats"]
        want = {
            "version": FORMAT_VERSION,
            "family": fam.text,
            "include_torus": fam.include_torus,
            "struct": fam.struct_hash(),
            "ring": ring.literal,
        }
        for key, val in want.items():
            if header.get(key) != val:
                raise ValueError(f"header field {key} does not match")
        if header["blob_sha256"] != _blob_hash(mats, inv):
            raise ValueError("content hash mismatch")
        index = {}
        step = mats.shape[1] * mats.shape[2] * 2
        buf = np.ascontiguousarray(mats, dtype="<u2").tobytes()
        for i in range(mats.shape[0]):
            index[buf[i * step : (i + 1) * step]] = i
        generators = [
            (tuple(prov), g)
            for prov, g in zip(header["provenance"], gen_mats)
        ]
        return GroupTable(
            ring,
            mats,
            inv,
            index,
            generators,
            header["name"],
            header["dim_scheme"],
        )
    except Exception as exc:  # corrupted entry: recompute, never trust
        sys.stderr.write(f"warning: discarding cache entry {path}: {exc}\n")
        return None


def _store_disk(fam: Family, ring, table: GroupTable):
    path = _cache_path(fam, ring)
    if path is None:
        return
    try:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        header = {
            "version": FORMAT_VERSION,
            "family": fam.text,
            "include_torus": fam.include_torus,
            "struct": fam.struct_hash(),
            "ring": ring.literal,
            "name": table.name,
            "dim_scheme": table.dim_scheme,
            "size": table.size,
            "provenance": [list(p) for p, _ in table.generators],
            "blob_sha256": _blob_hash(table.mats, table.inv),
        }
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:
            np.savez(
                fh,
                header=np.frombuffer(
                    json.dumps(header, sort_keys=True).encode(), dtype=np.uint8
                ),
                mats=table.mats,
                inv=table.inv,
                gen_mats=np.stack([g for _, g in table.generators]),
            )
        os.replace(tmp, path)
    except OSError as exc:  # cache is best-effort
        sys.stderr.write(f"warning: could not write cache {path}: {exc}\n")


def table_for(family, ring, cap=ENUM_CAP) -> GroupTable:
    """Enumerate (or fetch) the table of a family over a ring."""
    fam = as_family(family)
    key = (fam.text, fam.include_torus, ring.key())
    if key in _memo:
        return _memo[key]
    table = _load_disk(fam, ring)
    if table is None:
        table = fam.table(ring, cap=cap)
        _store_disk(fam, ring, table)
    _memo[key] = table
    return table


def table_for_literal(family_text, ring_literal, cap=ENUM_CAP) -> GroupTable:
    return table_for(family_text, parse_ring(ring_literal), cap=cap)
