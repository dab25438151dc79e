"""Binary and CSV serialization of lattice field trajectories.

One file holds one trajectory: a magic tag, a JSON header carrying the
generating noise-spec identity (hash plus the lattice numbers needed to
interpret the payload), then the rows as little-endian 64-bit reals. The
format is platform-independent and round-trips bit-exactly.
"""
from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np

from .exceptions import InputError
from .noise import NoiseSpec

__all__ = [
    "MAGIC",
    "spec_hash",
    "write_field",
    "read_field",
    "export_csv",
]

MAGIC = b"RGHFLD1\n"
_ROW_DTYPE = np.dtype("<f8")


def spec_hash(spec: NoiseSpec) -> str:
    """Stable 16-hex-digit digest of the noise-spec identity."""
    doc = {
        "H": spec.H,
        "L": spec.L,
        "N": spec.N,
        "dt": spec.dt,
        "epsilon": spec.epsilon,
        "seed": spec.seed,
    }
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def write_field(
    path: str,
    values: np.ndarray,
    spec: NoiseSpec,
    extra: dict[str, Any] | None = None,
) -> None:
    """Dump a (rows, N) trajectory with its spec identity.

    ``extra`` lands in the header verbatim (run parameters, labels); keys
    colliding with the structural fields are rejected.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[None, :]
    if values.ndim != 2 or values.shape[1] != spec.N:
        raise InputError(f"field rows must have length N={spec.N}, got {values.shape}")
    header: dict[str, Any] = {
        "spec_hash": spec_hash(spec),
        "N": spec.N,
        "L": spec.L,
        "dt": spec.dt,
        "n_rows": int(values.shape[0]),
    }
    if extra:
        clash = set(extra) & set(header)
        if clash:
            raise InputError(f"extra header keys collide with structural fields: {sorted(clash)}")
        header.update(extra)
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(len(blob).to_bytes(8, "little"))
        f.write(blob)
        f.write(np.ascontiguousarray(values, dtype=_ROW_DTYPE).tobytes())


def read_field(path: str) -> tuple[np.ndarray, dict[str, Any]]:
    """Load a trajectory written by write_field; returns (values, header)."""
    with open(path, "rb") as f:
        magic = f.read(len(MAGIC))
        if magic != MAGIC:
            raise InputError(f"not a field file (bad magic): {path}")
        raw_len = f.read(8)
        if len(raw_len) != 8:
            raise InputError(f"truncated header length: {path}")
        blob = f.read(int.from_bytes(raw_len, "little"))
        try:
            header = json.loads(blob.decode())
        except (UnicodeDecodeError, json.JSONDecodeError) as err:
            raise InputError(f"corrupt field header in {path}: {err}") from err
        for key in ("spec_hash", "N", "L", "dt", "n_rows"):
            if key not in header:
                raise InputError(f"field header missing {key!r}: {path}")
        n, rows = int(header["N"]), int(header["n_rows"])
        payload = f.read()
    want = rows * n * _ROW_DTYPE.itemsize
    if len(payload) != want:
        raise InputError(
            f"field payload has {len(payload)} bytes, header promises {want}: {path}"
        )
    values = np.frombuffer(payload, dtype=_ROW_DTYPE).reshape(rows, n).astype(float)
    return values, header


def export_csv(path: str, values: np.ndarray, spec: NoiseSpec) -> None:
    """Write a trajectory as CSV: header row of site coordinates, then one
    row per time step. Meant for small grids; the binary format is the
    exchange medium for anything large."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[None, :]
    if values.ndim != 2 or values.shape[1] != spec.N:
        raise InputError(f"field rows must have length N={spec.N}, got {values.shape}")
    x = spec.lattice()
    with open(path, "w") as f:
        f.write(",".join(f"x={v:.10g}" for v in x) + "\n")
        for row in values:
            f.write(",".join(f"{v:.17g}" for v in row) + "\n")
