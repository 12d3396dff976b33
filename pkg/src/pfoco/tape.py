"""Binary round tapes for replaying matrix-completion streams exactly.

Layout (all integers signed 64-bit little-endian, all reals IEEE float64
little-endian):

    magic   8 bytes  b"PFOCOTP1"
    header  m, n (int64), k (float64), b, T, seed (int64)
    body    T repetitions of:
                b revealed flat indices (int64, sorted, row-major order)
                m*n entries of the round's constraint matrix (float64,
                row-major)

The hidden target matrix is not stored; it is regenerated from the header
seed by the instance constructor, so a tape plus this package reproduces
the full stream bit-for-bit.
"""

from __future__ import annotations

import struct

import numpy as np

from .problems import MatrixCompletionInstance, gen_matrix_completion

MAGIC = b"PFOCOTP1"
_HEADER = struct.Struct("<qqdqqq")


def write_tape(path, instance: MatrixCompletionInstance, rounds) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(instance.rows, instance.cols, instance.radius,
                              instance.reveals, len(rounds), instance.seed))
        for rf in rounds:
            idx = np.ascontiguousarray(rf.data["revealed_idx"], dtype="<i8")
            g_flat = np.ascontiguousarray(rf.data["constraint_flat"], dtype="<f8")
            fh.write(idx.tobytes())
            fh.write(g_flat.tobytes())


def read_tape(path):
    """Load a tape; returns ``(instance, rounds)`` with closures rebuilt
    from the stored payloads (nothing is resampled)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[: len(MAGIC)] != MAGIC:
        raise ValueError(f"{path} is not a round tape (bad magic)")
    off = len(MAGIC)
    m, n, k, b, horizon, seed = _HEADER.unpack_from(blob, off)
    off += _HEADER.size
    instance = gen_matrix_completion(m, n, k, b, seed)

    idx_bytes = 8 * b
    g_bytes = 8 * m * n
    expected = off + horizon * (idx_bytes + g_bytes)
    if len(blob) != expected:
        raise ValueError(
            f"tape length {len(blob)} does not match header (expected {expected})"
        )

    rounds = []
    for t in range(1, horizon + 1):
        idx = np.frombuffer(blob, dtype="<i8", count=b, offset=off).astype(np.int64)
        off += idx_bytes
        g_flat = np.frombuffer(blob, dtype="<f8", count=m * n,
                               offset=off).astype(np.float64)
        off += g_bytes
        rounds.append(instance.round_from_payload(t, idx, g_flat))
    return instance, rounds
