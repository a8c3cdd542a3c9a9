"""Shared checkpoint container: text header + tensor manifest + raw payload.

Layout::

    hetnetgen-checkpoint v1
    key=value            # header lines, order preserved
    ...
    [manifest]
    <name> <dim> <dim> ...
    ...
    [payload]
    <concatenated little-endian float64 arrays in manifest order>

Scalars are stored as 0-dim tensors (no dims after the name).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import GraphFormatError

MAGIC = "hetnetgen-checkpoint v1"


def write_checkpoint(path, header: dict[str, str], tensors: list[tuple[str, np.ndarray]]) -> None:
    path = Path(path)
    lines = [MAGIC]
    for key, value in header.items():
        value = str(value)
        if "\n" in value or "=" not in f"{key}=":
            raise ValueError(f"header value for {key!r} must be single-line")
        lines.append(f"{key}={value}")
    lines.append("[manifest]")
    arrays = []
    for name, arr in tensors:
        arr = np.asarray(arr, dtype=np.float64)
        arrays.append(arr)
        dims = " ".join(str(d) for d in arr.shape)
        lines.append(f"{name} {dims}".rstrip())
    lines.append("[payload]")
    with open(path, "wb") as fh:
        fh.write(("\n".join(lines) + "\n").encode("utf-8"))
        for arr in arrays:
            fh.write(arr.astype("<f8").tobytes(order="C"))


def read_checkpoint(path) -> tuple[dict[str, str], dict[str, np.ndarray]]:
    path = Path(path)
    with open(path, "rb") as fh:
        blob = fh.read()
    nl = blob.find(b"\n")
    if nl < 0 or blob[:nl].decode("utf-8", "replace") != MAGIC:
        raise GraphFormatError(path, 1, "not a checkpoint file")
    marker = b"\n[payload]\n"
    split = blob.find(marker)
    if split < 0:
        raise GraphFormatError(path, 1, "missing payload marker")
    text = blob[:split].decode("utf-8")
    payload = blob[split + len(marker):]

    header: dict[str, str] = {}
    manifest: list[tuple[str, tuple[int, ...]]] = []
    in_manifest = False
    for line_no, line in enumerate(text.split("\n")[1:], start=2):
        if line == "[manifest]":
            in_manifest = True
            continue
        if not in_manifest:
            if "=" not in line:
                raise GraphFormatError(path, line_no, f"bad header line {line!r}")
            key, value = line.split("=", 1)
            header[key] = value
        else:
            parts = line.split(" ")
            shape = tuple(int(d) for d in parts[1:])
            manifest.append((parts[0], shape))

    tensors: dict[str, np.ndarray] = {}
    offset = 0
    itemsize = np.dtype("<f8").itemsize
    for name, shape in manifest:
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * itemsize
        chunk = payload[offset : offset + nbytes]
        if len(chunk) != nbytes:
            raise GraphFormatError(path, 0, f"payload truncated at tensor {name!r}")
        tensors[name] = np.frombuffer(chunk, dtype="<f8").reshape(shape).copy()
        offset += nbytes
    if offset != len(payload):
        raise GraphFormatError(path, 0, f"{len(payload) - offset} trailing payload bytes")
    return header, tensors
