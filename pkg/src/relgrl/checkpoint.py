"""Self-describing binary checkpoints of a QNet together with its encoding layout.

Layout (all integers unsigned little-endian, floats little-endian float64)::

    magic        8 bytes  b"RGRLQNET"
    version      u32      currently 1
    layout_len   u32      length of the UTF-8 layout text that follows
    layout       bytes    EncodingLayout.to_text()
    n_dims       u32      number of layer sizes
    dims         u32 * n_dims
    adam         f64 * 4  lr, beta1, beta2, eps
    adam_t       u64      Adam step counter
    params       f64 ...  W0, b0, W1, b1, ... (row-major)
    adam_m       f64 ...  first moments, same shapes and order
    adam_v       f64 ...  second moments
    crc32        u32      over every preceding byte
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from relgrl.encoding import EncodingLayout, LayoutError
from relgrl.qnet import AdamConfig, QNet

MAGIC = b"RGRLQNET"
VERSION = 1


class CheckpointError(ValueError):
    pass


class ChecksumError(CheckpointError):
    pass


def save_bytes(net: QNet, layout: EncodingLayout) -> bytes:
    if net.input_dim != layout.input_dim:
        raise LayoutError(f"network expects {net.input_dim} inputs but the layout produces {layout.input_dim}")
    text = layout.to_text().encode("utf-8")
    parts = [MAGIC, struct.pack("<II", VERSION, len(text)), text,
             struct.pack("<I", len(net.layer_dims)), struct.pack(f"<{len(net.layer_dims)}I", *net.layer_dims),
             struct.pack("<4d", net.adam.lr, net.adam.beta1, net.adam.beta2, net.adam.eps),
             struct.pack("<Q", net.t)]
    for group in (net.parameters(), net.m, net.v):
        for arr in group:
            parts.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def load_bytes(data: bytes, expected: EncodingLayout | None = None) -> tuple[QNet, EncodingLayout]:
    if len(data) < len(MAGIC) + 12 or data[: len(MAGIC)] != MAGIC:
        raise CheckpointError("not a checkpoint (bad magic)")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc:
        raise ChecksumError("checkpoint checksum mismatch (file corrupted)")
    pos = len(MAGIC)
    version, tlen = struct.unpack_from("<II", body, pos)
    pos += 8
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    layout = EncodingLayout.from_text(body[pos: pos + tlen].decode("utf-8"))
    pos += tlen
    (nd,) = struct.unpack_from("<I", body, pos)
    pos += 4
    dims = list(struct.unpack_from(f"<{nd}I", body, pos))
    pos += 4 * nd
    lr, b1, b2, eps = struct.unpack_from("<4d", body, pos)
    pos += 32
    (t,) = struct.unpack_from("<Q", body, pos)
    pos += 8
    if dims[0] != layout.input_dim:
        raise LayoutError(f"network input size {dims[0]} does not match layout size {layout.input_dim}")
    if expected is not None and expected != layout:
        raise LayoutError(
            f"checkpoint layout ({layout.n_features} features, actions {layout.action_names}) does not match "
            f"the expected layout ({expected.n_features} features, actions {expected.action_names})")
    net = QNet.zeros(dims)
    net.adam = AdamConfig(lr, b1, b2, eps)
    net.t = t
    for group in (net.parameters(), net.m, net.v):
        for arr in group:
            n = arr.size
            arr[...] = np.frombuffer(body, dtype="<f8", count=n, offset=pos).reshape(arr.shape)
            pos += 8 * n
    if pos != len(body):
        raise CheckpointError("trailing bytes in checkpoint")
    return net, layout


def save(path, net: QNet, layout: EncodingLayout) -> None:
    Path(path).write_bytes(save_bytes(net, layout))


def load(path, expected: EncodingLayout | None = None) -> tuple[QNet, EncodingLayout]:
    return load_bytes(Path(path).read_bytes(), expected)
