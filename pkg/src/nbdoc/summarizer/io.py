"""Model serialization: a single binary file with a versioned header
followed by raw little-endian float32 tensors.

Layout: 8-byte magic, u32 format version, u32 header length, UTF-8 JSON
header (dimensions, vocabularies, and the tensor manifest), then each
tensor's data in manifest order. Weights survive a save/load round trip
bit for bit, so a reloaded model produces identical logits.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
import torch

from ..corpus import Vocab
from .model import MODEL_VERSION, SummarizerModel, SummarizerError

MAGIC = b"NBDOCSUM"


class CorruptModel(SummarizerError):
    pass


class VersionMismatch(SummarizerError):
    pass


def save_model(model: SummarizerModel, path: str | Path) -> None:
    state = {name: param.detach() for name, param in model.named_parameters()}
    header = {
        "d": model.d,
        "hops": model.hops,
        "in_vocab": list(model.in_vocab.tokens),
        "out_vocab": list(model.out_vocab.tokens),
        "tensors": [{"name": n, "shape": list(t.shape)} for n, t in state.items()],
    }
    header_bytes = json.dumps(header).encode("utf-8")
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as handle:
        handle.write(MAGIC)
        handle.write(struct.pack("<II", MODEL_VERSION, len(header_bytes)))
        handle.write(header_bytes)
        for tensor in state.values():
            handle.write(tensor.numpy().astype("<f4", copy=False).tobytes())
    tmp.replace(path)


def load_model(path: str | Path) -> SummarizerModel:
    with open(path, "rb") as handle:
        data = handle.read()
    if len(data) < len(MAGIC) + 8 or data[: len(MAGIC)] != MAGIC:
        raise CorruptModel(f"{path}: not a model file")
    version, header_len = struct.unpack_from("<II", data, len(MAGIC))
    if version != MODEL_VERSION:
        raise VersionMismatch(f"{path}: format version {version}, expected {MODEL_VERSION}")
    offset = len(MAGIC) + 8
    try:
        header = json.loads(data[offset : offset + header_len].decode("utf-8"))
        in_vocab = Vocab(tuple(header["in_vocab"]))
        out_vocab = Vocab(tuple(header["out_vocab"]))
        manifest = header["tensors"]
        d, hops = int(header["d"]), int(header["hops"])
    except (ValueError, KeyError, TypeError) as exc:
        raise CorruptModel(f"{path}: bad header: {exc}") from exc
    model = SummarizerModel(in_vocab, out_vocab, d=d, hops=hops)
    params = dict(model.named_parameters())
    offset += header_len
    with torch.no_grad():
        for entry in manifest:
            name, shape = entry["name"], tuple(entry["shape"])
            if name not in params or tuple(params[name].shape) != shape:
                raise CorruptModel(f"{path}: unexpected tensor {name} {shape}")
            count = int(np.prod(shape)) if shape else 1
            end = offset + 4 * count
            if end > len(data):
                raise CorruptModel(f"{path}: truncated at tensor {name}")
            array = np.frombuffer(data[offset:end], dtype="<f4").reshape(shape)
            params[name].copy_(torch.from_numpy(array.copy()))
            offset = end
    if offset != len(data):
        raise CorruptModel(f"{path}: {len(data) - offset} trailing bytes")
    return model
