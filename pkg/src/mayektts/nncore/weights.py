"""``MTTW`` weight files: little-endian, float32 payloads, fixed tensor order."""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import BadMagic, ShapeMismatch, TruncatedFile
from .model import ModelDims, Tacotron2Params

MAGIC = b"MTTW"
VERSION = 1


def save_weights(params: Tacotron2Params, path: str | Path) -> None:
    parts = [MAGIC, struct.pack("<B", VERSION)]
    for name, arr in params.named_tensors():
        raw = name.encode("utf-8")
        parts.append(struct.pack("<I", len(raw)) + raw)
        parts.append(struct.pack("<I", arr.ndim) + struct.pack(f"<{arr.ndim}I", *arr.shape))
        parts.append(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(parts))


def read_tensors(path: str | Path) -> dict[str, np.ndarray]:
    blob = Path(path).read_bytes()
    if blob[:4] != MAGIC:
        raise BadMagic(f"{path}: missing MTTW magic")
    if len(blob) < 5:
        raise TruncatedFile(f"{path}: no version byte")
    if blob[4] != VERSION:
        raise BadMagic(f"{path}: unsupported version {blob[4]}")
    pos = 5
    out: dict[str, np.ndarray] = {}

    def take(n: int) -> bytes:
        nonlocal pos
        if pos + n > len(blob):
            raise TruncatedFile(f"{path}: record runs past end of file at byte {pos}")
        chunk = blob[pos:pos + n]
        pos += n
        return chunk

    while pos < len(blob):
        (name_len,) = struct.unpack("<I", take(4))
        name = take(name_len).decode("utf-8")
        (ndim,) = struct.unpack("<I", take(4))
        dims = struct.unpack(f"<{ndim}I", take(4 * ndim))
        count = int(np.prod(dims)) if ndim else 1
        data = np.frombuffer(take(4 * count), dtype="<f4").astype(np.float64)
        if name in out:
            raise ShapeMismatch(f"{path}: duplicate tensor {name}")
        out[name] = data.reshape(dims)
    return out


def infer_dims(tensors: dict[str, np.ndarray]) -> ModelDims:
    try:
        V, d = tensors["embedding"].shape
        e = tensors["enc.conv0.w"].shape[0]
        n_filters, k_loc = tensors["att.F"].shape
        return ModelDims(
            n_symbols=V,
            embed_dim=d,
            encoder_dim=e,
            prenet_dim=tensors["prenet.0.W"].shape[0],
            decoder_dim=tensors["dec.rnn.U_f"].shape[0],
            attention_dim=tensors["att.v"].shape[0],
            location_filters=n_filters,
            location_kernel=k_loc,
            postnet_channels=tensors["postnet.0.w"].shape[0],
            n_mels=tensors["mel_proj.W"].shape[0],
        )
    except (KeyError, ValueError) as exc:
        raise ShapeMismatch(f"weight file does not follow the tensor schema: {exc}") from None


def load_weights(path: str | Path, dims: ModelDims | None = None) -> Tacotron2Params:
    tensors = read_tensors(path)
    return Tacotron2Params.from_named(tensors, dims or infer_dims(tensors))
