"""Binary checkpoint container.

Layout::

    b"RTRANSCK"                 magic
    uint32 LE                   format version
    uint64 LE                   header length in bytes
    header                      UTF-8 JSON: model config, training config and array index
    payload                     little-endian float64 arrays, in index order

The bytes depend only on the configs and the array values, so identical runs
write identical files.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional
import json
import logging
import struct

import numpy as np
from pydantic import ValidationError

from autodiff import Tensor
from errors import CheckpointError
from models.configs import ModelConfig, TrainConfig
from network.params import ModelParams

logger = logging.getLogger(__name__)

MAGIC = b"RTRANSCK"
FORMAT_VERSION = 1
_PREAMBLE = struct.Struct("<IQ")
_DTYPE = np.dtype("<f8")


def checkpoint_bytes(params: ModelParams, train_config: Optional[TrainConfig] = None) -> bytes:
    index: List[Dict[str, Any]] = []
    chunks: List[bytes] = []
    offset = 0
    arrays = [("param", name, t.values) for name, t in params.named_parameters()]
    arrays += [("buffer", name, values) for name, values in params.buffers.items()]
    for kind, name, values in arrays:
        data = np.ascontiguousarray(values, dtype=_DTYPE).tobytes()
        index.append({"name": name, "kind": kind, "shape": list(values.shape), "offset": offset})
        chunks.append(data)
        offset += len(data)

    header = json.dumps(
        {
            "format_version": FORMAT_VERSION,
            "config": params.config.model_dump(),
            "train_config": train_config.model_dump() if train_config is not None else None,
            "arrays": index,
        },
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    return MAGIC + _PREAMBLE.pack(FORMAT_VERSION, len(header)) + header + b"".join(chunks)


def save_checkpoint(params: ModelParams, path: Path, train_config: Optional[TrainConfig] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(checkpoint_bytes(params, train_config))
    logger.info(f"Saved checkpoint ({params.num_parameters()} parameters) to {path}")
    return path


def parse_checkpoint(
    blob: bytes,
    expected_config: Optional[ModelConfig] = None,
    expected_train_config: Optional[TrainConfig] = None,
) -> ModelParams:
    if not blob.startswith(MAGIC):
        raise CheckpointError("not an R-Trans checkpoint (bad magic)")
    start = len(MAGIC)
    try:
        version, header_len = _PREAMBLE.unpack_from(blob, start)
    except struct.error:
        raise CheckpointError("truncated checkpoint preamble")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}, expected {FORMAT_VERSION}")

    header_start = start + _PREAMBLE.size
    payload_start = header_start + header_len
    try:
        header = json.loads(blob[header_start:payload_start].decode("utf-8"))
        config = ModelConfig(**header["config"])
    except (ValueError, KeyError, ValidationError) as e:
        raise CheckpointError(f"invalid checkpoint header: {e}")

    if expected_config is not None and expected_config.model_dump() != config.model_dump():
        raise CheckpointError(
            f"checkpoint config does not match the requested model: "
            f"{config.model_dump()} != {expected_config.model_dump()}"
        )
    if expected_train_config is not None:
        stored = header.get("train_config")
        if stored is None:
            raise CheckpointError("checkpoint records no training config to compare against")
        if stored != expected_train_config.model_dump():
            raise CheckpointError(
                f"checkpoint was trained with a different training config: "
                f"{stored} != {expected_train_config.model_dump()}"
            )

    payload = blob[payload_start:]
    tensors: Dict[str, Tensor] = {}
    buffers: Dict[str, np.ndarray] = {}
    for entry in header["arrays"]:
        count = int(np.prod(entry["shape"], dtype=np.int64))
        end = entry["offset"] + count * _DTYPE.itemsize
        if end > len(payload):
            raise CheckpointError(f"array {entry['name']} runs past the end of the file")
        values = np.frombuffer(payload, dtype=_DTYPE, count=count, offset=entry["offset"])
        values = values.reshape(entry["shape"]).astype(np.float64)
        if entry["kind"] == "buffer":
            buffers[entry["name"]] = values
        else:
            tensors[entry["name"]] = Tensor(values, requires_grad=True, name=entry["name"])

    return ModelParams(config, tensors, buffers)


def load_checkpoint(
    path: Path,
    expected_config: Optional[ModelConfig] = None,
    expected_train_config: Optional[TrainConfig] = None,
) -> ModelParams:
    """Read a checkpoint; each expected config must match the stored one when given."""
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    params = parse_checkpoint(path.read_bytes(), expected_config, expected_train_config)
    logger.info(f"Loaded checkpoint from {path}")
    return params
