"""Versioned text checkpoints.

Layout (UTF-8, no timestamps, fully deterministic):

    phonexl-ckpt 1
    meta <json>                     run metadata: epoch, dev F1, seed, tag set, langs
    config <json>                   EncoderConfig fields
    vocab_sha256 <hex>              hash of the vocabulary file contents
    tensor <name> <dim0,dim1,...>
    <base64 of row-major float64 little-endian bytes>
    ... one tensor block per parameter, sorted by name ...
    end
"""

import base64
import hashlib
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .autodiff import Tensor
from .errors import ConfigError
from .model import EncoderConfig

FORMAT = "phonexl-ckpt 1"


def vocab_hash(vocab) -> str:
    payload = "\n".join(vocab.entries) + f"\n#{vocab.base_size}"
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def save_checkpoint(path, params: dict[str, Tensor], config: EncoderConfig,
                    vocab_sha256: str, meta: dict) -> None:
    lines = [FORMAT,
             "meta " + json.dumps(meta, sort_keys=True),
             "config " + json.dumps(asdict(config), sort_keys=True),
             "vocab_sha256 " + vocab_sha256]
    for name in sorted(params):
        value = np.asarray(params[name].value, dtype="<f8")
        shape = ",".join(str(d) for d in value.shape) or "-"
        lines.append(f"tensor {name} {shape}")
        lines.append(base64.b64encode(value.tobytes()).decode("ascii"))
    lines.append("end")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_checkpoint(path) -> tuple[dict[str, Tensor], EncoderConfig, str, dict]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != FORMAT:
        raise ConfigError(f"{path}: not a {FORMAT} file")
    meta = json.loads(lines[1].removeprefix("meta "))
    config = EncoderConfig(**json.loads(lines[2].removeprefix("config ")))
    sha = lines[3].removeprefix("vocab_sha256 ")
    params: dict[str, Tensor] = {}
    i = 4
    while i < len(lines) and lines[i] != "end":
        header = lines[i].split()
        if header[0] != "tensor" or len(header) != 3 or i + 1 >= len(lines):
            raise ConfigError(f"{path}: malformed or truncated tensor block at line {i + 1}")
        name = header[1]
        shape = () if header[2] == "-" else tuple(int(d) for d in header[2].split(","))
        raw = base64.b64decode(lines[i + 1])
        value = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
        params[name] = Tensor(value, name=name)
        i += 2
    if i >= len(lines):
        raise ConfigError(f"{path}: truncated checkpoint (missing end marker)")
    return params, config, sha, meta
