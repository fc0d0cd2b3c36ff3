"""Run configuration: a flat dataclass, loadable from key = value text files."""

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError


@dataclass(frozen=True)
class RunConfig:
    task: str = "ner"
    source_lang: str = "src"
    target_lang: str = "tgt"
    train: str = ""
    dev: str = ""
    test: str = ""
    unlabeled: str = ""          # optional unlabeled text for vocabulary coverage
    dictionary: str = ""
    tables: str = ""
    vocab: str = ""              # loaded when set, built from the corpora otherwise
    vocab_size: int = 600
    tag_set: tuple = ()          # inferred from the training data when empty
    out: str = "runs/run"
    seed: int = 1
    epochs: int = 8
    batch_size: int = 16
    lr: float = 5e-5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip_norm: float = 1.0
    layers: int = 2
    heads: int = 2
    hidden: int = 64
    ff_width: int = 256
    max_positions: int = 128
    lambda_align: float = 0.0
    beta_mlm: float = 0.0
    gamma_xmlm: float = 0.0
    mu: float = 0.15
    r: float = 0.3
    no_pe: bool = False
    no_extension: bool = False
    no_lang_emb: bool = False
    romanized: bool = False

    def __post_init__(self):
        if self.task not in ("ner", "pos"):
            raise ConfigError(f"task must be ner or pos, got {self.task!r}")
        if self.batch_size < 1:
            raise ConfigError("batch size must be at least 1")


_FIELD_TYPES = {f.name: (f.type if isinstance(f.type, str) else f.type.__name__)
                for f in fields(RunConfig)}


def _coerce(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    raw = raw.strip()
    if kind == "bool":
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "tuple":
        return tuple(part.strip() for part in raw.split(",") if part.strip())
    return raw


def parse_config_file(path: str | Path) -> dict:
    """Read `key = value` lines; '#' starts a comment."""
    values: dict = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{line_no}: unknown configuration key {key!r}")
        values[key] = _coerce(key, value)
    return values


def make_run_config(file_path: str | Path | None = None, **overrides) -> RunConfig:
    values = parse_config_file(file_path) if file_path else {}
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown configuration key {key!r}")
        values[key] = _coerce(key, str(value)) if isinstance(value, str) else value
    return RunConfig(**values)


def with_overrides(config: RunConfig, **overrides) -> RunConfig:
    return replace(config, **overrides)
