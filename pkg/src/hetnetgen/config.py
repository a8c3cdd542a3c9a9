"""Training/run configuration: defaults, plain-text file round-trip, ablations.

Config files are UTF-8 ``key=value`` lines; ``#`` starts a comment.  The
ablation flags reproduce the three reduced model variants: a single long
walk length instead of the {1,2,3} mix (``single_long_walk``), uniform
instead of embedding-distance node sampling (``uniform_node_sampling``),
and plain score-mass edge sampling instead of pattern-guided assembly
(``probabilistic_assembler``).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import ParameterError

SINGLE_WALK_LENGTH = 8  # walk length used by the single_long_walk ablation


@dataclass(frozen=True)
class TrainConfig:
    seed: int = 7
    noise_dim: int = 32
    hidden_dim: int = 64
    embed_dim: int = 32
    embed_window: int = 3
    embed_negatives: int = 5
    embed_epochs: int = 3
    embed_lr: float = 0.025
    embed_walks: int = 1500
    embed_walk_length: int = 10
    embed_normalize: bool = True  # unit-norm rows before the GAN consumes them
    walk_lengths: tuple[int, ...] = (1, 2, 3)
    batch_size: int = 128
    n_critic: int = 10
    clip: float = 0.1
    lr_gen: float = 5e-4
    lr_gen_node: float = 5e-5  # separate, slower rate for the node-query head
    lr_disc: float = 5e-4
    ema_decay: float = 0.998  # generator weight averaging; 0 disables
    temperature: float = 0.5
    steps: int = 500
    max_len: int = 4  # maximum walk size in nodes
    checkpoint_interval: int = 200
    train_fraction: float = 0.6
    gen_walks: int = 24000  # generated walks per assembled graph
    eval_samples: int = 20000  # walks per pattern-distribution estimate
    single_long_walk: bool = False
    uniform_node_sampling: bool = False
    probabilistic_assembler: bool = False

    def resolved(self) -> "TrainConfig":
        """Apply ablation flags and validate the result."""
        cfg = self
        if cfg.single_long_walk:
            cfg = dataclasses.replace(
                cfg,
                walk_lengths=(SINGLE_WALK_LENGTH,),
                max_len=max(cfg.max_len, SINGLE_WALK_LENGTH + 1),
            )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        positive = (
            "noise_dim", "hidden_dim", "embed_dim", "embed_window", "embed_negatives",
            "embed_lr", "embed_walks", "embed_walk_length", "batch_size", "n_critic",
            "clip", "lr_gen", "lr_gen_node", "lr_disc", "temperature", "gen_walks",
            "eval_samples",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")
        for name in ("embed_epochs", "steps", "checkpoint_interval"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0")
        if not (0.0 <= self.ema_decay < 1.0):
            raise ParameterError("ema_decay must lie in [0, 1)")
        if not (0.0 < self.train_fraction < 1.0):
            raise ParameterError("train_fraction must lie strictly between 0 and 1")
        if self.max_len < 2:
            raise ParameterError("max_len must be >= 2 nodes")
        if not self.walk_lengths:
            raise ParameterError("walk_lengths must be non-empty")
        if any(l < 1 or l > self.max_len - 1 for l in self.walk_lengths):
            raise ParameterError("walk_lengths must lie in {1, ..., max_len - 1}")

    # -- serialization -----------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name == "walk_lengths":
                value = ",".join(str(v) for v in value)
            lines.append(f"{f.name}={value}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def from_mapping(cls, mapping: dict[str, str]) -> "TrainConfig":
        fields = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, raw in mapping.items():
            if key not in fields:
                raise ParameterError(f"unknown config key {key!r}")
            kwargs[key] = _parse_value(fields[key].type, key, raw)
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "TrainConfig":
        mapping = {}
        for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{line_no}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            mapping[key.strip()] = value.strip()
        return cls.from_mapping(mapping)

    def override(self, **kwargs) -> "TrainConfig":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return dataclasses.replace(self, **kwargs) if kwargs else self


def _parse_value(type_name: str, key: str, raw: str):
    if key == "walk_lengths":
        return tuple(int(part) for part in raw.split(",") if part.strip())
    if type_name == "bool":
        lowered = raw.lower()
        if lowered in ("true", "1", "yes"):
            return True
        if lowered in ("false", "0", "no"):
            return False
        raise ParameterError(f"config key {key!r}: bad boolean {raw!r}")
    if type_name == "int":
        return int(raw)
    if type_name == "float":
        return float(raw)
    return raw
