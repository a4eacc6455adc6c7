"""Run configuration: layout + glyphs + corpus + model + training knobs.

Values resolve in three tiers: profile defaults, then a key=value config
file, then command-line flags (flags win). Two built-in profiles ship:

* paper  — 224px image, 16px margin, 6x6 grid, 3+3 rows, 3 channels,
           min_frequency 1000, cuts 18/18, batch 5.
* desk   — 112px image, 8px margin, same grid, 1 channel, tiny-corpus
           defaults for CPU-scale runs.
"""

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError
from .glyphs import GlyphSource, parse_glyph_spec
from .layout import LayoutConfig, compute_layout
from .network import ModelConfig


@dataclass
class RunConfig:
    image_px: int = 224
    margin_px: int = 16
    grid_rows: int = 6
    grid_cols: int = 6
    input_rows: int = 3
    channels: int = 3
    glyph_source: str = "procedural:0"

    corpus: str | None = None
    corpus_format: str = "tsv"
    manifest: str | None = None
    min_frequency: int = 1000
    input_cut: int = 18
    response_cut: int = 18
    train_fraction: float = 0.75

    conv_filters: str = "8,16,32"
    fc_width: int = 128
    batch_size: int = 5
    learning_rate: float = 0.005
    momentum: float = 0.9
    epochs: int = 10
    max_iterations: int | None = None
    eval_interval: int = 500
    stop_train_accuracy: float | None = None

    seed: int = 0
    checkpoint: str | None = None

    def layout(self) -> LayoutConfig:
        lay = compute_layout(
            self.image_px,
            self.margin_px,
            self.grid_rows,
            self.grid_cols,
            self.input_rows,
            self.channels,
        )
        if self.input_cut > lay.input_capacity:
            raise ConfigError(
                f"input_cut {self.input_cut} exceeds layout capacity "
                f"{lay.input_capacity}"
            )
        if self.response_cut > lay.response_capacity:
            raise ConfigError(
                f"response_cut {self.response_cut} exceeds layout capacity "
                f"{lay.response_capacity}"
            )
        return lay

    def glyphs(self) -> GlyphSource:
        return parse_glyph_spec(self.glyph_source)

    def model_config(self, num_classes: int) -> ModelConfig:
        return ModelConfig(
            input_px=self.image_px,
            input_channels=self.channels,
            conv_filters=tuple(int(f) for f in self.conv_filters.split(",")),
            fc_width=self.fc_width,
            num_classes=num_classes,
            seed=self.seed,
        )


PROFILES = {
    "paper": {},
    "desk": {
        "image_px": 112,
        "margin_px": 8,
        "channels": 1,
        "min_frequency": 1,
        "learning_rate": 0.005,
        "epochs": 200,
        "eval_interval": 100,
    },
}

_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}

_INT_KEYS = {
    "image_px", "margin_px", "grid_rows", "grid_cols", "input_rows",
    "channels", "min_frequency", "input_cut", "response_cut", "fc_width",
    "batch_size", "epochs", "eval_interval", "seed", "max_iterations",
}
_FLOAT_KEYS = {"train_fraction", "learning_rate", "momentum", "stop_train_accuracy"}


def _coerce(key: str, value: str):
    if key in _INT_KEYS:
        return int(value)
    if key in _FLOAT_KEYS:
        return float(value)
    return value


def parse_config_file(path) -> dict:
    """Read key=value lines; '#' starts a comment, blank lines ignored."""
    result = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key = key.strip()
        value = value.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            result[key] = _coerce(key, value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}")
    return result


def resolve_config(
    profile: str = "paper",
    config_file=None,
    overrides: dict | None = None,
) -> RunConfig:
    """Merge profile defaults, config file, and flag overrides (flags win)."""
    if profile not in PROFILES:
        raise ConfigError(f"unknown profile {profile!r}; choices: {sorted(PROFILES)}")
    merged = dict(PROFILES[profile])
    if config_file is not None:
        merged.update(parse_config_file(config_file))
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    unknown = set(merged) - set(_FIELD_TYPES)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**merged)
