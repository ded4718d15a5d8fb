"""Layer-by-layer network descriptions and the named architecture presets.

Two families are supported: a dense (fully connected) next-sample predictor
and an LSTM autoencoder whose decoder re-expands a repeated code vector.
A spec carries a global width scale (1, 1/2, 1/4, 1/8) so the same preset
can be shrunk uniformly; the final one-unit readout layer is never scaled.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..errors import ValidationError

KINDS = ("dense", "lstm", "dropout", "flatten", "repeat_vector", "time_distributed_dense")
ACTIVATIONS = ("relu", "linear")
ALLOWED_SCALES = (1.0, 0.5, 0.25, 0.125)


@dataclass(frozen=True)
class LayerSpec:
    """One layer; only the fields relevant to ``kind`` may be set."""

    kind: str
    width: int | None = None
    rate: float | None = None
    repeat: int | None = None
    activation: str | None = None
    returns_sequence: bool | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown layer kind {self.kind!r}")
        required = {
            "dense": ("width", "activation"),
            "lstm": ("width", "activation", "returns_sequence"),
            "dropout": ("rate",),
            "flatten": (),
            "repeat_vector": ("repeat",),
            "time_distributed_dense": ("width", "activation"),
        }[self.kind]
        for name in ("width", "rate", "repeat", "activation", "returns_sequence"):
            value = getattr(self, name)
            if name in required:
                if value is None:
                    raise ValidationError(f"{self.kind} layer requires {name}")
            elif value is not None:
                raise ValidationError(f"{self.kind} layer does not take {name}")
        if self.width is not None and self.width < 1:
            raise ValidationError(f"layer width must be >= 1, got {self.width}")
        if self.repeat is not None and self.repeat < 1:
            raise ValidationError(f"repeat factor must be >= 1, got {self.repeat}")
        if self.rate is not None and not (0.0 <= self.rate < 1.0):
            raise ValidationError(f"dropout rate must be in [0, 1), got {self.rate}")
        if self.activation is not None and self.activation not in ACTIVATIONS:
            raise ValidationError(f"activation must be one of {ACTIVATIONS}")


@dataclass(frozen=True)
class ModelSpec:
    """Ordered layers plus the input window length and the width scale."""

    layers: tuple[LayerSpec, ...]
    input_window: int
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.input_window < 1:
            raise ValidationError(f"input_window must be >= 1, got {self.input_window}")
        if self.scale not in ALLOWED_SCALES:
            raise ValidationError(f"scale must be one of {ALLOWED_SCALES}, got {self.scale}")
        if not self.layers:
            raise ValidationError("model needs at least one layer")
        last = self.layers[-1]
        if last.kind != "time_distributed_dense" or last.width != 1:
            raise ValidationError("the last layer must be a width-1 time_distributed_dense readout")
        # Scaling must land on integer sizes >= 1 (checked eagerly, not at build).
        effective_layers(self)

    @property
    def is_recurrent(self) -> bool:
        return any(layer.kind == "lstm" for layer in self.layers)


def _scaled_int(value: int, scale: float, what: str) -> int:
    scaled = value * scale
    if scaled < 1 or scaled != int(scaled):
        raise ValidationError(f"{what} {value} scaled by {scale} is not an integer >= 1")
    return int(scaled)


def effective_layers(spec: ModelSpec) -> tuple[LayerSpec, ...]:
    """Apply the width scale; the final readout keeps its width of 1."""
    out = []
    for pos, layer in enumerate(spec.layers):
        is_last = pos == len(spec.layers) - 1
        if layer.width is not None and not is_last:
            layer = replace(layer, width=_scaled_int(layer.width, spec.scale, "width"))
        if layer.repeat is not None:
            layer = replace(layer, repeat=_scaled_int(layer.repeat, spec.scale, "repeat factor"))
        out.append(layer)
    return tuple(out)


def _lstm_autoencoder(outer: int, inner: int, code_repeat: int) -> tuple[LayerSpec, ...]:
    seq = lambda w, rs: LayerSpec("lstm", width=w, activation="relu", returns_sequence=rs)
    drop = LayerSpec("dropout", rate=0.2)
    return (
        seq(outer, True),
        drop,
        seq(inner, False),
        drop,
        LayerSpec("flatten"),
        LayerSpec("repeat_vector", repeat=code_repeat),
        seq(inner, True),
        drop,
        seq(outer, True),
        drop,
        LayerSpec("time_distributed_dense", width=1, activation="linear"),
    )


def _dense_autoencoder() -> tuple[LayerSpec, ...]:
    d = lambda w: LayerSpec("dense", width=w, activation="relu")
    drop = LayerSpec("dropout", rate=0.2)
    return (
        d(64),
        drop,
        d(32),
        drop,
        d(16),  # bottleneck: no dropout
        d(32),
        drop,
        d(64),
        drop,
        LayerSpec("time_distributed_dense", width=1, activation="linear"),
    )


_PRESET_LAYERS = {
    "table1": _dense_autoencoder,
    "table2": lambda: _lstm_autoencoder(64, 32, 16),
    "table3": lambda: _lstm_autoencoder(64, 32, 16),
    "table4": lambda: _lstm_autoencoder(8, 4, 2),
}

PRESET_NAMES = tuple(_PRESET_LAYERS)


def preset(name: str, input_window: int = 100, scale: float = 1.0) -> ModelSpec:
    """Named architecture presets.

    table1  dense 64/32/16/32/64 autoencoder
    table2  LSTM 64/32 encoder, code repeated 16 times, 32/64 decoder
    table3  alias of table2
    table4  LSTM 8/4 encoder, code repeated twice, 4/8 decoder
            (table2 at scale 1/8)
    """
    try:
        layers = _PRESET_LAYERS[name]()
    except KeyError:
        raise ValidationError(f"unknown preset {name!r}; choose from {PRESET_NAMES}") from None
    return ModelSpec(layers=layers, input_window=input_window, scale=scale)
