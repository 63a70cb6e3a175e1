# File: dsqi_bench/synthesis/config.py
"""Configuration of the synthetic data generators"""

from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from core.exceptions import ArgumentError, UsageError
from features.windowing import frame_geometry

ALL_PAIRS = "all-pairs"
TRANSITION_SHAPES = ("linear", "sigmoid")

#: Independent random streams drawn from one seed.
RNG_STREAMS = ("timeline", "emg", "confidence", "features", "mean_mav", "rest", "training", "training_signal",
               "blips")

#: Weight of the uniform floor mixed into every confidence target.
CONFIDENCE_FLOOR = 0.1


@dataclass(frozen=True)
class GeneratorConfig:
    """Synthetic trial geometry and confidence-profile parameters

    Attributes:
        seed: Root seed; every generator derives its own stream from it
        n_classes: Number of classes K
        n_channels: Number of signal channels N_CH
        sample_rate_hz: Sampling rate of synthetic signals
        frame_length_ms: Frame length used to cut signals
        increment_ms: Frame increment (frame period of every stream)
        nm_class: No Motion class
        steady_ms: Steady-state hold per schedule entry
        transition_ms: Duration of each transition
        transition_shape: "linear" or "sigmoid" cross-fade
        steady_concentration: Dirichlet concentration of steady-state confidences
        transition_concentration: Dirichlet concentration of transition
            confidences at volatility 1
        volatility: Transition noise factor; 0 gives an exact cross-fade
        schedule: Ordered class list, or "all-pairs" for every ordered pair once
        rest_between: Insert an NM hold between consecutive active classes
        amplitude_profiles: Per-class per-channel RMS levels (K × N_CH);
            None uses one dominant channel per active class
        latent_dim: Dimension of latent feature vectors (default K)
        class_separation: Distance of latent class means from the origin,
            in units of the within-class standard deviation
        amplitude_noise: Relative frame-to-frame spread of the mean-MAV envelope
        generative: Whether emitted confidences emulate a generative classifier
        training_frames: Labeled frames per class in synthetic training sets
        blip_rate: Chance that a steady frame starts a short error burst
        blip_frames: Longest error burst, in frames
        blip_weight: Share of the confidence target moved to the wrong class
            during a burst
    """
    seed: int = 0
    n_classes: int = 7
    n_channels: int = 6
    sample_rate_hz: float = 2000.0
    frame_length_ms: float = 160.0
    increment_ms: float = 16.0
    nm_class: int = 1
    steady_ms: float = 3000.0
    transition_ms: float = 500.0
    transition_shape: str = "linear"
    steady_concentration: float = 50.0
    transition_concentration: float = 10.0
    volatility: float = 1.0
    schedule: Union[str, Tuple[int, ...]] = ALL_PAIRS
    rest_between: bool = False
    amplitude_profiles: Optional[Tuple[Tuple[float, ...], ...]] = None
    latent_dim: Optional[int] = None
    class_separation: float = 5.0
    amplitude_noise: float = 0.1
    generative: bool = True
    training_frames: int = 200
    blip_rate: float = 0.0
    blip_frames: int = 3
    blip_weight: float = 0.7

    def __post_init__(self):
        if self.n_classes < 2:
            raise ArgumentError(f"need at least 2 classes, got {self.n_classes}")
        if not 1 <= self.nm_class <= self.n_classes:
            raise ArgumentError(f"nm_class {self.nm_class} outside 1..{self.n_classes}")
        if self.n_channels < 1:
            raise ArgumentError(f"n_channels must be >= 1, got {self.n_channels}")
        if not self.sample_rate_hz > 0:
            raise ArgumentError(f"sample_rate_hz must be > 0, got {self.sample_rate_hz}")
        frame_geometry(self.frame_length_ms, self.increment_ms, self.sample_rate_hz)
        for name in ("steady_ms", "transition_ms", "steady_concentration", "transition_concentration",
                     "sample_rate_hz", "class_separation"):
            if not getattr(self, name) > 0:
                raise ArgumentError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.volatility < 0 or self.amplitude_noise < 0:
            raise ArgumentError("volatility and amplitude_noise must be >= 0")
        if self.transition_shape not in TRANSITION_SHAPES:
            raise ArgumentError(f"transition_shape must be one of {TRANSITION_SHAPES}")
        if self.steady_frames < 1 or self.transition_frames < 1:
            raise ArgumentError("steady and transition durations must span at least one frame")
        if isinstance(self.schedule, str):
            if self.schedule != ALL_PAIRS:
                raise ArgumentError(f"schedule must be a class list or '{ALL_PAIRS}', got '{self.schedule}'")
        else:
            object.__setattr__(self, "schedule", tuple(int(k) for k in self.schedule))
            if not self.schedule:
                raise ArgumentError("schedule is empty")
            for k in self.schedule:
                if not 1 <= k <= self.n_classes:
                    raise ArgumentError(f"schedule class {k} outside 1..{self.n_classes}")
        if self.latent_dim is not None and self.latent_dim < self.n_classes:
            raise ArgumentError(f"latent_dim must be >= n_classes ({self.n_classes}), got {self.latent_dim}")
        if self.training_frames < 2:
            raise ArgumentError("training_frames must be >= 2")
        if not 0.0 <= self.blip_rate <= 1.0:
            raise ArgumentError(f"blip_rate must be in [0, 1], got {self.blip_rate}")
        if self.blip_frames < 1:
            raise ArgumentError(f"blip_frames must be >= 1, got {self.blip_frames}")
        if not 0.0 < self.blip_weight <= 1.0:
            raise ArgumentError(f"blip_weight must be in (0, 1], got {self.blip_weight}")
        if self.amplitude_profiles is not None:
            profiles = np.asarray(self.amplitude_profiles, dtype=np.float64)
            if profiles.shape != (self.n_classes, self.n_channels) or np.any(profiles < 0):
                raise ArgumentError(
                    f"amplitude_profiles must be non-negative with shape ({self.n_classes}, {self.n_channels})"
                )

    @property
    def steady_frames(self) -> int:
        return int(round(self.steady_ms / self.increment_ms))

    @property
    def transition_frames(self) -> int:
        return int(round(self.transition_ms / self.increment_ms))

    @property
    def feature_dim(self) -> int:
        return self.n_classes if self.latent_dim is None else self.latent_dim

    def profiles(self) -> np.ndarray:
        """Per-class per-channel RMS levels, shape (K, N_CH)"""
        if self.amplitude_profiles is not None:
            return np.asarray(self.amplitude_profiles, dtype=np.float64)
        profiles = np.full((self.n_classes, self.n_channels), 0.1)
        profiles[self.nm_class - 1] = 0.01
        active = [k for k in range(1, self.n_classes + 1) if k != self.nm_class]
        for j, k in enumerate(active):
            profiles[k - 1, j % self.n_channels] = 1.0
            profiles[k - 1, (j + 1) % self.n_channels] = 0.5
        return profiles

    def rng(self, purpose: str) -> np.random.Generator:
        """Independent generator for one purpose, derived from the seed"""
        children = np.random.SeedSequence(self.seed).spawn(len(RNG_STREAMS))
        return np.random.default_rng(children[RNG_STREAMS.index(purpose)])

    def with_overrides(self, **overrides: Any) -> 'GeneratorConfig':
        return replace(self, **overrides)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'GeneratorConfig':
        """Build from typed or string values, e.g. a [synth] config section

        Raises:
            UsageError: On an unknown key
            ArgumentError: On a value that does not parse
        """
        known = {f.name for f in fields(cls)}
        values: Dict[str, Any] = {}
        for key, value in data.items():
            if key not in known:
                raise UsageError(f"unknown synth key '{key}'")
            values[key] = _coerce(key, value)
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        if not isinstance(self.schedule, str):
            data["schedule"] = list(self.schedule)
        return data


_INT_KEYS = {"seed", "n_classes", "n_channels", "nm_class", "latent_dim", "training_frames", "blip_frames"}
_BOOL_KEYS = {"rest_between", "generative"}


def _coerce(key: str, value: Any) -> Any:
    if not isinstance(value, str):
        return value
    text = value.strip()
    try:
        if key == "schedule":
            if text == ALL_PAIRS:
                return text
            return tuple(int(part) for part in text.replace(";", ",").split(",") if part.strip())
        if key == "transition_shape":
            return text
        if key == "amplitude_profiles":
            rows = [row for row in text.split(";") if row.strip()]
            return tuple(tuple(float(x) for x in row.split(",")) for row in rows)
        if key == "latent_dim" and text.lower() in ("", "none"):
            return None
        if key in _INT_KEYS:
            return int(text)
        if key in _BOOL_KEYS:
            lowered = text.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        return float(text)
    except ValueError:
        raise ArgumentError(f"invalid value '{value}' for synth key '{key}'") from None
