# File: dsqi_bench/models/scheme_config.py
"""Hyperparameters of the decision stream quality improvement schemes"""

from dataclasses import dataclass, fields, replace, asdict
from typing import Any, Dict, Mapping, Optional, Tuple

from core.exceptions import ArgumentError, UsageError
from utils.validators import ConfidenceValidator

#: Registered scheme identifiers; "none" is the pass-through baseline.
SCHEME_NAMES: Tuple[str, ...] = (
    "none", "mv", "plda", "cbr", "cs", "bf", "aw", "ol", "od", "dcir", "vocir",
)

#: Rejection thresholds for CBR and AW by classifier family.
REJECTION_THRESHOLDS = {"generative": 0.97, "discriminative": 0.6}

#: History length per windowed scheme.
DEFAULT_HISTORY = {"mv": 8, "bf": 8, "vocir": 8}

#: Confidence scaling: NM emphasized, every other class damped.
NM_SCALE = 0.97
ACTIVE_SCALE = 0.05

WARMUP_MODES = ("available", "nm")


@dataclass(frozen=True)
class SchemeConfig:
    """Hyperparameters for one scheme

    Attributes:
        scheme: Scheme identifier (one of SCHEME_NAMES)
        m: History length of MV/BF/VoCIR (window holds m + 1 decisions)
        th_rej: CBR rejection threshold
        th_aw: Adaptive windowing acceptance threshold
        th_min: Lower bound of the DCIR/VoCIR threshold
        th_max: Upper bound of the DCIR/VoCIR threshold
        tau: DCIR decay time constant in frames
        beta: VoCIR sensitivity to confidence variance
        b: pLDA prior growth rate
        p_max: pLDA prior cap
        renormalize: Store pLDA priors renormalized after each update
        scale_factors: CS per-class factors s_k; None uses the NM-emphasis default
        m_ol: Number of onset decisions the onset lock votes over
        th_mav: Onset threshold on mean MAV; None derives it from NM training data
        occ_quantile: Quantile of training distances used as OCC threshold
        fl_min_ms: Adaptive windowing base frame length
        fl_max_ms: Adaptive windowing maximum frame length
        fl_step_ms: Adaptive windowing growth step (frame increment)
        warmup: "available" runs window schemes on the history seen so far;
            "nm" emits the NM class until the window is full
    """
    scheme: str = "none"
    m: int = 8
    th_rej: float = REJECTION_THRESHOLDS["generative"]
    th_aw: float = REJECTION_THRESHOLDS["generative"]
    th_min: float = 0.4
    th_max: float = 0.989
    tau: float = 30.0
    beta: float = 4.0
    b: float = 0.5
    p_max: float = 0.97
    renormalize: bool = False
    scale_factors: Optional[Tuple[float, ...]] = None
    m_ol: int = 6
    th_mav: Optional[float] = None
    occ_quantile: float = 0.99
    fl_min_ms: float = 160.0
    fl_max_ms: float = 256.0
    fl_step_ms: float = 16.0
    warmup: str = "available"

    def __post_init__(self):
        if self.scheme not in SCHEME_NAMES:
            raise UsageError(f"unknown scheme '{self.scheme}', expected one of {', '.join(SCHEME_NAMES)}")
        if self.m < 0:
            raise ArgumentError(f"m must be >= 0, got {self.m}")
        if self.m_ol < 1:
            raise ArgumentError(f"m_ol must be >= 1, got {self.m_ol}")
        for name in ("th_rej", "th_aw", "th_min", "th_max"):
            ConfidenceValidator.check_probability(name, getattr(self, name))
        if self.th_min > self.th_max:
            raise ArgumentError(f"th_min ({self.th_min}) must not exceed th_max ({self.th_max})")
        ConfidenceValidator.check_positive("tau", self.tau)
        ConfidenceValidator.check_positive("beta", self.beta, allow_zero=True)
        ConfidenceValidator.check_probability("b", self.b, open_low=True)
        ConfidenceValidator.check_probability("p_max", self.p_max, open_low=True, open_high=True)
        ConfidenceValidator.check_probability("occ_quantile", self.occ_quantile, open_low=True)
        if self.scale_factors is not None:
            for k, s in enumerate(self.scale_factors, start=1):
                ConfidenceValidator.check_positive(f"scale factor s_{k}", s)
        if self.th_mav is not None:
            ConfidenceValidator.check_positive("th_mav", self.th_mav, allow_zero=True)
        if not 0 < self.fl_min_ms <= self.fl_max_ms or self.fl_step_ms <= 0:
            raise ArgumentError("adaptive window lengths must satisfy 0 < fl_min <= fl_max and step > 0")
        if self.warmup not in WARMUP_MODES:
            raise ArgumentError(f"warmup must be one of {WARMUP_MODES}, got '{self.warmup}'")

    @classmethod
    def for_scheme(cls, scheme: str, classifier_kind: str = "generative", **overrides: Any) -> 'SchemeConfig':
        """Default configuration of a scheme

        Args:
            scheme: Scheme identifier
            classifier_kind: "generative" (LDA-like) or "discriminative"
                (SVM-like); selects the CBR/AW rejection threshold
            **overrides: Field values replacing the defaults

        Returns:
            SchemeConfig with defaults for that scheme
        """
        if classifier_kind not in REJECTION_THRESHOLDS:
            raise ArgumentError(f"unknown classifier kind '{classifier_kind}'")
        threshold = REJECTION_THRESHOLDS[classifier_kind]
        base = dict(scheme=scheme, m=DEFAULT_HISTORY.get(scheme, 8), th_rej=threshold, th_aw=threshold)
        base.update(overrides)
        return cls(**base)

    @classmethod
    def from_dict(cls, scheme: str, data: Mapping[str, Any], classifier_kind: str = "generative") -> 'SchemeConfig':
        """Build a configuration from string or typed key/value pairs

        Unknown keys raise UsageError so typos in config files surface.
        """
        known = {f.name: f for f in fields(cls)}
        overrides: Dict[str, Any] = {}
        for key, value in data.items():
            if key not in known or key == "scheme":
                raise UsageError(f"unknown key '{key}' for scheme '{scheme}'")
            overrides[key] = _coerce(key, value)
        return cls.for_scheme(scheme, classifier_kind, **overrides)

    def with_overrides(self, **overrides: Any) -> 'SchemeConfig':
        return replace(self, **overrides)

    def resolved_scale_factors(self, n_classes: int, nm_class: int) -> Tuple[float, ...]:
        """Per-class CS factors, defaulting to NM emphasis

        Raises:
            ArgumentError: If explicit factors do not match the class count
        """
        if self.scale_factors is None:
            return tuple(NM_SCALE if k == nm_class else ACTIVE_SCALE for k in range(1, n_classes + 1))
        if len(self.scale_factors) != n_classes:
            raise ArgumentError(
                f"expected {n_classes} scale factors, got {len(self.scale_factors)}"
            )
        return tuple(float(s) for s in self.scale_factors)

    def frame_lengths(self) -> Tuple[float, ...]:
        """Candidate adaptive-window frame lengths in ms, shortest first"""
        lengths = []
        fl = self.fl_min_ms
        while fl <= self.fl_max_ms + 1e-9:
            lengths.append(round(fl, 6))
            fl += self.fl_step_ms
        return tuple(lengths)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


_INT_KEYS = {"m", "m_ol"}
_BOOL_KEYS = {"renormalize"}
_STR_KEYS = {"warmup"}


def _coerce(key: str, value: Any) -> Any:
    """Convert a config-file string to the field's type"""
    if not isinstance(value, str):
        return value
    text = value.strip()
    try:
        if key in _INT_KEYS:
            return int(text)
        if key in _BOOL_KEYS:
            lowered = text.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if key in _STR_KEYS:
            return text
        if key == "scale_factors":
            return tuple(float(part) for part in text.replace(";", ",").split(",") if part.strip())
        if key == "th_mav" and text.lower() in ("", "none"):
            return None
        return float(text)
    except ValueError:
        raise ArgumentError(f"invalid value '{value}' for '{key}'") from None
