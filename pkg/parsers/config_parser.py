# File: dsqi_bench/parsers/config_parser.py
"""INI-style configuration with command-line overrides"""

import configparser
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from core.exceptions import ConfigurationError, UsageError
from models.scheme_config import SCHEME_NAMES, SchemeConfig
from synthesis.config import GeneratorConfig

logger = logging.getLogger(__name__)

GENERAL_SECTIONS = ("synth", "train", "run", "eval")

#: Keys accepted in the general sections, with their defaults.
SECTION_DEFAULTS: Dict[str, Dict[str, str]] = {
    "train": {"regularization": "1e-6", "occ_quantile": "0.99"},
    "run": {"schemes": ",".join(SCHEME_NAMES), "classifier_kind": "generative", "nm_class": "1"},
    "eval": {"increment_ms": "", "plot": "false"},
}


def parse_override(text: str) -> Tuple[str, str, str]:
    """Split ``section.key=value``

    Raises:
        UsageError: If the text does not have that shape
    """
    head, sep, value = text.partition("=")
    section, dot, key = head.strip().partition(".")
    if not sep or not dot or not section or not key:
        raise UsageError(f"override '{text}' must look like section.key=value")
    return section.strip().lower(), key.strip().lower(), value.strip()


class ConfigLoader:
    """Loads the flat sectioned configuration file and applies overrides

    Sections: [synth], [train], [run], [eval] and one per scheme
    ([mv], [plda], [cbr], ...). Every key may be overridden on the command
    line with ``--set section.key=value``.
    """

    def __init__(self, path: Optional[str] = None, overrides: Iterable[str] = ()):
        """Initialize loader

        Args:
            path: Optional configuration file
            overrides: ``section.key=value`` strings applied after the file

        Raises:
            ConfigurationError: If the file is missing or malformed
            UsageError: On unknown sections or malformed overrides
        """
        self.path = path
        self.parser = configparser.ConfigParser(interpolation=None)
        if path is not None:
            if not Path(path).is_file():
                raise ConfigurationError(f"config file not found: {path}")
            try:
                self.parser.read(path, encoding="utf-8")
            except configparser.Error as e:
                raise ConfigurationError(f"cannot parse config file {path}: {e}") from e
            logger.info("Loaded configuration from %s", path)
        for text in overrides:
            section, key, value = parse_override(text)
            if not self.parser.has_section(section):
                self.parser.add_section(section)
            self.parser.set(section, key, value)
        self._check_sections()

    def _check_sections(self) -> None:
        allowed = set(GENERAL_SECTIONS) | set(SCHEME_NAMES)
        for section in self.parser.sections():
            if section not in allowed:
                raise UsageError(f"unknown config section [{section}]")
            if section in SECTION_DEFAULTS:
                for key in self.parser.options(section):
                    if key not in SECTION_DEFAULTS[section]:
                        raise UsageError(f"unknown key '{key}' in section [{section}]")

    def section(self, name: str) -> Dict[str, str]:
        """Key/value pairs of a section, with defaults for general sections"""
        values = dict(SECTION_DEFAULTS.get(name, {}))
        if self.parser.has_section(name):
            values.update(self.parser.items(name))
        return values

    def generator_config(self, seed: Optional[int] = None, n_classes: Optional[int] = None) -> GeneratorConfig:
        """GeneratorConfig from [synth], with the --seed/--classes shortcuts applied"""
        values: Dict[str, object] = dict(self.section("synth"))
        if seed is not None:
            values["seed"] = seed
        if n_classes is not None:
            values["n_classes"] = n_classes
        return GeneratorConfig.from_dict(values)

    def scheme_config(self, scheme: str, classifier_kind: Optional[str] = None) -> SchemeConfig:
        """SchemeConfig of one scheme with its section applied over the defaults"""
        if scheme not in SCHEME_NAMES:
            raise UsageError(f"unknown scheme '{scheme}', expected one of {', '.join(SCHEME_NAMES)}")
        kind = classifier_kind or self.section("run")["classifier_kind"]
        return SchemeConfig.from_dict(scheme, self.section(scheme), kind)

    def schemes(self, requested: Optional[str] = None) -> List[str]:
        """Scheme list from an explicit comma list or [run] schemes

        Raises:
            UsageError: On an unknown scheme name
        """
        text = requested if requested is not None else self.section("run")["schemes"]
        names = [part.strip().lower() for part in text.split(",") if part.strip()]
        if not names:
            raise UsageError("no schemes requested")
        for name in names:
            if name not in SCHEME_NAMES:
                raise UsageError(f"unknown scheme '{name}', expected one of {', '.join(SCHEME_NAMES)}")
        return names

    def get_float(self, section: str, key: str) -> Optional[float]:
        text = self.section(section).get(key, "")
        if text == "":
            return None
        try:
            return float(text)
        except ValueError:
            raise UsageError(f"[{section}] {key} must be a number, got '{text}'") from None

    def get_bool(self, section: str, key: str) -> bool:
        text = self.section(section).get(key, "false").strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off", ""):
            return False
        raise UsageError(f"[{section}] {key} must be a boolean, got '{text}'")
