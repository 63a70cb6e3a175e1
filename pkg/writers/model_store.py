# File: dsqi_bench/writers/model_store.py
"""JSON persistence of trained models"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

from classifiers.bank import ClassifierBank
from classifiers.gaussian import GaussianModel
from classifiers.one_class import OneClassModel, OneClassSet
from core.exceptions import ConfigurationError, ParseError

logger = logging.getLogger(__name__)

GAUSSIAN_FILE = "gaussian.json"
OCC_FILE = "occ.json"
BANK_FILE = "bank.json"
ONSET_FILE = "onset.json"


@dataclass
class ModelSet:
    """Everything training produces for one class catalog"""
    gaussian: Optional[GaussianModel] = None
    occ: OneClassSet = field(default_factory=dict)
    bank: Optional[ClassifierBank] = None
    th_mav: Optional[float] = None


def _dump(path: Path, data: Dict[str, Any]) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            json.dump(data, handle, sort_keys=True, indent=2)
            handle.write("\n")
    except OSError as e:
        raise ConfigurationError(f"cannot write {path}: {e.strerror}") from e


def _load(path: Path) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as e:
        raise ConfigurationError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path=str(path), line=e.lineno) from e


def save_models(directory: str, models: ModelSet) -> None:
    """Write each trained artifact to its own JSON file (sorted keys)"""
    root = Path(directory)
    if models.gaussian is not None:
        _dump(root / GAUSSIAN_FILE, models.gaussian.to_dict())
    if models.occ:
        _dump(root / OCC_FILE, {"models": [models.occ[k].to_dict() for k in sorted(models.occ)]})
    if models.bank is not None:
        _dump(root / BANK_FILE, models.bank.to_dict())
    if models.th_mav is not None:
        _dump(root / ONSET_FILE, {"th_mav": models.th_mav})
    logger.info("Saved models to %s", root)


def load_models(directory: str) -> ModelSet:
    """Load whichever model files exist in a directory

    Raises:
        ConfigurationError: If the directory does not exist
        ParseError: If a file is not valid JSON
    """
    root = Path(directory)
    if not root.is_dir():
        raise ConfigurationError(f"model directory not found: {root}")
    models = ModelSet()
    try:
        if (root / GAUSSIAN_FILE).is_file():
            models.gaussian = GaussianModel.from_dict(_load(root / GAUSSIAN_FILE))
        if (root / OCC_FILE).is_file():
            entries = [OneClassModel.from_dict(d) for d in _load(root / OCC_FILE)["models"]]
            models.occ = {m.class_id: m for m in entries}
        if (root / BANK_FILE).is_file():
            models.bank = ClassifierBank.from_dict(_load(root / BANK_FILE))
        if (root / ONSET_FILE).is_file():
            models.th_mav = float(_load(root / ONSET_FILE)["th_mav"])
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"malformed model file: {e}", path=str(root)) from e
    return models
