"""
Model persistence: TransitionModel and ActivityModel to and from ModelFile JSON.
"""

import json
import logging
from pathlib import Path
from typing import Tuple, Union

from pydantic import ValidationError

from app.config import settings

from ..models.bayes import ActivityModel
from ..models.markov import TransitionModel
from ..schemas.core import SensorCatalog
from ..schemas.model_file import BayesPayload, MarkovPayload, ModelFile
from ..utils.exceptions import ModelFormatException
from .files import atomic_write_text

logger = logging.getLogger(__name__)

Model = Union[TransitionModel, ActivityModel]


def to_model_file(model: Model, catalog: SensorCatalog) -> ModelFile:
    """Build the persisted document for a trained model."""
    if isinstance(model, TransitionModel):
        if model.n_sensors != catalog.size:
            raise ModelFormatException(
                f"Model has {model.n_sensors} sensors but catalog has {catalog.size} channels"
            )
        initial = model.initial_distribution
        payload = MarkovPayload(
            n_sensors=model.n_sensors,
            transitions=list(model.transitions()),
            row_totals=sorted(model.row_totals.items()),
            initial_distribution=sorted(initial.items()) if initial is not None else None,
        )
    elif isinstance(model, ActivityModel):
        if model.n_channels != catalog.size:
            raise ModelFormatException(
                f"Model has {model.n_channels} channels but catalog has {catalog.size}"
            )
        payload = BayesPayload(
            activities=model.activities,
            priors=model.priors.tolist(),
            theta=model.theta.tolist(),
            alpha=model.smoothing_alpha,
        )
    else:
        raise ModelFormatException(f"Cannot persist model of type {type(model).__name__}")

    return ModelFile(
        format_version=settings.MODEL_FORMAT_VERSION,
        kind=payload.kind,
        catalog=list(catalog.channels),
        payload=payload,
    )


def from_model_file(document: ModelFile) -> Tuple[Model, SensorCatalog]:
    """Rebuild the trained model and its catalog from a validated document."""
    payload = document.payload
    try:
        catalog = SensorCatalog(channels=tuple(document.catalog))
        if isinstance(payload, MarkovPayload):
            if payload.n_sensors != catalog.size:
                raise ModelFormatException("Markov payload width does not match the catalog")
            initial = dict(payload.initial_distribution) if payload.initial_distribution else None
            model: Model = TransitionModel(
                payload.n_sensors, {(s, d): c for s, d, c in payload.transitions}, initial
            )
        else:
            model = ActivityModel(payload.activities, payload.priors, payload.theta, payload.alpha)
            if model.n_channels != catalog.size:
                raise ModelFormatException("Bayes payload width does not match the catalog")
    except ValueError as e:
        raise ModelFormatException(f"Invalid model payload: {e}")
    return model, catalog


def save_model(model: Model, path: Path, catalog: SensorCatalog = SensorCatalog.default()) -> ModelFile:
    """Write a model document atomically."""
    document = to_model_file(model, catalog)
    atomic_write_text(Path(path), json.dumps(document.model_dump(mode="json"), indent=2) + "\n")
    logger.info(f"Saved {document.kind} model to {path}")
    return document


def read_model_file(path: Path) -> ModelFile:
    """
    Load and validate a model document.

    Raises:
        ModelFormatException: If the file is unreadable, malformed or has an
            unsupported format_version
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ModelFormatException(f"Cannot read model file {path}: {e}", {"path": str(path)})

    if not isinstance(raw, dict):
        raise ModelFormatException(f"Model file {path} is not a JSON object", {"path": str(path)})
    version = raw.get("format_version")
    if version != settings.MODEL_FORMAT_VERSION:
        raise ModelFormatException(
            f"Unsupported model format_version {version!r}, expected {settings.MODEL_FORMAT_VERSION}",
            {"path": str(path), "format_version": version},
        )
    try:
        return ModelFile.model_validate(raw)
    except ValidationError as e:
        raise ModelFormatException(f"Invalid model file {path}: {e}", {"path": str(path)})


def load_model(path: Path) -> Model:
    """Load a trained model; use read_model_file + from_model_file to also get the catalog."""
    return from_model_file(read_model_file(path))[0]
