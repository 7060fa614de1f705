"""Qualitative anchor text per (category, band), loaded from a data file."""

from pathlib import Path
from typing import Optional
import json
import logging

from pydantic import ValidationError

from errors import ConfigError, MissingDescriptorError
from models.dataset import OsatsCategory
from models.feedback import Band, DescriptorTable

logger = logging.getLogger(__name__)

DEFAULT_DESCRIPTORS = Path(__file__).with_name("descriptors.json")


def load_descriptors(path: Optional[Path] = None) -> DescriptorTable:
    """Read ``{category: {band: text}}`` JSON into a DescriptorTable."""
    path = Path(path) if path is not None else DEFAULT_DESCRIPTORS
    try:
        raw = json.loads(path.read_text())
        entries = {
            (OsatsCategory(category), Band(band)): text
            for category, bands in raw.items()
            for band, text in bands.items()
        }
        table = DescriptorTable(entries=entries)
    except (OSError, ValueError, AttributeError, ValidationError) as e:
        raise ConfigError(f"invalid descriptor file {path}: {e}")
    if not table.is_complete:
        logger.warning(f"Descriptor file {path} does not cover every category and band")
    return table


def describe(table: DescriptorTable, category: OsatsCategory, band: Band) -> str:
    try:
        return table.entries[(category, band)]
    except KeyError:
        raise MissingDescriptorError(f"no descriptor for {category.value} / {band.value}")
