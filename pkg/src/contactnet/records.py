"""Vertex and edge records with their categorical covariates."""

from __future__ import annotations

import datetime as dt
import enum
from dataclasses import dataclass


class Orientation(enum.Enum):
    WOMAN = "F"
    HETEROSEXUAL_MAN = "HM"
    MSM = "MSM"
    UNKNOWN = "U"


class DetectionMode(enum.Enum):
    RANDOM = "RANDOM"
    CONTACT_TRACING = "CT"
    CAPTATION = "CAPT"
    UNKNOWN = "U"


class NamedBy(enum.Enum):
    SRC = "SRC"
    DST = "DST"
    BOTH = "BOTH"
    UNKNOWN = "U"


@dataclass(frozen=True)
class VertexRecord:
    id: str
    orientation: Orientation = Orientation.UNKNOWN
    detection_mode: DetectionMode = DetectionMode.UNKNOWN
    detection_date: dt.date | None = None
    age_at_detection: int | None = None
    region: str | None = None
    declared_partners: int | None = None


@dataclass(frozen=True)
class EdgeRecord:
    src: str
    dst: str
    named_by: NamedBy = NamedBy.UNKNOWN


# covariate name -> attribute on VertexRecord
COVARIATES = (
    "orientation",
    "detection_mode",
    "detection_date",
    "age_at_detection",
    "region",
    "declared_partners",
)
