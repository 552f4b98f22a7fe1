"""Patient metadata ingestion, min-max normalisation and distribution stats."""
from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .errors import DataError, LookupMissError, RowError, SchemaError


class Gender(str, Enum):
    FEMALE = "female"
    MALE = "male"


class Category(str, Enum):
    DOB = "dob"
    GENDER = "gender"
    HDD = "hdd"


_GENDER_ALIASES = {"female": Gender.FEMALE, "f": Gender.FEMALE, "male": Gender.MALE, "m": Gender.MALE}

REQUIRED_FIELDS = ("image_id", "patient_id", "dob", "gender")
OPTIONAL_FIELDS = ("postcode", "hdd")
DEFAULT_SCHEMA = {name: name for name in REQUIRED_FIELDS + OPTIONAL_FIELDS}

MIN_YEAR, MAX_YEAR = 1850, 2100
_EPOCH = dt.date(1970, 1, 1)


@dataclass(frozen=True)
class MetadataRecord:
    image_id: str
    patient_id: str
    dob: dt.date
    gender: Gender
    postcode: str | None = None
    hdd: int | None = None


@dataclass(frozen=True)
class NormalizationStats:
    min: float
    max: float
    count: int
    skewness: float
    excess_kurtosis: float

    def to_dict(self) -> dict:
        return {
            "min": self.min,
            "max": self.max,
            "count": self.count,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
        }


@dataclass(frozen=True)
class NormalizedValue:
    value: float
    category: Category


@dataclass(frozen=True)
class HistogramReport:
    bin_edges: list[float]
    counts: list[int]
    stats: NormalizationStats

    def to_dict(self) -> dict:
        return {"bin_edges": self.bin_edges, "counts": self.counts, "stats": self.stats.to_dict()}


def parse_gender(text: str) -> Gender:
    try:
        return _GENDER_ALIASES[text.strip().lower()]
    except KeyError:
        raise ValueError(f"unrecognised gender {text!r}") from None


def _parse_decile(text) -> int:
    try:
        value = int(str(text).strip())
    except ValueError:
        raise ValueError(f"decile {text!r} is not an integer") from None
    if not 1 <= value <= 10:
        raise ValueError(f"decile out of range [1,10]: {value}")
    return value


def parse_metadata_csv(
    source: IO[bytes] | IO[str] | bytes | str,
    schema: Mapping[str, str] | None = None,
    today: dt.date | None = None,
) -> list[MetadataRecord]:
    """Read metadata rows from a UTF-8 CSV with a header row.

    ``schema`` maps logical field names (``image_id``, ``patient_id``, ``dob``,
    ``gender`` and optionally ``postcode``/``hdd``) to column names. Any bad
    row raises :class:`RowError` with its 1-based data row number; the header
    is row 0.
    """
    schema = dict(DEFAULT_SCHEMA if schema is None else schema)
    today = today or dt.date.today()
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    text = text.lstrip("﻿")

    reader = csv.DictReader(io.StringIO(text, newline=""))
    header = reader.fieldnames or []
    missing = [f for f in REQUIRED_FIELDS if schema.get(f) not in header]
    if missing:
        cols = ", ".join(f"{f} (column {schema.get(f)!r})" for f in missing)
        raise SchemaError(f"missing required column(s): {cols}")
    optional = {f: schema[f] for f in OPTIONAL_FIELDS if schema.get(f) in header}

    records = []
    seen: set[str] = set()
    for rownum, row in enumerate(reader, start=1):
        try:
            image_id = (row[schema["image_id"]] or "").strip()
            if not image_id:
                raise ValueError("empty image_id")
            if image_id in seen:
                raise ValueError(f"duplicate image_id {image_id!r}")
            try:
                dob = dt.date.fromisoformat((row[schema["dob"]] or "").strip())
            except ValueError:
                raise ValueError(f"malformed date {row[schema['dob']]!r}, expected YYYY-MM-DD") from None
            if dob > today:
                raise ValueError(f"date of birth {dob} is after {today}")
            gender = parse_gender(row[schema["gender"]] or "")
            postcode = None
            if "postcode" in optional:
                postcode = (row[optional["postcode"]] or "").strip() or None
            hdd = None
            if "hdd" in optional and (row[optional["hdd"]] or "").strip():
                hdd = _parse_decile(row[optional["hdd"]])
        except (ValueError, TypeError) as exc:
            raise RowError(rownum, str(exc)) from None
        seen.add(image_id)
        records.append(
            MetadataRecord(
                image_id=image_id,
                patient_id=(row[schema["patient_id"]] or "").strip(),
                dob=dob,
                gender=gender,
                postcode=postcode,
                hdd=hdd,
            )
        )
    return records


def dob_to_scalar(dob: dt.date) -> float:
    """Seconds since the Unix epoch at UTC midnight of ``dob``."""
    if not MIN_YEAR <= dob.year <= MAX_YEAR:
        raise DataError(f"date {dob} outside supported range [{MIN_YEAR}, {MAX_YEAR}]")
    return float((dob - _EPOCH).days * 86400)


def _check_values(values: Iterable[float]) -> np.ndarray:
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        raise DataError("empty input")
    if not np.all(np.isfinite(arr)):
        raise DataError("non-finite value in input")
    return arr


def minmax_fit(values: Sequence[float]) -> NormalizationStats:
    arr = _check_values(values)
    lo, hi = float(arr.min()), float(arr.max())
    # population moments; zero spread reports 0 for both shape statistics
    centred = arr - arr.mean()
    sd = math.sqrt(float(np.mean(centred**2)))
    if lo == hi or sd == 0.0:
        skew = kurt = 0.0
    else:
        z = centred / sd
        skew = float(np.mean(z**3))
        kurt = float(np.mean(z**4)) - 3.0
    return NormalizationStats(min=lo, max=hi, count=int(arr.size), skewness=skew, excess_kurtosis=kurt)


def minmax_apply(stats: NormalizationStats, x: float, category: Category = Category.DOB) -> NormalizedValue:
    """Min-max scale ``x`` into [0, 1], clamping values outside the fitted range."""
    if not math.isfinite(x):
        raise DataError(f"non-finite value {x!r}")
    if stats.max == stats.min:
        return NormalizedValue(0.5, category)
    value = (x - stats.min) / (stats.max - stats.min)
    return NormalizedValue(min(1.0, max(0.0, value)), category)


def encode_gender(g: Gender) -> NormalizedValue:
    return NormalizedValue(1.0 if Gender(g) is Gender.MALE else 0.0, Category.GENDER)


def normalize_postcode(postcode: str) -> str:
    return "".join(postcode.split()).upper()


def load_postcode_table(source: IO[bytes] | IO[str] | bytes | str) -> dict[str, int]:
    """Load a ``postcode,decile`` CSV into a lookup dict keyed by normalised postcode."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.DictReader(io.StringIO(text.lstrip("﻿"), newline=""))
    if not {"postcode", "decile"} <= set(reader.fieldnames or []):
        raise SchemaError("postcode table needs columns 'postcode,decile'")
    table = {}
    for rownum, row in enumerate(reader, start=1):
        try:
            table[normalize_postcode(row["postcode"] or "")] = _parse_decile(row["decile"])
        except ValueError as exc:
            raise RowError(rownum, f"postcode table: {exc}") from None
    return table


def hdd_lookup(postcode: str, table: Mapping[str, int]) -> int:
    key = normalize_postcode(postcode)
    try:
        return table[key]
    except KeyError:
        raise LookupMissError(f"postcode {key!r} not in decile table") from None


def distribution_report(values: Sequence[float], bin_count: int) -> HistogramReport:
    """Uniform-width histogram over [min, max] plus moment statistics.

    A constant input uses edges spanning [v, v + 1] with every value in the
    first bin.
    """
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    arr = _check_values(values)
    stats = minmax_fit(arr)
    if stats.min == stats.max:
        edges = np.linspace(stats.min, stats.min + 1.0, bin_count + 1)
        counts = np.zeros(bin_count, dtype=np.int64)
        counts[0] = arr.size
    else:
        counts, edges = np.histogram(arr, bins=bin_count, range=(stats.min, stats.max))
    return HistogramReport([float(e) for e in edges], [int(c) for c in counts], stats)
