"""Settings, reference files and the coefficient table cache."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml
from mpmath import mp

from .coeffs import build_freud_table, table_from_a_sq
from .exceptions import ConfigurationError, ReferenceParseError
from .models import DEFAULT_TOLERANCES, FreudTable, LogLevel, MethodTag, OutputFormat, RunConfig

logger = logging.getLogger(__name__)

CACHE_HEADER = "# freudsobolev coefficient cache"
CACHE_VERSION = 2
CACHE_COLUMNS = ("n", "a_sq", "norm_sq", "gamma")
CACHE_AGREEMENT = 1e-12

_ENUM_FIELDS = {"output_format": OutputFormat, "log_level": LogLevel}


def load_config(path: Optional[str] = None, overrides: Optional[dict[str, Any]] = None) -> RunConfig:
    """
    Build a RunConfig from an optional YAML file and explicit overrides.

    Overrides win over file values; a 'tolerances' mapping is merged key by
    key into the defaults.
    """
    values: dict[str, Any] = {}
    if path:
        values.update(_load_yaml(Path(path)))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})

    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(values.pop("tolerances", None) or {})

    known = set(RunConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise ConfigurationError(f"Unknown settings: {sorted(unknown)}", {"keys": sorted(unknown)})

    for key, enum in _ENUM_FIELDS.items():
        if key in values and not isinstance(values[key], enum):
            try:
                values[key] = enum(str(values[key]).lower() if enum is OutputFormat else str(values[key]).upper())
            except ValueError:
                raise ConfigurationError(f"Invalid {key} '{values[key]}'", {key: values[key]})

    config = RunConfig(tolerances=tolerances, **values)
    config.validate()
    return config


def _load_yaml(path: Path) -> dict:
    """Load a settings mapping from YAML (JSON is valid YAML too)."""
    if not path.exists():
        raise ConfigurationError(f"Settings file not found: {path}", {"path": str(path)})
    with open(path, "r") as f:
        try:
            content = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Failed to parse settings file: {e}", {"path": str(path)})
    if not isinstance(content, dict):
        raise ConfigurationError("Settings file must hold a mapping", {"path": str(path)})
    return content


def load_reference(path: str) -> dict:
    """Parse a reference table file; the file path is kept under 'source'."""
    target = Path(path)
    if not target.exists():
        raise ReferenceParseError(str(target), "file not found")
    try:
        with open(target, "r") as f:
            reference = json.load(f)
    except json.JSONDecodeError as e:
        raise ReferenceParseError(str(target), f"line {e.lineno} column {e.colno}: {e.msg}")
    if not isinstance(reference, dict):
        raise ReferenceParseError(str(target), "top level must be an object")
    reference["source"] = str(target)
    return reference


def reference_path(config: RunConfig, table_id: int) -> Path:
    return Path(config.reference_dir) / f"table{table_id}.json"


def write_table_cache(table: FreudTable, path: str) -> None:
    """Write a versioned plain-text cache with columns n, a_sq, norm_sq, gamma at full precision."""
    digits = table.precision_digits
    with mp.workdps(digits):
        if table.a_sq_hp:
            # norms follow the stored decimals so a reread table writes the same file
            a_sq = [mp.mpf(mp.nstr(mp.mpf(v), digits)) for v in table.a_sq_hp]
            norms = [mp.gamma(mp.mpf(1) / 4) / 2]
            for value in a_sq[1:]:
                norms.append(norms[-1] * value)
        else:
            a_sq = [mp.mpf(float(v)) for v in table.a_sq]
            norms = [mp.mpf(float(v)) for v in table.norm_sq]
        lines = [
            CACHE_HEADER,
            f"version {CACHE_VERSION}",
            f"n_max {table.n_max}",
            f"precision_digits {digits}",
            f"method {table.method_tag.value}",
            "columns " + " ".join(CACHE_COLUMNS),
        ]
        lines.extend(
            f"{n} {mp.nstr(a, digits)} {mp.nstr(norm, digits)} {mp.nstr(1 / mp.sqrt(norm), digits)}"
            for n, (a, norm) in enumerate(zip(a_sq, norms))
        )
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text("\n".join(lines) + "\n")
    logger.info("Wrote coefficient cache %s (n_max=%d)", target, table.n_max)


def read_table_cache(path: str) -> FreudTable:
    """Read a cache written by write_table_cache; norm_sq and gamma must agree with a_sq."""
    target = Path(path)
    lines = target.read_text().splitlines()
    if not lines or lines[0] != CACHE_HEADER:
        raise ConfigurationError("Not a coefficient cache file", {"path": str(target)})
    header: dict[str, str] = {}
    body = []
    for line in lines[1:]:
        key, _, value = line.partition(" ")
        if key.isdigit():
            fields = value.split()
            if len(fields) != len(CACHE_COLUMNS) - 1:
                raise ConfigurationError("Cache row has the wrong number of columns", {"row": key})
            body.append((int(key), fields))
        else:
            header[key] = value
    if int(header.get("version", -1)) != CACHE_VERSION:
        raise ConfigurationError("Unsupported cache version", {"version": header.get("version")})
    if header.get("columns", "").split() != list(CACHE_COLUMNS):
        raise ConfigurationError("Unexpected cache columns", {"columns": header.get("columns")})

    digits = int(header["precision_digits"])
    body.sort(key=lambda row: row[0])
    with mp.workdps(digits):
        a_sq = [mp.mpf(fields[0]) for _, fields in body]
        mu0 = mp.gamma(mp.mpf(1) / 4) / 2
        table = table_from_a_sq(a_sq, mu0, digits, MethodTag(header["method"]))
    if table.n_max != int(header["n_max"]):
        raise ConfigurationError("Cache is truncated", {"n_max": header["n_max"], "rows": table.n_max})

    stored_norm = np.array([float(fields[1]) for _, fields in body])
    stored_gamma = np.array([float(fields[2]) for _, fields in body])
    if not (np.allclose(stored_norm, table.norm_sq, rtol=CACHE_AGREEMENT, atol=0.0)
            and np.allclose(stored_gamma, table.gamma, rtol=CACHE_AGREEMENT, atol=0.0)):
        raise ConfigurationError("Cache norm_sq or gamma disagrees with a_sq", {"path": str(target)})
    return table


class TableProvider:
    """
    Supplies the FreudTable for a RunConfig, from the cache when it is large
    and precise enough, otherwise by solving and refreshing the cache.

    Usage:
        provider = TableProvider(config)
        ft = provider.table
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self._table: Optional[FreudTable] = None

    @property
    def table(self) -> FreudTable:
        """Load or build and cache the table."""
        if self._table is None:
            self._table = self._load()
        return self._table

    def _load(self) -> FreudTable:
        cache = self.config.cache_path
        if cache and Path(cache).exists():
            cached = read_table_cache(cache)
            if cached.n_max >= self.config.n_max and cached.precision_digits >= self.config.precision_digits:
                logger.info("Using coefficient cache %s", cache)
                return cached
            logger.info("Cache %s too small, rebuilding", cache)
        table = build_freud_table(
            self.config.n_max,
            self.config.precision_digits,
            self.config.newton_tolerance,
            self.config.newton_max_iterations,
            self.config.newton_buffer,
        )
        if cache:
            write_table_cache(table, cache)
        return table

    @classmethod
    def for_config(cls, config: RunConfig) -> FreudTable:
        """Convenience class method returning the table in one call."""
        return cls(config).table
