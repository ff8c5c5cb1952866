"""Panel CSV files, synthetic panels and JSON report documents."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Any

import numpy as np

from .errors import (
    HeaderMismatch,
    NestFnError,
    NonPositiveValue,
    RowParseError,
    UnsatisfiableRegion,
)
from .model import InputPoint, Parameters, eval_v
from .rng import make_rng

PANEL_HEADER = "industry_code,year,K,L,V"
SCHEMA_VERSION = "1.0"
REPORT_KINDS = ("fit", "diagnostics", "audit", "evaluation")


@dataclass(frozen=True)
class Observation:
    industry_code: str
    year: int
    K: float
    L: float
    V: float

    def __post_init__(self):
        for name in ("K", "L", "V"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not 1900 <= self.year <= 2200:
            raise ValueError(f"year out of range: {self.year}")


@dataclass
class Panel:
    observations: list[Observation] = field(default_factory=list)
    source_label: str = ""

    def __len__(self):
        return len(self.observations)

    @property
    def K(self) -> np.ndarray:
        return np.array([o.K for o in self.observations], dtype=float)

    @property
    def L(self) -> np.ndarray:
        return np.array([o.L for o in self.observations], dtype=float)

    @property
    def V(self) -> np.ndarray:
        return np.array([o.V for o in self.observations], dtype=float)

    def industry_codes(self) -> list[str]:
        return sorted({o.industry_code for o in self.observations})

    def filter_industry(self, code: str) -> "Panel":
        rows = [o for o in self.observations if o.industry_code == code]
        return Panel(rows, f"{self.source_label}[{code}]")

    def split(self, n_first: int) -> tuple["Panel", "Panel"]:
        obs = self.observations
        return Panel(obs[:n_first], self.source_label), Panel(obs[n_first:], self.source_label)


# -- CSV -------------------------------------------------------------------


def parse_panel_csv(data: bytes | str, source_label: str = "") -> Panel:
    """Parse ``industry_code,year,K,L,V`` rows. Line numbers in errors are 1-based."""
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    if text.startswith("\ufeff"):
        text = text[1:]
    lines = text.split("\n")
    header = lines[0].rstrip("\r") if lines else ""
    if header != PANEL_HEADER:
        raise HeaderMismatch(f"expected header {PANEL_HEADER!r}, got {header!r}")
    rows = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != 5:
            raise RowParseError(lineno, None, f"line {lineno}: expected 5 columns, got {len(cells)}")
        code = cells[0].strip()
        try:
            year = int(cells[1])
        except ValueError:
            raise RowParseError(lineno, "year") from None
        values = {}
        for name, cell in zip(("K", "L", "V"), cells[2:]):
            try:
                values[name] = float(cell)
            except ValueError:
                raise RowParseError(lineno, name) from None
            if not (math.isfinite(values[name]) and values[name] > 0):
                raise NonPositiveValue(lineno, name)
        if not 1900 <= year <= 2200:
            raise RowParseError(lineno, "year", f"line {lineno}: year {year} outside [1900, 2200]")
        rows.append(Observation(code, year, values["K"], values["L"], values["V"]))
    return Panel(rows, source_label)


def write_panel_csv(panel: Panel) -> bytes:
    # repr gives the shortest string that round-trips, at most 17 significant digits
    out = [PANEL_HEADER]
    for o in panel.observations:
        out.append(f"{o.industry_code},{o.year},{o.K!r},{o.L!r},{o.V!r}")
    return ("\n".join(out) + "\n").encode("utf-8")


# -- synthetic panels ------------------------------------------------------


@dataclass(frozen=True)
class SynthSpec:
    true_params: Parameters
    n: int
    k_range: tuple[float, float] = (0.5, 10.0)
    l_range: tuple[float, float] = (0.5, 10.0)
    noise_sd: float = 0.0
    seed: int = 0
    industry_code: str = "SYN"
    first_year: int = 2010

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be non-negative")
        for rng in (self.k_range, self.l_range):
            if not 0 < rng[0] <= rng[1]:
                raise ValueError(f"range must be positive, got {rng}")


def synth_panel(spec: SynthSpec) -> Panel:
    """Draw a panel from known parameters.

    Per row: two uniforms map log-uniformly to (K, L); points where V is
    undefined are redrawn; then one standard normal z scales V by
    exp(noise_sd * z - noise_sd^2 / 2), which has mean one. z is drawn even when
    noise_sd is 0 so the stream layout does not depend on the noise level.
    """
    rng = make_rng(spec.seed)
    lk = np.log(spec.k_range)
    ll = np.log(spec.l_range)
    s = spec.noise_sd
    rows = []
    failures = 0
    max_failures = 100 * spec.n
    while len(rows) < spec.n:
        u = rng.random(2)
        K = float(np.exp(lk[0] + u[0] * (lk[1] - lk[0])))
        L = float(np.exp(ll[0] + u[1] * (ll[1] - ll[0])))
        try:
            v = eval_v(spec.true_params, InputPoint(K, L)).v
        except NestFnError:
            failures += 1
            if failures >= max_failures:
                raise UnsatisfiableRegion(
                    f"{failures} draws failed to produce a defined output; check the region"
                ) from None
            continue
        z = float(rng.standard_normal())
        V = v * math.exp(s * z - 0.5 * s * s)
        i = len(rows)
        rows.append(Observation(spec.industry_code, spec.first_year + i % 8, K, L, V))
    return Panel(rows, f"synthetic(seed={spec.seed})")


# -- JSON reports ----------------------------------------------------------


@dataclass
class ReportDocument:
    kind: str
    payload: dict
    schema_version: str = SCHEMA_VERSION

    def __post_init__(self):
        if self.kind not in REPORT_KINDS:
            raise ValueError(f"unknown report kind {self.kind!r}")


def _nonfinite_tag(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


def _encode(obj: Any, path: str, flags: dict, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, Decimal):
        if not obj.is_finite():
            flags[path] = "nan" if obj.is_nan() else ("inf" if obj > 0 else "-inf")
            return "null"
        return str(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            flags[path] = _nonfinite_tag(x)
            return "null"
        return repr(x)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(k))}: {_encode(v, f'{path}.{k}' if path else str(k), flags, indent, level + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{_encode(v, f'{path}[{i}]', flags, indent, level + 1)}" for i, v in enumerate(obj)]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_report_json(doc: ReportDocument, indent: int = 2) -> bytes:
    """Serialize with insertion-ordered keys.

    Floats use the shortest round-trip form; ``Decimal`` values are written
    verbatim, which keeps fixed-precision figures such as ``0.30`` intact.
    Non-finite numbers become ``null`` and are listed in a top-level
    ``nonfinite`` map from payload path to "nan", "inf" or "-inf".
    """
    flags: dict[str, str] = {}
    body = _encode(doc.payload, "", flags, indent, 1)
    top = [
        f'{" " * indent}"kind": {json.dumps(doc.kind)}',
        f'{" " * indent}"schema_version": {json.dumps(doc.schema_version)}',
        f'{" " * indent}"payload": {body}',
    ]
    if flags:
        top.append(f'{" " * indent}"nonfinite": {_encode(flags, "", {}, indent, 1)}')
    return ("{\n" + ",\n".join(top) + "\n}\n").encode("utf-8")


def _restore(obj, path, flags):
    if isinstance(obj, dict):
        return {k: _restore(v, f"{path}.{k}" if path else k, flags) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_restore(v, f"{path}[{i}]", flags) for i, v in enumerate(obj)]
    if obj is None and path in flags:
        return float(flags[path])
    return obj


def read_report_json(data: bytes | str, parse_float=float) -> ReportDocument:
    raw = json.loads(data, parse_float=parse_float)
    payload = _restore(raw["payload"], "", raw.get("nonfinite", {}))
    return ReportDocument(raw["kind"], payload, raw.get("schema_version", SCHEMA_VERSION))


FIT_PAYLOAD_KEYS = (
    "industry_code",
    "r_squared",
    "std_error",
    "substitution_elasticity",
    "delta",
    "sigma",
    "p",
    "q",
    "A",
    "rss",
    "converged",
    "n_obs",
    "n_iterations",
    "best_start_index",
    "seed",
    "schema_version",
)


def convergence_label(converged: bool) -> str:
    return "Achieved" if converged else "Not achieved"


def fit_payload(**values) -> dict:
    """Fit payload in canonical key order; absent entries become null.

    ``converged`` may be given as a bool and is rendered as "Achieved" or
    "Not achieved".
    """
    unknown = set(values) - set(FIT_PAYLOAD_KEYS)
    if unknown:
        raise KeyError(f"unknown fit payload keys: {sorted(unknown)}")
    payload = {key: values.get(key) for key in FIT_PAYLOAD_KEYS}
    if isinstance(payload["converged"], (bool, np.bool_)):
        payload["converged"] = convergence_label(bool(payload["converged"]))
    payload["schema_version"] = values.get("schema_version", SCHEMA_VERSION)
    return payload
