"""Run configuration: a JSON document validated into :class:`RunConfig`."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PositiveFloat,
    PrivateAttr,
    ValidationError,
    model_validator,
)

from .potentials import (
    ExpGrating,
    PiecewiseConstant,
    Potential,
    PTDimer,
    Segment,
    Slab,
    load_sampled_profile,
)
from .spectral import Box


class ConfigError(ValueError):
    """Invalid run configuration; the message lists every offending location."""


def _to_complex(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError("complex values are written as a number or [re, im]")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, bool) or not isinstance(v, (int, float, complex)):
        raise ValueError("expected a number or [re, im]")
    return complex(v)


Complex = Annotated[complex, BeforeValidator(_to_complex)]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SegmentSpec(_Strict):
    x0: float
    x1: float
    u: Complex

    @model_validator(mode="after")
    def _width(self):
        if not self.x1 > self.x0:
            raise ValueError("x1 must exceed x0")
        return self


class SlabFamily(_Strict):
    name: Literal["slab"]
    u: Complex
    d: PositiveFloat
    x0: float = 0.0


class PTDimerFamily(_Strict):
    name: Literal["pt_dimer"]
    a: float
    b: float
    d: PositiveFloat


class ExpGratingFamily(_Strict):
    name: Literal["exp_grating"]
    alpha: Complex
    beta: PositiveFloat
    length: PositiveFloat


Family = Annotated[Union[SlabFamily, PTDimerFamily, ExpGratingFamily], Field(discriminator="name")]


class PotentialConfig(_Strict):
    segments: Optional[list[SegmentSpec]] = None
    family: Optional[Family] = None
    sample_file: Optional[str] = None

    @model_validator(mode="after")
    def _one_source(self):
        given = [k for k in ("segments", "family", "sample_file") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError(
                "exactly one potential source (segments | family | sample_file) is required, "
                f"got {given or 'none'}"
            )
        return self


class KRange(_Strict):
    k_min: PositiveFloat
    k_max: PositiveFloat
    n: int = Field(ge=2)

    @model_validator(mode="after")
    def _ordered(self):
        if not self.k_max > self.k_min:
            raise ValueError("k_max must exceed k_min")
        return self


class Tolerances(_Strict):
    integration: PositiveFloat = 1e-10
    tol_unit: PositiveFloat = 1e-6
    tol_nonzero: PositiveFloat = 1e-3
    root_residual: PositiveFloat = 1e-8


class OutputConfig(_Strict):
    format: Optional[Literal["csv", "json"]] = None
    path: Optional[str] = None


class SearchBox(_Strict):
    re_min: float
    re_max: float
    im_min: PositiveFloat
    im_max: PositiveFloat

    @model_validator(mode="after")
    def _extent(self):
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            raise ValueError("search box must have positive extent")
        return self


class RunConfig(_Strict):
    potential: PotentialConfig
    k_range: Optional[KRange] = None
    k: Optional[PositiveFloat] = None
    search_box: Optional[SearchBox] = None
    tolerances: Tolerances = Tolerances()
    output: OutputConfig = OutputConfig()
    workers: int = Field(default=1, ge=1)
    _base_dir: Optional[str] = PrivateAttr(default=None)

    def build_potential(self) -> Potential:
        src = self.potential
        if src.segments is not None:
            return PiecewiseConstant(tuple(Segment(s.x0, s.x1, s.u) for s in src.segments))
        if src.family is not None:
            f = src.family
            if isinstance(f, SlabFamily):
                return Slab(f.u, f.d, f.x0)
            if isinstance(f, PTDimerFamily):
                return PTDimer(f.a, f.b, f.d)
            return ExpGrating(f.alpha, f.beta, f.length)
        path = Path(src.sample_file)
        if not path.is_absolute() and self._base_dir is not None:
            path = Path(self._base_dir) / path
        try:
            return load_sampled_profile(path)
        except OSError as exc:
            raise ConfigError(f"potential.sample_file: cannot read {path}: {exc.strerror}") from None

    def build_box(self) -> Box:
        b = self.search_box
        return Box(b.re_min, b.re_max, b.im_min, b.im_max)

    def wavenumbers(self):
        """Single ``k`` if given, else the evenly spaced ``k_range`` grid."""
        if self.k is not None:
            return [float(self.k)]
        r = self.k_range
        return [float(x) for x in np.linspace(r.k_min, r.k_max, r.n)]


def _format_validation(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(part) for part in err["loc"]) or "<root>"
        msg = err["msg"]
        if err["type"] == "extra_forbidden":
            msg = "unknown key"
        lines.append(f"{loc}: {msg}")
    return "\n".join(lines)


def parse_config(text: str, base_dir=None) -> RunConfig:
    """Validate a JSON configuration document.

    Syntax errors report line and column; schema errors report the dotted
    field path of every offending entry.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError("<root>: configuration must be a JSON object")
    try:
        cfg = RunConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(_format_validation(exc)) from None
    if base_dir is not None:
        cfg._base_dir = str(base_dir)
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    return parse_config(text, base_dir=path.parent)
