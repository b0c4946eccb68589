"""Run configuration: TOML sections in, resolved JSON echo out."""

import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional, get_args

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .darcy import ViscositySpec
from .elliptic import NewtonConfig, PcgConfig
from .errors import ConfigParse, HDCHError
from .grid import Grid
from .potential import PotentialSpec
from .stepper import SCENARIOS, StepConfig


@dataclass(frozen=True)
class GridSection:
    nx: int = 64
    ny: int = 64
    lx: float = 4 * math.pi
    ly: float = 4 * math.pi


@dataclass(frozen=True)
class PotentialSection:
    theta: float = 1.0
    theta0: float = 2.0
    mode: str = "log"
    epsilon: Optional[float] = None


@dataclass(frozen=True)
class ViscositySection:
    nu1: float = 1.0
    nu2: float = 2.0


@dataclass(frozen=True)
class ScenarioSection:
    name: str = "spinodal"
    mean: Optional[float] = None
    amplitude: float = 0.0
    seed: int = 0
    prepare_k: Optional[float] = None  # truncation level; None skips the preparation
    radius: Optional[float] = None
    width: float = 1.0


@dataclass(frozen=True)
class TimeSection:
    dt: float = 1e-4
    t_end: float = 0.1
    record_every: int = 1


@dataclass(frozen=True)
class SolverSection:
    pcg_tol: float = 1e-10
    newton_tol: float = 1e-11
    clamp: float = 1.0 - 1e-12
    transport: bool = True


@dataclass(frozen=True)
class OutputSection:
    dir: str = "out"
    snapshots: bool = False


@dataclass(frozen=True)
class RunConfig:
    grid: GridSection = field(default_factory=GridSection)
    potential: PotentialSection = field(default_factory=PotentialSection)
    viscosity: ViscositySection = field(default_factory=ViscositySection)
    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    time: TimeSection = field(default_factory=TimeSection)
    solver: SolverSection = field(default_factory=SolverSection)
    output: OutputSection = field(default_factory=OutputSection)

    # -- derived objects --
    def make_grid(self):
        g = self.grid
        return Grid(g.nx, g.ny, g.lx, g.ly)

    def make_potential(self):
        p = self.potential
        return PotentialSpec(theta=p.theta, theta0=p.theta0, epsilon=p.epsilon, mode=p.mode)

    def make_viscosity(self):
        return ViscositySpec(self.viscosity.nu1, self.viscosity.nu2)

    def make_step(self):
        s = self.solver
        return StepConfig(
            dt=self.time.dt,
            transport=s.transport,
            newton=NewtonConfig(tol=s.newton_tol, clamp=s.clamp),
            pcg=PcgConfig(rel_tol=s.pcg_tol),
        )

    def validate(self):
        """Build every derived object once so bad values fail as ``ConfigParse``."""
        try:
            self.make_grid()
            self.make_potential()
            self.make_viscosity()
            self.make_step()
        except HDCHError as exc:
            raise ConfigParse(str(exc)) from exc
        sc, tm = self.scenario, self.time
        if sc.name not in SCENARIOS:
            raise ConfigParse(f"scenario.name must be one of {SCENARIOS}")
        if not 0 <= sc.seed < 2**64:
            raise ConfigParse("scenario.seed must be a 64-bit unsigned integer")
        if sc.prepare_k is not None and not sc.prepare_k > 0:
            raise ConfigParse("scenario.prepare_k must be positive")
        if not tm.t_end >= 0 or tm.record_every < 1:
            raise ConfigParse("need time.t_end >= 0 and time.record_every >= 1")
        if not 0 < self.solver.clamp < 1:
            raise ConfigParse("solver.clamp must lie in (0, 1)")
        return self

    # -- (de)serialisation --
    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def with_value(self, key, raw):
        """Copy with one ``section.key`` (or an unambiguous bare key) replaced."""
        section, name = _resolve_key(key)
        current = getattr(self, section)
        value = _coerce(type(current), name, raw)
        return replace(self, **{section: replace(current, **{name: value})}).validate()


_SECTIONS = {f.name: f.type for f in fields(RunConfig)}


def _field_types(cls):
    return {f.name: f.type for f in fields(cls)}


def _coerce(cls, name, value):
    types = _field_types(cls)
    if name not in types:
        raise ConfigParse(f"unknown key {name!r} in section for {cls.__name__}")
    args = [a for a in get_args(types[name]) if a is not type(None)]
    base = args[0] if args else types[name]
    if value is None:
        if not args:
            raise ConfigParse(f"{name} may not be null")
        return None
    try:
        if base is bool:
            if isinstance(value, str):
                if value.lower() not in ("true", "false"):
                    raise ValueError(value)
                return value.lower() == "true"
            if not isinstance(value, bool):
                raise ValueError(value)
            return value
        if base is int:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if base is float:
            return float(value)
        return str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigParse(f"bad value {value!r} for {name}") from exc


def _resolve_key(key):
    if "." in key:
        section, name = key.split(".", 1)
        if section not in _SECTIONS:
            raise ConfigParse(f"unknown section {section!r}")
        return section, name
    owners = [s for s, cls in _SECTIONS.items() if key in _field_types(cls)]
    if len(owners) != 1:
        raise ConfigParse(f"key {key!r} is unknown or ambiguous; use section.key")
    return owners[0], key


def from_dict(data):
    if not isinstance(data, dict):
        raise ConfigParse("configuration must be a table of sections")
    sections = {}
    for name, body in data.items():
        if name not in _SECTIONS:
            raise ConfigParse(f"unknown section [{name}]")
        if not isinstance(body, dict):
            raise ConfigParse(f"[{name}] must be a table")
        cls = _SECTIONS[name]
        sections[name] = cls(**{k: _coerce(cls, k, v) for k, v in body.items()})
    return RunConfig(**sections).validate()


def loads(text):
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParse(f"invalid TOML: {exc}") from exc
    return from_dict(data)


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigParse(f"cannot read {path}: {exc.strerror}") from exc
    if str(path).endswith(".json"):
        try:
            return from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigParse(f"invalid JSON: {exc}") from exc
    return loads(text)
