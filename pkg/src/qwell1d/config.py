"""JSON run configuration.

A config holds one ``mode`` and a list of ``cases``.  Scattering cases
carry a ``structure``; bound-state cases carry a ``well``.  Optional
``expected`` entries are reference values that ``qwell1d reproduce``
compares against.  See ``docs/config_schema.md`` for the full schema.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .analytic import dqwtb_params
from .core import EnergyGrid, LayeredStructure, PotentialGrid, build_grid
from .numerov import supergaussian_potential
from .pdm import MassProfile, VonRoosParams

MODES = ("transmission", "bound", "validate", "reproduce")
ENGINES = ("auto", "analytic", "tmm", "both")


class ConfigError(ValueError):
    pass


def _require(d: dict, keys, where: str):
    missing = [k for k in keys if k not in d]
    if missing:
        raise ConfigError(f"{where}: missing {', '.join(missing)}")


def _floats(d: dict, keys) -> dict:
    return {k: float(d[k]) for k in keys}


STRUCTURE_KEYS = {
    "single_barrier": ("V0", "a"),
    "sqw_db": ("V1_left", "a", "L", "V_right", "b"),
    "dqwtb": ("V1", "a", "L1", "V2", "b", "L2"),
}


@dataclass
class StructureSpec:
    """Scattering geometry: a closed-form family or an explicit layer list."""

    kind: str
    params: dict = field(default_factory=dict)
    layers: list = field(default_factory=list)
    mass_ratio: float = 0.067

    @classmethod
    def from_dict(cls, d: dict) -> "StructureSpec":
        _require(d, ["kind"], "structure")
        kind = d["kind"]
        mass = float(d.get("mass_ratio", 0.067))
        if kind == "layers":
            _require(d, ["layers"], "structure")
            layers = [[float(w), float(h)] for w, h in d["layers"]]
            if not layers:
                raise ConfigError("structure: empty layer list")
            return cls(kind, {}, layers, mass)
        if kind not in STRUCTURE_KEYS:
            raise ConfigError(f"structure: unknown kind {kind!r}")
        _require(d, STRUCTURE_KEYS[kind], f"structure {kind}")
        return cls(kind, _floats(d, STRUCTURE_KEYS[kind]), [], mass)

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "layers":
            out["layers"] = [list(p) for p in self.layers]
        else:
            out.update(self.params)
        out["mass_ratio"] = self.mass_ratio
        return out

    def layered(self) -> LayeredStructure:
        p = self.params
        if self.kind == "single_barrier":
            pairs = [(p["a"], p["V0"])]
        elif self.kind == "sqw_db":
            pairs = [(p["a"], p["V1_left"]), (p["L"], 0.0), (p["b"], p["V_right"])]
        elif self.kind == "dqwtb":
            pairs = [(p["a"], p["V1"]), (p["L1"], 0.0), (p["b"], p["V2"]),
                     (p["L2"], 0.0), (p["a"], p["V1"])]
        else:
            pairs = self.layers
        return LayeredStructure.from_pairs([q for q in pairs if q[0] > 0], self.mass_ratio)

    def closed_form(self):
        """``(kind, params)`` for :func:`qwell1d.analytic.sweep`, or None."""
        if self.kind in STRUCTURE_KEYS:
            return self.kind, {**self.params, "mass_ratio": self.mass_ratio}
        try:
            return "dqwtb", dqwtb_params(self.layered())
        except ValueError:
            return None


POTENTIAL_KINDS = ("empty", "dqwtb", "layers", "supergaussian")


@dataclass
class WellSpec:
    """Infinite well of a given width with an interior potential and mass."""

    width: float
    potential: dict = field(default_factory=lambda: {"kind": "empty"})
    mass: float | dict = 0.067
    von_roos: dict | None = None
    regions: list | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "WellSpec":
        _require(d, ["width"], "well")
        width = float(d["width"])
        if not width > 0:
            raise ConfigError("well: width must be > 0")
        pot = dict(d.get("potential", {"kind": "empty"}))
        kind = pot.get("kind")
        if kind not in POTENTIAL_KINDS:
            raise ConfigError(f"well: unknown potential kind {kind!r}")
        if kind == "dqwtb":
            _require(pot, STRUCTURE_KEYS["dqwtb"], "well potential")
        elif kind == "layers":
            _require(pot, ["layers"], "well potential")
        elif kind == "supergaussian":
            _require(pot, ["heights", "exponent"], "well potential")
            if int(pot["exponent"]) < 2 or int(pot["exponent"]) % 2:
                raise ConfigError("well potential: exponent must be an even integer >= 2")
        mass = d.get("mass", 0.067)
        if isinstance(mass, dict):
            try:
                MassProfile.from_dict(mass)
            except (KeyError, ValueError) as exc:
                raise ConfigError(f"well: bad mass profile ({exc})") from exc
        elif not float(mass) > 0:
            raise ConfigError("well: mass must be > 0")
        else:
            mass = float(mass)
        von_roos = d.get("von_roos")
        if von_roos is not None:
            try:
                VonRoosParams(**von_roos)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"well: bad von_roos parameters ({exc})") from exc
        regions = d.get("regions")
        if regions is not None:
            regions = [[float(a), float(b)] for a, b in regions]
        return cls(width, pot, mass, von_roos, regions)

    def to_dict(self) -> dict:
        out = {"width": self.width, "potential": dict(self.potential), "mass": self.mass}
        if self.von_roos is not None:
            out["von_roos"] = dict(self.von_roos)
        if self.regions is not None:
            out["regions"] = [list(r) for r in self.regions]
        return out

    @property
    def mass_profile(self) -> MassProfile | None:
        return MassProfile.from_dict(self.mass) if isinstance(self.mass, dict) else None

    @property
    def params(self) -> VonRoosParams:
        return VonRoosParams(**(self.von_roos or {}))

    def grid(self, dx: float) -> PotentialGrid:
        pot = self.potential
        kind = pot["kind"]
        offset = pot.get("offset")
        mass = self.mass_profile or self.mass
        if kind == "empty":
            spec = None
        elif kind == "dqwtb":
            spec = LayeredStructure.dqwtb(*(float(pot[k]) for k in STRUCTURE_KEYS["dqwtb"]))
        elif kind == "layers":
            spec = LayeredStructure.from_pairs([(float(w), float(h)) for w, h in pot["layers"]])
        else:
            heights = [float(h) for h in pot["heights"]]
            exponent = int(pot["exponent"])
            centers = tuple(pot.get("centers", (5.0, 10.0, 15.0)))
            strength = float(pot.get("strength", 3.0))

            def spec(x):
                return supergaussian_potential(heights, exponent, x, centers, strength)

        grid = build_grid(self.width, dx, spec, mass,
                          None if offset is None else float(offset))
        if self.regions is not None:
            grid = PotentialGrid(grid.x0, grid.dx, grid.v, grid.m, grid.dm, grid.d2m,
                                 tuple(tuple(r) for r in self.regions))
        return grid


@dataclass
class Case:
    label: str
    structure: StructureSpec | None = None
    well: WellSpec | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "Case":
        label = str(d.get("label", "main"))
        structure = StructureSpec.from_dict(d["structure"]) if "structure" in d else None
        well = WellSpec.from_dict(d["well"]) if "well" in d else None
        if (structure is None) == (well is None):
            raise ConfigError(f"case {label!r}: give exactly one of structure or well")
        return cls(label, structure, well)

    def to_dict(self) -> dict:
        out = {"label": self.label}
        if self.structure is not None:
            out["structure"] = self.structure.to_dict()
        if self.well is not None:
            out["well"] = self.well.to_dict()
        return out


@dataclass
class RunConfig:
    mode: str
    name: str = "run"
    cases: list = field(default_factory=list)
    energy_grid: EnergyGrid | None = None
    engine: str = "auto"
    dx: float = 0.005
    n_modes: int = 10
    output_dir: str = "."
    expected: list = field(default_factory=list)
    validate: dict = field(default_factory=dict)
    description: str = ""

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}")
        if not self.dx > 0:
            raise ConfigError("dx must be > 0")
        if self.n_modes < 1:
            raise ConfigError("n_modes must be >= 1")
        labels = [c.label for c in self.cases]
        if len(set(labels)) != len(labels):
            raise ConfigError("case labels must be unique")
        if self.mode == "transmission":
            if self.energy_grid is None:
                raise ConfigError("transmission needs an energy_grid")
            if not self.cases or any(c.structure is None for c in self.cases):
                raise ConfigError("transmission cases need a structure")
        if self.mode == "bound" and (not self.cases or any(c.well is None for c in self.cases)):
            raise ConfigError("bound cases need a well")

    @property
    def run_mode(self) -> str:
        """The solver a ``reproduce`` config dispatches to."""
        if self.mode != "reproduce":
            return self.mode
        return "transmission" if self.cases and self.cases[0].structure else "bound"

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        _require(d, ["mode"], "config")
        try:
            grid = None
            if "energy_grid" in d:
                g = d["energy_grid"]
                _require(g, ["e_min", "e_max", "n_points"], "energy_grid")
                grid = EnergyGrid(float(g["e_min"]), float(g["e_max"]), int(g["n_points"]))
            cases = [Case.from_dict(c) for c in d.get("cases", [])]
            cfg = cls(mode=d["mode"], name=str(d.get("name", "run")), cases=cases,
                      energy_grid=grid, engine=d.get("engine", "auto"),
                      dx=float(d.get("dx", 0.005)), n_modes=int(d.get("n_modes", 10)),
                      output_dir=str(d.get("output_dir", ".")),
                      expected=list(d.get("expected", [])),
                      validate=dict(d.get("validate", {})),
                      description=str(d.get("description", "")))
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if cfg.mode == "reproduce":
            # a reproduce config must be runnable as one of the solver modes
            cls.from_dict({**d, "mode": cfg.run_mode, "expected": []})
        return cfg

    def to_dict(self) -> dict:
        out = {"mode": self.mode, "name": self.name}
        if self.description:
            out["description"] = self.description
        if self.energy_grid is not None:
            g = self.energy_grid
            out["energy_grid"] = {"e_min": g.e_min, "e_max": g.e_max, "n_points": g.n_points}
        out.update(engine=self.engine, dx=self.dx, n_modes=self.n_modes,
                   output_dir=self.output_dir)
        out["cases"] = [c.to_dict() for c in self.cases]
        if self.expected:
            out["expected"] = [dict(e) for e in self.expected]
        if self.validate:
            out["validate"] = dict(self.validate)
        return out


def dumps(config: RunConfig) -> str:
    return json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n"


def loads(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return RunConfig.from_dict(data)


def load(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return loads(path.read_text())


PRESETS = tuple(f"fig{i}" for i in range(4, 19))


def preset_path(name: str) -> Path:
    from importlib.resources import files

    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return Path(str(files("qwell1d") / "presets" / f"{name}.json"))


def load_preset(name: str) -> RunConfig:
    return load(preset_path(name))
