"""Experiment configuration: flat key = value files with [section] headers.

The format is deliberately plain (configparser syntax, no nesting) so
configs diff cleanly.  Unknown sections or keys are rejected with the
offending name; syntax errors surface configparser's line diagnostics.

Grid-size maxima protect against typo-sized allocations; the
environment variable ``OU_LAB_MAX_GRID`` overrides the common cap.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field

from .errors import InvalidArgumentError

COMMANDS = (
    "solve-ode",
    "minimize-energy",
    "check-existence",
    "flow-2d",
    "stability",
    "poincare-check",
    "amplitude-sweep",
)

_SCHEMA = {
    "run": {"command", "seed"},
    "potential": {"name", "amplitude", "f_coeffs"},
    "numerics": {
        "t",
        "n",
        "tol",
        "basis_size",
        "k",
        "l",
        "h",
        "dt",
        "r",
        "max_steps",
        "max_iter",
        "amplitudes",
        "state",
        "stability_check",
        "field",
        "grad_tol",
    },
    "output": {"dir"},
}

_DEFAULT_MAX_GRID = 16384
MAX_BASIS = 512


def max_grid() -> int:
    raw = os.environ.get("OU_LAB_MAX_GRID")
    if raw is None:
        return _DEFAULT_MAX_GRID
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidArgumentError(f"OU_LAB_MAX_GRID must be an integer, got {raw!r}") from exc
    if value < 16:
        raise InvalidArgumentError("OU_LAB_MAX_GRID must be at least 16")
    return value


@dataclass
class ExperimentConfig:
    command: str
    potential_name: str = "double_well"
    amplitude: float = 4.0
    f_coeffs: tuple[float, ...] = ()
    T: float = 8.0
    n: int = 2048
    tol: float | None = None
    basis_size: int = 256
    k: int = 6
    L: float = 5.0
    h: float = 0.025
    dt: float | None = None
    R: float = 2.0
    max_steps: int = 400_000
    max_iter: int = 400_000
    grad_tol: float = 3e-6
    amplitudes: tuple[float, ...] = (0.1, 0.5, 1.0, 2.0, 2.2635369684180673, 4.0, 8.0)
    state: str = "heteroclinic"
    stability_check: bool = True
    field_path: str | None = None
    out_dir: str = "artifacts"
    seed: int = 0
    extras: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise InvalidArgumentError(
                f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}"
            )
        cap = max_grid()
        if not 8 <= self.n <= cap:
            raise InvalidArgumentError(f"n = {self.n} outside [8, {cap}]")
        if self.tol is not None and not self.tol > 0:
            raise InvalidArgumentError("tol must be positive")
        if not 0 < self.basis_size <= MAX_BASIS:
            raise InvalidArgumentError(f"basis_size must be in [1, {MAX_BASIS}]")
        if self.k < 1:
            raise InvalidArgumentError("k must be >= 1")
        if self.h <= 0 or self.L <= 0:
            raise InvalidArgumentError("L and h must be positive")
        side = 2 * int(round(self.L / self.h)) + 1
        if side > cap:
            raise InvalidArgumentError(
                f"field side {side} exceeds the grid cap {cap} (set OU_LAB_MAX_GRID to raise)"
            )
        if self.dt is not None and not self.dt > 0:
            raise InvalidArgumentError("dt must be positive")
        if any(a <= 0 for a in self.amplitudes):
            raise InvalidArgumentError("amplitudes must be positive")
        if self.potential_name not in ("double_well", "polynomial"):
            raise InvalidArgumentError(
                f"unknown potential {self.potential_name!r} (double_well or polynomial)"
            )
        if self.potential_name == "polynomial" and len(self.f_coeffs) < 2:
            raise InvalidArgumentError("polynomial potential needs f_coeffs")


def _parse_floats(raw: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in raw.replace(",", " ").split())


def load_config(path: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise InvalidArgumentError(f"config parse error in {path}: {exc}") from exc
    if not read:
        raise InvalidArgumentError(f"config file not found: {path}")

    for section in parser.sections():
        key = section.lower()
        if key not in _SCHEMA:
            raise InvalidArgumentError(f"unknown config section [{section}] in {path}")
        for name in parser[section]:
            if name.lower() not in _SCHEMA[key]:
                raise InvalidArgumentError(
                    f"unknown key {name!r} in section [{section}] of {path}"
                )

    if "run" not in parser or "command" not in parser["run"]:
        raise InvalidArgumentError(f"{path} must define command in a [run] section")

    cfg = ExperimentConfig(command=parser["run"]["command"].strip())
    if parser.has_option("run", "seed"):
        cfg.seed = parser.getint("run", "seed")

    if parser.has_section("potential"):
        sec = parser["potential"]
        cfg.potential_name = sec.get("name", cfg.potential_name).strip()
        if "amplitude" in sec:
            cfg.amplitude = float(sec["amplitude"])
        if "f_coeffs" in sec:
            cfg.f_coeffs = _parse_floats(sec["f_coeffs"])

    if parser.has_section("numerics"):
        sec = parser["numerics"]
        if "t" in sec:
            cfg.T = float(sec["t"])
        if "n" in sec:
            cfg.n = int(sec["n"])
        if "tol" in sec:
            cfg.tol = float(sec["tol"])
        if "basis_size" in sec:
            cfg.basis_size = int(sec["basis_size"])
        if "k" in sec:
            cfg.k = int(sec["k"])
        if "l" in sec:
            cfg.L = float(sec["l"])
        if "h" in sec:
            cfg.h = float(sec["h"])
        if "dt" in sec:
            cfg.dt = float(sec["dt"])
        if "r" in sec:
            cfg.R = float(sec["r"])
        if "max_steps" in sec:
            cfg.max_steps = int(sec["max_steps"])
        if "max_iter" in sec:
            cfg.max_iter = int(sec["max_iter"])
        if "grad_tol" in sec:
            cfg.grad_tol = float(sec["grad_tol"])
        if "amplitudes" in sec:
            cfg.amplitudes = _parse_floats(sec["amplitudes"])
        if "state" in sec:
            cfg.state = sec["state"].strip()
        if "stability_check" in sec:
            cfg.stability_check = sec.getboolean("stability_check")
        if "field" in sec:
            cfg.field_path = sec["field"].strip()

    if parser.has_section("output") and parser.has_option("output", "dir"):
        cfg.out_dir = parser["output"]["dir"].strip()

    cfg.validate()
    return cfg
