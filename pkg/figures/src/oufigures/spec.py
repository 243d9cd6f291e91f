"""Figure specs: the same flat key = value format the lab CLI uses.

Example::

    [figure]
    kind = sweep
    output = sweep.png
    dpi = 150
    colormap = viridis

    [inputs]
    sweep = artifacts/sweep/sweep.csv
    manifest = artifacts/sweep/manifest.json

The path values under ``[inputs]`` are resolved relative to the spec
file's directory.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

KINDS = ("profile", "eigen-overlay", "sweep", "heatmap", "poincare-bars")

REQUIRED_INPUTS = {
    "profile": ("profile",),
    "eigen-overlay": ("eigenfunction", "profile"),
    "sweep": ("sweep", "manifest"),
    "heatmap": ("field", "flatness"),
    "poincare-bars": ("poincare",),
}


class SpecError(ValueError):
    """Malformed figure spec or unusable inputs."""


@dataclass
class FigureSpec:
    kind: str
    output: Path
    inputs: dict = field(default_factory=dict)
    dpi: int = 150
    colormap: str = "viridis"

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise SpecError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if self.output.suffix.lower() not in (".png", ".svg"):
            raise SpecError(f"output must be .png or .svg, got {self.output.name!r}")
        for key in REQUIRED_INPUTS[self.kind]:
            if key not in self.inputs:
                raise SpecError(f"figure kind {self.kind!r} needs input {key!r}")
        for key, paths in self.inputs.items():
            for p in paths:
                if not p.exists():
                    raise SpecError(f"input {key!r} does not exist: {p}")


def load_spec(path) -> FigureSpec:
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise SpecError(f"spec file not found: {path}")
    if "figure" not in parser or "kind" not in parser["figure"]:
        raise SpecError(f"{path} must define kind in a [figure] section")
    fig = parser["figure"]
    for key in fig:
        if key not in ("kind", "output", "dpi", "colormap"):
            raise SpecError(f"unknown key {key!r} in [figure]")
    if "output" not in fig:
        raise SpecError("[figure] must define output")
    base = path.parent
    inputs = {}
    if parser.has_section("inputs"):
        for key, raw in parser["inputs"].items():
            inputs[key] = tuple(base / tok for tok in raw.split())
    spec = FigureSpec(
        kind=fig["kind"].strip(),
        output=base / fig["output"].strip(),
        inputs=inputs,
        dpi=fig.getint("dpi", 150),
        colormap=fig.get("colormap", "viridis").strip(),
    )
    spec.validate()
    return spec
