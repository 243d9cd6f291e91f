import pytest

from oulab.cli import run
from oulab.config import ExperimentConfig


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory):
    """Reference artifacts produced through the lab CLI.

    The 2D runs use h = 0.05 (schema-identical to the h = 0.025
    production resolution, roughly twenty times faster to relax).
    """
    base = tmp_path_factory.mktemp("artifacts")
    runs = {
        "solve_ode": ExperimentConfig(
            command="solve-ode", amplitude=4.0, n=2048, stability_check=False,
            out_dir=str(base / "solve_ode"),
        ),
        "stability": ExperimentConfig(
            command="stability", amplitude=4.0, state="heteroclinic",
            out_dir=str(base / "stability"),
        ),
        "sweep": ExperimentConfig(
            command="amplitude-sweep", amplitudes=(0.5, 1.0, 2.0, 4.0),
            max_iter=80_000, out_dir=str(base / "sweep"),
        ),
        # h = 0.05 carries a grid-anisotropy residual plateau near 1.1e-5,
        # so the stop tolerance sits above it (schemas match production runs)
        "flow": ExperimentConfig(
            command="flow-2d", amplitude=4.0, L=5.0, h=0.05, tol=1.5e-5,
            out_dir=str(base / "flow"),
        ),
    }
    for name, cfg in runs.items():
        code = run(cfg)
        assert code in (0, 2), f"{name} failed (exit {code})"
    poincare = ExperimentConfig(
        command="poincare-check", amplitude=4.0, L=5.0, R=2.0,
        field_path=str(base / "flow" / "field.bin"),
        out_dir=str(base / "poincare_R2"),
    )
    assert run(poincare) == 0
    poincare3 = ExperimentConfig(
        command="poincare-check", amplitude=4.0, L=5.0, R=3.0,
        field_path=str(base / "flow" / "field.bin"),
        out_dir=str(base / "poincare_R3"),
    )
    assert run(poincare3) == 0
    return base

