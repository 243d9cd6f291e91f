"""Entry point: render --spec PATH."""

from __future__ import annotations

import argparse
import sys

from .render import render
from .spec import SpecError, load_spec


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description="Render a figure from lab artifacts"
    )
    parser.add_argument("--spec", required=True, help="figure spec file")
    args = parser.parse_args(argv)
    try:
        out = render(load_spec(args.spec))
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
