"""Command line entry point: plotkit <spec-file>."""

from __future__ import annotations

import argparse
import sys

from .figures import SpecError, render_spec_file


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plotkit",
                                     description="Render figures from a JSON spec file")
    parser.add_argument("spec", help="figure spec file (JSON)")
    args = parser.parse_args(argv)
    try:
        results = render_spec_file(args.spec)
    except SpecError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    for res in results:
        print(res.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
