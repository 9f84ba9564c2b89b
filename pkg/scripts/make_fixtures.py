"""Regenerate the demo inputs under fixtures/ (deterministic)."""

from __future__ import annotations

import argparse
from pathlib import Path

from entsent.synthetic import write_demo_fixtures


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "fixtures")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    write_demo_fixtures(args.out, seed=args.seed)


if __name__ == "__main__":
    main()
