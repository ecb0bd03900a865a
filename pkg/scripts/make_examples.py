"""Regenerate the bundled JSON example configurations."""

import argparse
import json
from pathlib import Path

from bending.examples import all_examples


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    default = Path(__file__).resolve().parents[1] / "src" / "bending" / "data"
    parser.add_argument("--out", type=Path, default=default)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, doc in sorted(all_examples().items()):
        path = args.out / f"{name}.json"
        path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        print(path)


if __name__ == "__main__":
    main()
