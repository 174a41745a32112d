"""Regenerate tests/fixtures/oracles.json from the brute-force oracles."""

import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402


def main():
    out = ROOT / "tests" / "fixtures" / "oracles.json"
    out.write_text(json.dumps(oracles.generate(), indent=1, sort_keys=True) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
