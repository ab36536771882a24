"""Rewrite the stored structure reports under tests/fixtures.

Only run this after a deliberate change to the report format; the acceptance
suite compares against these files byte for byte (as parsed JSON).
"""

import json
from pathlib import Path

from metapres.classify import classify
from metapres.presentation import load_presentation

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    for src in sorted(FIXTURES.glob("*.txt")):
        report = classify(load_presentation(str(src)))
        dst = src.with_suffix(".report.json")
        dst.write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
        print(f"{src.name}: {report.diophantine.value} -> {dst.name}")


if __name__ == "__main__":
    main()
