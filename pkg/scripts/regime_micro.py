"""Exact TV and the per-regime bounds on the hand-built micro gadgets.

Prints one block per (gadget, w, beta) fixture with every bound, its
two sides and the slack.

    python scripts/regime_micro.py
"""
import argparse

from spintest import suites
from spintest.report import RunReport, emit_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--format", choices=("text", "json"), default="text")
    args = ap.parse_args()
    report = RunReport(command=["regime_micro"])
    suites.regime(report)
    emit_report(report, args.format)


if __name__ == "__main__":
    main()
