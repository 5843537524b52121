"""Run the acceptance criteria and write a JSON summary.

    python3 scripts/run_acceptance.py            # all nine
    python3 scripts/run_acceptance.py 1 2 9      # a selection
"""

import argparse
import json

from padic_hecke.acceptance import run_all


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("criteria", nargs="*", type=int)
    ap.add_argument("--json", default="acceptance.json", help="summary path")
    args = ap.parse_args()
    results = run_all(args.criteria or None)
    with open(args.json, "w") as fh:
        json.dump([r.to_json() for r in results], fh, indent=2, sort_keys=True, default=str)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
