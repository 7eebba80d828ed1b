#!/usr/bin/env python3
"""Solve an LP file with HiGHS and write `name value` lines.

Usage: highs_solve.py MODEL.lp SOLUTION.out
"""
import sys

import highspy


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    model, out = sys.argv[1], sys.argv[2]
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if h.readModel(model) != highspy.HighsStatus.kOk:
        print(f"cannot read {model}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    with open(out, "w") as f:
        if status == highspy.HighsModelStatus.kInfeasible:
            f.write("# infeasible\n")
            return 0
        if status != highspy.HighsModelStatus.kOptimal:
            print(f"solver stopped with {h.modelStatusToString(status)}", file=sys.stderr)
            return 1
        values = h.getSolution().col_value
        lp = h.getLp()
        for name, v in zip(lp.col_names_, values):
            f.write(f"{name} {round(v)}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
