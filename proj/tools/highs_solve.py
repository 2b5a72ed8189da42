#!/usr/bin/env python3
"""Solve an exported LP file with HiGHS and write `name value` lines.

The MIP is solved to a zero gap, then the integer variables are rounded and
fixed and the LP is solved again so the continuous values satisfy the rows
tightly.

usage: highs_solve.py model.lp solution.txt
exit status 0 on success, 3 when HiGHS is missing, 4 when no optimum is found.
"""

import sys


def main(argv):
    if len(argv) != 3:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    try:
        import highspy
    except ImportError:
        print("highspy is not installed", file=sys.stderr)
        return 3

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 1e-9)
    h.setOptionValue("mip_feasibility_tolerance", 1e-9)
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    h.setOptionValue("random_seed", 0)
    h.readModel(argv[1])
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        print("HiGHS: " + h.modelStatusToString(h.getModelStatus()), file=sys.stderr)
        return 4

    lp = h.getLp()
    n = lp.num_col_
    values = list(h.getSolution().col_value)
    integrality = list(lp.integrality_) if lp.integrality_ else []
    for j in range(n):
        if integrality and integrality[j] != highspy.HighsVarType.kContinuous:
            v = float(round(values[j]))
            h.changeColBounds(j, v, v)
            h.changeColIntegrality(j, highspy.HighsVarType.kContinuous)
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        print("HiGHS (fixed binaries): " + h.modelStatusToString(h.getModelStatus()),
              file=sys.stderr)
        return 4
    values = list(h.getSolution().col_value)

    with open(argv[2], "w") as out:
        out.write("# HiGHS objective %.12g\n" % h.getInfo().objective_function_value)
        for j in range(n):
            out.write("%s %.17g\n" % (h.getColName(j)[1], values[j]))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
