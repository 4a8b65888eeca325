#pragma once

#include <vector>

namespace llab {

enum class LpStatus { optimal, infeasible, unbounded };
enum class Rel { le, ge, eq };

// maximize c.x  subject to  rows[i].x (rel[i]) rhs[i],  x >= 0
struct LpProblem {
    std::vector<double> c;
    std::vector<std::vector<double>> rows;
    std::vector<Rel> rel;
    std::vector<double> rhs;

    void add(std::vector<double> row, Rel r, double b)
    {
        rows.push_back(std::move(row));
        rel.push_back(r);
        rhs.push_back(b);
    }
};

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    double value = 0.0;
    std::vector<double> x;
    // Lagrange multipliers of the original rows (sign convention of a max problem:
    // >= 0 on binding <= rows, <= 0 on binding >= rows).
    std::vector<double> dual;
    int pivots = 0;
};

// Dense two-phase tableau simplex. Dantzig pricing, switching to Bland's rule after a run
// of degenerate pivots; deterministic for a given input ordering.
LpResult solve_lp(const LpProblem& lp);

}  // namespace llab
