#include "latticelab/body.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latticelab/simplex.hpp"

namespace llab {

void check_body(const SolidConvexBody& B)
{
    for (const auto& g : B.generators) {
        if (g.size() != B.dim) throw std::invalid_argument("body: generator dimension mismatch");
        for (double v : g)
            if (!std::isfinite(v)) throw std::invalid_argument("body: non-finite generator entry");
    }
}

GaugeResult gauge_lp(const SolidConvexBody& B, const Vec& y)
{
    if (y.size() != B.dim) throw std::invalid_argument("gauge: dimension mismatch");
    GaugeResult out;
    const std::size_t K = B.generators.size();
    bool zero = std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; });
    if (zero) {
        out.lambda.assign(K, 0.0);
        out.mu.assign(B.dim, 0.0);
        return out;
    }
    if (K == 0) {
        out.value = kInf;
        return out;
    }
    LpProblem lp;
    lp.c.assign(K, -1.0);
    for (std::size_t j = 0; j < B.dim; ++j) {
        Vec row(K);
        for (std::size_t k = 0; k < K; ++k) row[k] = std::fabs(B.generators[k][j]);
        lp.add(std::move(row), Rel::ge, std::fabs(y[j]));
    }
    LpResult r = solve_lp(lp);
    if (r.status != LpStatus::optimal) {
        out.value = kInf;
        return out;
    }
    out.value = -r.value;
    out.lambda = r.x;
    out.mu.resize(B.dim);
    for (std::size_t j = 0; j < B.dim; ++j) out.mu[j] = std::max(0.0, -r.dual[j]);
    return out;
}

double support_function(const SolidConvexBody& B, const Vec& b)
{
    if (b.size() != B.dim) throw std::invalid_argument("support function: dimension mismatch");
    double best = 0.0;
    for (const auto& g : B.generators) {
        double s = 0.0;
        for (std::size_t j = 0; j < B.dim; ++j) s += std::fabs(g[j]) * std::fabs(b[j]);
        best = std::max(best, s);
    }
    return best;
}

}  // namespace llab
