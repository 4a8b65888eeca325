#pragma once

#include <vector>

#include "latticelab/types.hpp"

namespace llab {

// {y : |y| <= sum_k lambda_k |g_k|, lambda >= 0, sum lambda <= 1}
struct SolidConvexBody {
    std::size_t dim = 0;
    std::vector<Vec> generators;

    void add(Vec g) { generators.push_back(std::move(g)); }
};

struct GaugeResult {
    double value = 0.0;  // +inf when y leaves the ideal spanned by the generators
    Vec lambda;
    Vec mu;  // mu >= 0, <mu,|g_k|> <= 1 for all k, <mu,|y|> = value
};

GaugeResult gauge_lp(const SolidConvexBody& B, const Vec& y);
double support_function(const SolidConvexBody& B, const Vec& b);

void check_body(const SolidConvexBody& B);

}  // namespace llab
