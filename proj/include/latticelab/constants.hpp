#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "latticelab/norms.hpp"

namespace llab {

// Convex:  sigma-combination of |T x_i| measured in the codomain over tau of the domain norms.
// Concave: tau of the codomain norms of T x_i over the domain norm of the sigma-combination of |x_i|.
// The estimate kinds add the pairwise-disjoint restriction.
struct ConstantKind {
    bool concave = false;
    SeqNorm tau{2.0};
    SeqNorm sigma{2.0};
    bool disjoint = false;
    std::string label;

    static ConstantKind convex(double p, double p2);
    static ConstantKind concave_kind(double q, double q2);
    static ConstantKind upper_estimate(double p);
    static ConstantKind lower_estimate(double q);
    static ConstantKind tau_sigma_convex(SeqNorm tau, SeqNorm sigma);
    static ConstantKind tau_sigma_concave(SeqNorm tau, SeqNorm sigma);
};

// Norm callbacks let other modules plug in gauges or search-evaluated norms.
struct RatioFns {
    std::function<double(const Vec&)> src;
    std::function<double(const Vec&)> dst;
    Matrix T;
    std::size_t in_dim = 0;
};

RatioFns ratio_fns(const LinOperator& T);

bool pairwise_disjoint(const std::vector<Vec>& family);

// Exact ratio of one family; throws on a zero denominator or a non-disjoint family for estimate kinds.
double family_ratio(const RatioFns& f, const ConstantKind& kind, const std::vector<Vec>& family);
double ratio(const LinOperator& T, const ConstantKind& kind, const std::vector<Vec>& family);

ConstantEstimate estimate_constant_fns(const RatioFns& f, const ConstantKind& kind, long budget, std::uint64_t seed);
// Adds the closed form for the identity on l_s (marked exact) before falling back to search.
ConstantEstimate estimate_constant(const LinOperator& T, const ConstantKind& kind, long budget, std::uint64_t seed);

double gamma(double p);
double gamma_alt(double p);

// Restricted-growth-string enumeration; blocks listed in first-appearance order.
std::vector<std::vector<std::vector<std::size_t>>> set_partitions(std::size_t n);

struct QConvexReport {
    double p = 0.0;
    double q = 0.0;
    double bound = 0.0;
    ConstantEstimate estimate;
    double renormed_max_ratio = 0.0;
    std::vector<Vec> renormed_worst_family;
    long renormed_families = 0;
    bool pass = false;
};

QConvexReport check_q_convexity_bound(const NormedLattice& X, double q, long budget, std::uint64_t seed,
                                      int renormed_families = 100);

struct GrowthRow {
    std::size_t n = 0;
    double A_n = 0.0;
    double vee_ratio = 0.0;
    double Ap_over_H = 0.0;
};

struct LpinftyReport {
    double p = 0.0;
    std::size_t n = 0;
    double A_n = 0.0;
    double vee_ratio = 0.0;
    double max_unit_norm_error = 0.0;
    bool unit_norm_check = false;
    bool ratio_check = false;
    std::vector<GrowthRow> growth_table;
    bool growth_increasing = false;
    bool pass = false;
};

double alpha_coefficient(std::size_t k, double p);
double lpinfty_A(double p, std::size_t n);
NormedLattice lpinfty_lp_lattice(double p, std::size_t n);
LpinftyReport reproduce_lpinfty_lp(double p, std::size_t n);

struct DualityGapReport {
    ConstantEstimate L1;
    ConstantEstimate L2;
    double gap = 0.0;
    bool oracle = false;
    bool pass = true;
};

DualityGapReport duality_gap(const LinOperator& T, const SeqNorm& tau, const SeqNorm& sigma, long budget,
                             std::uint64_t seed);

}  // namespace llab
