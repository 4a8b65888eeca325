#pragma once

#include <cstdint>
#include <vector>

#include "latticelab/norms.hpp"

namespace llab {

struct IdealExponents {
    double p = 2.0;
    double p2 = kInf;  // p or inf
    double q = 2.0;
    double q2 = 1.0;  // 1 or q
};

// u = sum_i x_i (x) y_i
struct TensorRep {
    std::vector<Vec> x;
    std::vector<Vec> y;
    IdealExponents exponents;
};

void check_rep(const TensorRep& rep);

struct ThetaStage {
    std::size_t L = 0;
    double value = 0.0;
};

struct ThetaResult {
    ConstantEstimate estimate;
    std::vector<Vec> xstar;  // functionals on the x side, length L
    std::vector<Vec> ystar;
    std::vector<ThetaStage> stages;
};

// Search over truncated functional families (length L), staged through L = 1, 2, 4, ... with each stage
// warm-started from the previous optimum, so the value never decreases with L.
ThetaResult theta_search(const TensorRep& rep, const NormedLattice& X, const NormedLattice& F, std::size_t L,
                         long budget, std::uint64_t seed);
ConstantEstimate theta_lower(const TensorRep& rep, const NormedLattice& X, const NormedLattice& F, std::size_t L,
                             long budget, std::uint64_t seed);

struct EtaFactorization {
    NormedLattice Z;  // predual of the gauge of the sampled weight vectors: a search-evaluated lower bound
    LinOperator R;    // E -> Z, rows x_i
    LinOperator S;    // Z -> F, columns y_i
    Matrix u;
    Matrix SR;
    double basis_error = 0.0;
    bool exact_reproduction = false;
    ConstantEstimate theta;
    std::size_t theta_L = 0;
    ConstantEstimate K_R;  // (p,p2)-convexity of R
    ConstantEstimate K_S;  // (q,q2)-concavity of S
    double product = 0.0;
    bool product_le_theta = false;  // product <= theta + 5e-2
    bool product_agrees = false;    // |product - theta| <= 5e-2
    bool unconditional = false;
    int z_rounds = 0;
    bool pass = false;
};

// rep lives in E* (x) F: the x_i are functionals on E.
EtaFactorization build_eta_factorization(const TensorRep& rep, const NormedLattice& E, const NormedLattice& F,
                                         std::size_t L, long budget, std::uint64_t seed);

struct MultiplierReport {
    double p = 0.0;
    double q = 0.0;
    double q2 = 1.0;
    double norm_D = 0.0;  // exact: max over the extreme points of the source ball
    ConstantEstimate K_convex;
    ConstantEstimate K_concave;
    bool convex_check = false;
    bool concave_check = false;
    bool pass = false;
};

// D = diag(g) from lorentz_pinfty(p, r = 1, w1) into lp(q) or lorentz_q1(q, w2).
MultiplierReport multiplication_operator_check(const Vec& g, const NormedLattice& source, const NormedLattice& target,
                                               double q2, long budget, std::uint64_t seed);

}  // namespace llab
