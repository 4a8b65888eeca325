#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latticelab/body.hpp"
#include "latticelab/norms.hpp"

namespace llab {

double gauge(const SolidConvexBody& B, const Vec& y);
// LP feasibility of y in B (lambda >= 0, sum lambda <= 1, sum lambda |g_k| >= |y|)
bool body_contains(const SolidConvexBody& B, const Vec& y);
// Removes generators dominated coordinatewise (in modulus) by another one.
std::vector<std::size_t> prune_dominated(SolidConvexBody& B);

struct PriceResult {
    double value = 0.0;
    Vec generator;
    std::vector<Vec> family;  // normalized: tau of the member norms is 1
    bool exact = false;
};

// sup over families of <sigma(|T x_i|), w> / tau(||x_i||_E) for w >= 0. Exact for sigma = l_inf by
// enumerating coordinate partitions and sign patterns; otherwise a warm-started compass search on
// families of length dim+1, seeded with the exact single-vector optimum.
class CPricer {
public:
    CPricer(Matrix T, NormedLattice E, SeqNorm tau, SeqNorm sigma);

    PriceResult price(const Vec& w, std::uint64_t seed, const std::vector<std::vector<Vec>>& warm = {}) const;
    Vec generator_of(const std::vector<Vec>& family) const;
    double family_value(const std::vector<Vec>& family, const Vec& w) const;
    // Family attaining tau*(||T* u_i||) for pieces u_i of a dual decomposition.
    std::vector<Vec> family_from_pieces(const std::vector<Vec>& pieces) const;

    // tau = sigma = l_p: C is the p-convexification of the solid convex hull A of {|Tu|^p : ||u||_E <= 1},
    // so gauges reduce to column generation over A priced by single vectors.
    bool power_mode() const;
    bool exact_pricing() const { return std::isinf(sigma_.p) && out_dim_ <= 6; }
    double power_price(const Vec& mu, std::uint64_t seed, const std::vector<Vec>& warm, Vec& u) const;
    Vec power_point(const Vec& u) const;
    double sigma_p() const { return sigma_.p; }
    double domain_norm(const Vec& x) const { return eval_norm(E_, x); }

    std::size_t in_dim() const { return in_dim_; }
    std::size_t out_dim() const { return out_dim_; }

private:
    PriceResult single(const Vec& w) const;
    PriceResult partitions(const Vec& w) const;
    PriceResult search(const Vec& w, std::uint64_t seed, const std::vector<std::vector<Vec>>& warm) const;
    // max over sign patterns of ||T^T (v .* s)||_{E*} and a norming x in E
    double best_signed(const Vec& v, Vec& x) const;

    Matrix T_;
    Matrix Tt_;
    NormedLattice E_;
    NormedLattice Estar_;
    SeqNorm tau_;
    SeqNorm sigma_;
    std::size_t in_dim_;
    std::size_t out_dim_;
};

struct CBody {
    SolidConvexBody body;
    std::vector<std::vector<Vec>> families;
    SolidConvexBody power;  // generators |Tu|^p, power mode only
    std::vector<Vec> power_u;

    void add(std::vector<Vec> family, Vec generator);
    void prune();
    std::vector<std::vector<Vec>> warm_for(const Vec& w, std::size_t count) const;
};

struct RefinedGauge {
    double value = 0.0;  // gauge in the enlarged inner body
    double lower = 0.0;  // <mu,|y|> / max(1, price(mu)): certified when pricing is exact
    int rounds = 0;
    bool certified = false;
};

// Column generation: LP gauge, price the dual functional, add the priced generator, repeat.
RefinedGauge refined_gauge(CBody& C, const CPricer& P, const Vec& y, std::uint64_t seed, int max_rounds = 40);

CBody build_C_body(const LinOperator& T, const SeqNorm& tau, const SeqNorm& sigma, long budget, std::uint64_t seed);

struct DViolation {
    bool in_D = true;
    double rho_lower = 0.0;
    std::vector<Vec> pieces;  // best decomposition found
    std::vector<Vec> witness;  // pieces, when rho_lower > 1
};

// rho(u) = sup{ tau(||T u_i||) : sigma(|u_1|,...,|u_n|) <= |u| } searched over splittings u_i = u .* W_i.
DViolation search_D_violation(const LinOperator& T, const Vec& u, const SeqNorm& tau, const SeqNorm& sigma,
                              long budget, std::uint64_t seed);

struct PolarityCandidate {
    Vec u;
    double support = 0.0;
    double rho = 0.0;
    std::string check;
};

struct PolarityReport {
    int samples = 0;
    int inside_C_polar = 0;
    int with_D_violation = 0;
    double max_rho_inside = 0.0;
    double min_support_violating = kInf;
    double max_abs_gap = 0.0;
    std::size_t generators = 0;
    std::vector<PolarityCandidate> counterexamples;
    bool pass = false;
};

PolarityReport verify_polarity(const LinOperator& T, const SeqNorm& tau, const SeqNorm& sigma, int sample_count,
                               long budget, std::uint64_t seed);

struct FactorizationReport {
    std::string kind = "ClassC";
    bool trivial = false;
    NormedLattice Y;
    LinOperator U;
    LinOperator V;
    SolidConvexBody body;
    double K = 0.0;
    double basis_error = 0.0;
    double U0_max = 0.0;
    bool U0_pass = false;
    double V0_max = 0.0;  // max ||V0 g||_X / gauge(g) over generators
    bool V0_pass = false;
    double convexity_ratio_max = 0.0;
    std::vector<Vec> worst_family;
    bool convexity_pass = false;
    int families = 0;
    bool pass = false;
};

FactorizationReport build_minimal_factorization(const LinOperator& T, const SeqNorm& tau, const SeqNorm& sigma,
                                                long budget, std::uint64_t seed, int families = 500);

struct InterpolationExponents {
    double p_theta = 0.0;
    double q_theta = 0.0;
    double pbar2 = 0.0;
    double qbar2 = 0.0;
    std::string form;
};

// p2 in {p, inf}, q2 in {1, q}. q2 = 1 takes q_theta = q/(1-theta); q2 = q needs p2 = inf and takes
// q_theta = q/theta.
InterpolationExponents interpolation_exponents(double theta, double p, double q, double p2, double q2);

Vec interpolate_point(const Vec& g, const Vec& h, double theta);

struct InterpolationReport {
    SolidConvexBody C_theta;
    InterpolationExponents exponents;
    std::size_t generator_pairs = 0;
    std::size_t sampled_pairs = 0;
    int midpoint_checks = 0;
    double max_midpoint_gauge = 0.0;
    double max_holder_excess = 0.0;
    bool pass = false;
};

// Generators: every generator pair plus `samples` hull pairs taken from a fixed prefix sequence, so a
// larger sample count only appends generators.
InterpolationReport interpolate_theta(const SolidConvexBody& C0, const SolidConvexBody& C1, double theta, double p,
                                      double q, double p2, double q2, int samples, std::uint64_t seed);

}  // namespace llab
