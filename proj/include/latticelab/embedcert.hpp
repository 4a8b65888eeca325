#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latticelab/norms.hpp"

namespace llab {

struct SubsetMargin {
    std::vector<std::size_t> subset;
    double margin = 0.0;  // ||b_I||^{p*} - C^{p*} sum_I d_i
};

struct EmbeddingCertificate {
    double C = 1.0;
    double p = 2.0;
    Vec a;
    Vec b;
    Vec d;
    double epsilon = 0.0;
    double pairing = 0.0;
    std::vector<SubsetMargin> subset_margins;
    double max_margin = 0.0;
    bool valid = false;
};

struct T41Result {
    bool certified = false;
    EmbeddingCertificate certificate;  // filled when certified
    double best_pairing = 0.0;         // best <a,b> reached by the search
    Vec best_b;
    double a_norm = 0.0;
    Side a_norm_side = Side::exact;
    Side subset_norm_side = Side::exact;
    long evals = 0;
};

struct CoveringFamily {
    std::vector<std::vector<std::size_t>> sets;
    long multiplicity = 1;
};

// Covering LP for a direction b: min sum e_i subject to sum_{i in I} e_i >= ||b_I||^{p*} for every
// nonempty I. Solved through its packing dual (n rows); d = e / V.
struct CoverValue {
    double V = 0.0;
    Vec d;
};
CoverValue t41_cover(const NormedLattice& X, double p, const Vec& b);

// Re-checks simplex, pairing and all 2^n - 1 margins at constant C from scratch.
EmbeddingCertificate validate_certificate(const NormedLattice& X, double p, double C, const Vec& a, const Vec& b,
                                          const Vec& d, double epsilon);

T41Result t41_check(const NormedLattice& X, double p, double C, const Vec& a, double epsilon, long budget,
                    std::uint64_t seed);

void check_covering(const CoveringFamily& cov, std::size_t n);

// Xstar is the lattice carrying the dual norm (e.g. example54_dual).
double c42_bound(const NormedLattice& Xstar, double p, const Vec& b, const CoveringFamily& cov);

double example54_closed_form(double p);  // (3 2^{p*} / (2 (1 + 2^{p*})))^{1/p*}

struct Example54Report {
    double p = 0.0;
    double p_star = 0.0;
    double lower_estimate_constant = 0.0;  // brute force over disjoint positive families in R^3
    std::vector<Vec> lower_estimate_witness;
    bool lower_estimate_check = false;
    double c42 = 0.0;
    double closed_form = 0.0;
    double c42_error = 0.0;
    bool c42_check = false;
    bool exceeds_one = false;
    double gamma = 0.0;            // general upper bound for the embedding constant
    double symmetric_min_C = 0.0;  // smallest grid C certified by t41 at the symmetric direction
    bool symmetric_C1_certified = false;  // expected false: C = 1 is below the c42 bound
    bool pass = false;
};

Example54Report reproduce_example54(double p, long budget = 10000, std::uint64_t seed = 0);

}  // namespace llab
