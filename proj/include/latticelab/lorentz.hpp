#pragma once

#include <cstdint>
#include <vector>

#include "latticelab/types.hpp"

namespace llab {

struct StepFunction {
    Vec values;
    AtomicMeasure measure;

    std::size_t dim() const { return values.size(); }
    static StepFunction counting(Vec v);
};

// Distinct moduli in strictly decreasing order; T[k] = measure of {|f| >= v[k]}.
struct RearrangedStep {
    Vec v;
    Vec T;
};

RearrangedStep rearrange(const StepFunction& f);

double quasinorm_pinfty(const StepFunction& f, double p);

// ||f||_[r]. Counting measure: prefix of the sorted moduli (exact). Unequal weights:
// subset enumeration up to dim 20 (exact), beyond that the prefix rule as a lower bound.
NormValue norm_pinfty_r(const StepFunction& f, double p, double r);
double norm_pinfty_r_enumerate(const StepFunction& f, double p, double r);
double norm_pinfty_r_prefix(const StepFunction& f, double p, double r);

double norm_q1(const StepFunction& f, double q);

// Dual of the [1]-norm on weights w: greedy over the polymatroid of set functions mu(A)^(1/p*).
double dual_norm_pinfty_1(const Vec& b, const AtomicMeasure& mu, double p);

// Dual of norm_q1: max over atom subsets A of sum_A |b| / (q mu(A)^(1/q)); exact up to dim 20.
double dual_norm_q1(const Vec& b, const AtomicMeasure& mu, double q);

// Extreme points of the positive part of the [1]-norm unit ball (greedy vertices over
// ordered subsets). Feasible up to dim 7.
std::vector<Vec> pinfty_1_ball_vertices(const AtomicMeasure& mu, double p);

struct SandwichReport {
    double quasi = 0.0;
    double norm_r = 0.0;
    double ratio = 0.0;
    double upper_factor = 0.0;
    bool monotone_in_r = true;
    bool pass = false;
};

SandwichReport check_renorming_sandwich(const StepFunction& f, double p, double r);

Vec lemma_a2_d(const Vec& beta, const Vec& b, double s);
// Largest alpha(x) - d.x over sampled x in the positive orthant (should be <= 0).
double lemma_a2_max_violation(const Vec& beta, const Vec& b, double s, int samples, std::uint64_t seed);

struct EmbeddingLemmaReport {
    double M = 0.0;
    Vec b;
    Vec beta;
    double s = 0.0;
    Vec d;
    AtomicMeasure nu;
    Vec multiplier;
    double C = 0.0;
    double Sa_norm = 0.0;
    double max_ratio = 0.0;  // largest ||Sf|| / ||f|| over probes
    Vec worst_probe;
    long probes = 0;
    double lemma_a2_violation = 0.0;
    bool pass = false;
};

EmbeddingLemmaReport build_weakLp_embedding(const StepFunction& a, double p, double r, int samples = 500,
                                            std::uint64_t seed = 0);

// Applies the embeddings built from every restriction g|_I (all nonempty atom subsets) to g and
// reports max_I ||S_I g|| next to ||g||_[r]. A finite-family proxy; it never certifies isometry.
struct IsometryProbe {
    double norm_g = 0.0;
    double best = 0.0;
    std::size_t family_size = 0;
};
IsometryProbe embedding_isometry_probe(const StepFunction& g, double p, double r);

}  // namespace llab
