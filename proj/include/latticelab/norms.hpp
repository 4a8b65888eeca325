#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "latticelab/body.hpp"
#include "latticelab/types.hpp"

namespace llab {

struct NormSpec;
using NormPtr = std::shared_ptr<const NormSpec>;

struct NormedLattice {
    std::size_t dim = 0;
    NormPtr norm;
};

struct LpSpec {
    double p = 2.0;
};
// ||.||_[r] on a weighted atomic measure, 1 <= r < p
struct LorentzPInfSpec {
    double p = 2.0;
    double r = 1.0;
    AtomicMeasure measure;
};
struct LorentzQ1Spec {
    double q = 2.0;
    AtomicMeasure measure;
};
// max of block norms over consecutive coordinate blocks
struct LinfSumSpec {
    std::vector<NormedLattice> blocks;
};
// outer norm (Lp or LorentzPInf on #blocks atoms) of the vector of block norms
struct BlockLorentzSpec {
    NormPtr outer;
    std::vector<NormedLattice> blocks;
};
struct Example54DualSpec {
    double p = 2.0;
};
struct PredualOfSpec {
    NormPtr inner;
};
struct GaugeOfSpec {
    SolidConvexBody body;
};

struct NormSpec {
    std::variant<LpSpec, LorentzPInfSpec, LorentzQ1Spec, LinfSumSpec, BlockLorentzSpec, Example54DualSpec,
                 PredualOfSpec, GaugeOfSpec>
        v;
};

NormPtr make_lp(double p);
NormPtr make_lorentz_pinf(double p, double r, AtomicMeasure mu);
NormPtr make_lorentz_q1(double q, AtomicMeasure mu);
NormPtr make_linf_sum(std::vector<NormedLattice> blocks);
NormPtr make_block_lorentz(NormPtr outer, std::vector<NormedLattice> blocks);
NormPtr make_example54_dual(double p);
NormPtr make_predual_of(NormPtr inner);
NormPtr make_gauge_of(SolidConvexBody body);

NormedLattice lp_lattice(std::size_t n, double p);

std::string kind_name(const NormSpec& s);

// Validation failure; path is a JSON-pointer into the lattice document.
class SpecError : public std::invalid_argument {
public:
    SpecError(std::string path, const std::string& msg)
        : std::invalid_argument(path + ": " + msg), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

void validate(const NormedLattice& X, const std::string& path = "");

NormValue eval_norm_flagged(const NormedLattice& X, const Vec& x);
double eval_norm(const NormedLattice& X, const Vec& x);

// sup{<x,b> : ||x||_X <= 1}: closed form, greedy or LP where available, ascent otherwise.
NormValue dual_value(const NormedLattice& X, const Vec& b);

ConstantEstimate eval_dual_norm(const NormedLattice& X, const Vec& b, long budget, std::uint64_t seed);

// Lattice whose norm is the dual norm of X.
NormedLattice dual_lattice(const NormedLattice& X);

// b >= 0 with dual_value(X,b) = 1 and <|x|,b> as close to ||x|| as the search gets.
Vec norming_functional(const NormedLattice& X, const Vec& x, std::uint64_t seed = 0);

// max of <|x|,|b|>/N(|x|) over x by multistart compass search; a lower bound for the dual norm.
NormValue dual_by_ascent(const std::function<double(const Vec&)>& N, const Vec& b, std::uint64_t seed,
                         std::size_t starts = 32, Vec* argmax = nullptr);

double example54_dual_norm(const Vec& b, double p);

Vec sigma_apply(const SeqNorm& sigma, const std::vector<Vec>& xs);
SeqNorm sigma_dual(const SeqNorm& sigma);

using Matrix = std::vector<Vec>;  // row-major, rows = codomain dim

struct LinOperator {
    Matrix m;
    NormedLattice domain;
    NormedLattice codomain;

    std::size_t rows() const { return m.size(); }
    std::size_t cols() const { return m.empty() ? domain.dim : m.front().size(); }
    Vec apply(const Vec& x) const;
    LinOperator adjoint() const;
};

Matrix identity_matrix(std::size_t n);
Matrix transpose(const Matrix& a);
Matrix diagonal(const Vec& d);
Vec matvec(const Matrix& a, const Vec& x);

}  // namespace llab
