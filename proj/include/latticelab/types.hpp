#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace llab {

using Vec = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Conjugate exponent; 1 <-> infinity exactly.
inline double conj(double p)
{
    if (p == 1.0) return kInf;
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

inline double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

enum class Side { lower, upper, exact };

std::string to_string(Side s);

struct ConstantEstimate {
    double value = 0.0;
    Side side = Side::lower;
    std::vector<Vec> witness;
    long budget = 0;
    std::uint64_t seed = 0;
};

struct NormValue {
    double value = 0.0;
    Side side = Side::exact;
};

struct AtomicMeasure {
    Vec weights;

    std::size_t dim() const { return weights.size(); }
    double total() const;
    bool counting() const;
    static AtomicMeasure counting_measure(std::size_t n) { return {Vec(n, 1.0)}; }
};

// l_p norm on finite sequences, 1 <= p <= infinity.
struct SeqNorm {
    double p = 2.0;

    double operator()(const Vec& t) const;
    SeqNorm dual() const { return {conj(p)}; }
};

double lp_norm(const Vec& x, double p);
double dot(const Vec& a, const Vec& b);
Vec abs(const Vec& x);

// Deterministic per-trial stream: the same (seed, index) always yields the same numbers.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    double uniform(double lo = 0.0, double hi = 1.0);
    double normal();
    std::size_t index(std::size_t n);
    bool coin(double prob = 0.5) { return uniform() < prob; }
    Vec normal_vec(std::size_t n);
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Worker count from LATTICE_LAB_THREADS (0 or unset = hardware concurrency).
unsigned thread_count();

}  // namespace llab
