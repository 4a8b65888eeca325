#include "latticelab/types.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace llab {

std::string to_string(Side s)
{
    switch (s) {
    case Side::lower: return "lower";
    case Side::upper: return "upper";
    case Side::exact: return "exact";
    }
    return "lower";
}

double AtomicMeasure::total() const
{
    double t = 0.0;
    for (double w : weights) t += w;
    return t;
}

bool AtomicMeasure::counting() const
{
    return std::all_of(weights.begin(), weights.end(), [](double w) { return w == 1.0; });
}

double lp_norm(const Vec& x, double p)
{
    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    if (m == 0.0) return 0.0;
    if (std::isinf(p)) return m;
    if (p == 1.0) {
        double s = 0.0;
        for (double v : x) s += std::fabs(v);
        return s;
    }
    if (p == 2.0) {
        double s = 0.0;
        for (double v : x) {
            double r = v / m;
            s += r * r;
        }
        return m * std::sqrt(s);
    }
    double s = 0.0;
    for (double v : x) s += std::pow(std::fabs(v) / m, p);
    return m * std::pow(s, 1.0 / p);
}

double SeqNorm::operator()(const Vec& t) const { return lp_norm(t, p); }

double dot(const Vec& a, const Vec& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec abs(const Vec& x)
{
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = std::fabs(x[i]);
    return r;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    // splitmix64 finalizer over the pair
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : eng_(mix_seed(seed, stream)) {}

double Rng::uniform(double lo, double hi)
{
    // 53 random bits, so the stream does not depend on the standard library's distribution code
    double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

double Rng::normal()
{
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

std::size_t Rng::index(std::size_t n) { return static_cast<std::size_t>(uniform() * n) % n; }

Vec Rng::normal_vec(std::size_t n)
{
    Vec v(n);
    for (auto& x : v) x = normal();
    return v;
}

unsigned thread_count()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LATTICE_LAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(std::min<long>(v, 256));
    }
    return hw;
}

}  // namespace llab
