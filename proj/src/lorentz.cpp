#include "latticelab/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace llab {

StepFunction StepFunction::counting(Vec v)
{
    StepFunction f;
    f.measure = AtomicMeasure::counting_measure(v.size());
    f.values = std::move(v);
    return f;
}

namespace {

void check_shape(const StepFunction& f)
{
    if (f.values.size() != f.measure.weights.size())
        throw std::invalid_argument("step function: values and weights differ in length");
    for (double w : f.measure.weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("step function: weights must be positive");
}

void check_exponents(double p, double r)
{
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("lorentz: p must lie in (1, inf)");
    if (!(r >= 1.0)) throw std::invalid_argument("lorentz: r must be >= 1");
    if (!(r < p)) throw std::invalid_argument("lorentz: r must be < p");
}

std::vector<std::size_t> order_by_modulus(const Vec& v)
{
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return std::fabs(v[a]) > std::fabs(v[b]); });
    return idx;
}

double subset_value(double mass, double mass_fr, double p, double r)
{
    if (mass_fr <= 0.0) return 0.0;
    return std::pow(mass, 1.0 / p - 1.0 / r) * std::pow(mass_fr, 1.0 / r);
}

}  // namespace

RearrangedStep rearrange(const StepFunction& f)
{
    check_shape(f);
    RearrangedStep out;
    auto idx = order_by_modulus(f.values);
    double cum = 0.0;
    for (std::size_t i : idx) {
        double a = std::fabs(f.values[i]);
        if (a == 0.0) break;
        cum += f.measure.weights[i];
        if (!out.v.empty() && out.v.back() == a) {
            out.T.back() = cum;
        } else {
            out.v.push_back(a);
            out.T.push_back(cum);
        }
    }
    return out;
}

double quasinorm_pinfty(const StepFunction& f, double p)
{
    auto rs = rearrange(f);
    double best = 0.0;
    for (std::size_t k = 0; k < rs.v.size(); ++k) best = std::max(best, std::pow(rs.T[k], 1.0 / p) * rs.v[k]);
    return best;
}

double norm_pinfty_r_prefix(const StepFunction& f, double p, double r)
{
    check_shape(f);
    check_exponents(p, r);
    auto idx = order_by_modulus(f.values);
    double mass = 0.0, mfr = 0.0, best = 0.0;
    for (std::size_t i : idx) {
        mass += f.measure.weights[i];
        mfr += std::pow(std::fabs(f.values[i]), r) * f.measure.weights[i];
        best = std::max(best, subset_value(mass, mfr, p, r));
    }
    return best;
}

double norm_pinfty_r_enumerate(const StepFunction& f, double p, double r)
{
    check_shape(f);
    check_exponents(p, r);
    const std::size_t n = f.dim();
    if (n > 20) throw std::invalid_argument("lorentz: subset enumeration limited to dim <= 20");
    if (n == 0) return 0.0;
    Vec fr(n);
    for (std::size_t i = 0; i < n; ++i) fr[i] = std::pow(std::fabs(f.values[i]), r) * f.measure.weights[i];
    const auto& w = f.measure.weights;
    double best = 0.0;
    const std::uint32_t full = (1u << n);
    if (n <= 16) {
        for (std::uint32_t s = 1; s < full; ++s) {
            double mass = 0.0, mfr = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (s & (1u << i)) {
                    mass += w[i];
                    mfr += fr[i];
                }
            best = std::max(best, subset_value(mass, mfr, p, r));
        }
        return best;
    }
    // Gray-code walk for the larger cases
    double mass = 0.0, mfr = 0.0;
    std::uint32_t prev = 0;
    for (std::uint32_t k = 1; k < full; ++k) {
        std::uint32_t g = k ^ (k >> 1);
        std::uint32_t flip = g ^ prev;
        std::size_t i = static_cast<std::size_t>(__builtin_ctz(flip));
        double sgn = (g & flip) ? 1.0 : -1.0;
        mass += sgn * w[i];
        mfr += sgn * fr[i];
        prev = g;
        best = std::max(best, subset_value(mass, std::max(0.0, mfr), p, r));
    }
    return best;
}

NormValue norm_pinfty_r(const StepFunction& f, double p, double r)
{
    check_shape(f);
    check_exponents(p, r);
    if (f.measure.counting()) return {norm_pinfty_r_prefix(f, p, r), Side::exact};
    if (f.dim() <= 20) return {norm_pinfty_r_enumerate(f, p, r), Side::exact};
    return {norm_pinfty_r_prefix(f, p, r), Side::lower};
}

double norm_q1(const StepFunction& f, double q)
{
    if (!(q > 1.0) || !std::isfinite(q)) throw std::invalid_argument("lorentz: q must lie in (1, inf)");
    auto rs = rearrange(f);
    double s = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < rs.v.size(); ++k) {
        double cur = std::pow(rs.T[k], 1.0 / q);
        s += rs.v[k] * (cur - prev);
        prev = cur;
    }
    return q * s;
}

double dual_norm_pinfty_1(const Vec& b, const AtomicMeasure& mu, double p)
{
    if (b.size() != mu.dim()) throw std::invalid_argument("dual norm: dimension mismatch");
    const double ps = conj(p);
    Vec density(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) density[i] = std::fabs(b[i]) / mu.weights[i];
    auto idx = order_by_modulus(density);
    double mass = 0.0, prev = 0.0, s = 0.0;
    for (std::size_t i : idx) {
        if (density[i] == 0.0) break;
        mass += mu.weights[i];
        double cur = std::pow(mass, 1.0 / ps);
        s += density[i] * (cur - prev);
        prev = cur;
    }
    return s;
}

double dual_norm_q1(const Vec& b, const AtomicMeasure& mu, double q)
{
    const std::size_t n = b.size();
    if (n != mu.dim()) throw std::invalid_argument("dual norm: dimension mismatch");
    double best = 0.0;
    if (mu.counting()) {
        auto idx = order_by_modulus(b);
        double mass = 0.0, s = 0.0;
        for (std::size_t i : idx) {
            mass += 1.0;
            s += std::fabs(b[i]);
            best = std::max(best, s / (q * std::pow(mass, 1.0 / q)));
        }
        return best;
    }
    if (n > 20) throw std::invalid_argument("dual norm: weighted enumeration limited to dim <= 20");
    for (std::uint32_t set = 1; set < (1u << n); ++set) {
        double mass = 0.0, s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (set & (1u << i)) {
                mass += mu.weights[i];
                s += std::fabs(b[i]);
            }
        best = std::max(best, s / (q * std::pow(mass, 1.0 / q)));
    }
    return best;
}

std::vector<Vec> pinfty_1_ball_vertices(const AtomicMeasure& mu, double p)
{
    const std::size_t n = mu.dim();
    if (n > 7) throw std::invalid_argument("ball vertices: limited to dim <= 7");
    const double ps = conj(p);
    std::vector<Vec> out;
    std::vector<std::size_t> seq;
    std::vector<char> used(n, 0);
    Vec x(n, 0.0);
    std::function<void(double, double)> rec = [&](double mass, double prev) {
        if (!seq.empty()) out.push_back(x);
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            double m2 = mass + mu.weights[i];
            double cur = std::pow(m2, 1.0 / ps);
            used[i] = 1;
            seq.push_back(i);
            x[i] = (cur - prev) / mu.weights[i];
            rec(m2, cur);
            x[i] = 0.0;
            seq.pop_back();
            used[i] = 0;
        }
    };
    rec(0.0, 0.0);
    return out;
}

SandwichReport check_renorming_sandwich(const StepFunction& f, double p, double r)
{
    check_exponents(p, r);
    SandwichReport rep;
    rep.quasi = quasinorm_pinfty(f, p);
    rep.norm_r = norm_pinfty_r(f, p, r).value;
    rep.ratio = rep.quasi > 0.0 ? rep.norm_r / rep.quasi : 1.0;
    rep.upper_factor = std::pow(p / (p - r), 1.0 / r);
    double prev = 0.0;
    for (int k = 0; k < 10; ++k) {
        double rk = 1.0 + (p - 1.0) * k / 10.0;
        double v = norm_pinfty_r(f, p, rk).value;
        if (v < prev - 1e-12 * (1.0 + prev)) rep.monotone_in_r = false;
        prev = v;
    }
    rep.pass = rep.quasi <= rep.norm_r + 1e-9 && rep.norm_r <= rep.upper_factor * rep.quasi + 1e-9 &&
               rep.monotone_in_r;
    return rep;
}

Vec lemma_a2_d(const Vec& beta, const Vec& b, double s)
{
    if (beta.size() != b.size()) throw std::invalid_argument("lemma A2: dimension mismatch");
    Vec d(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) d[i] = (1.0 - s) * beta[i] + s * b[i];
    return d;
}

double lemma_a2_max_violation(const Vec& beta, const Vec& b, double s, int samples, std::uint64_t seed)
{
    Vec d = lemma_a2_d(beta, b, s);
    double worst = -kInf;
    for (int k = 0; k < samples; ++k) {
        Rng rng(seed, static_cast<std::uint64_t>(k));
        Vec x(b.size());
        for (auto& v : x) v = rng.coin(0.2) ? 0.0 : rng.uniform(0.0, 1.0);
        double alpha = std::pow(dot(beta, x), 1.0 - s) * std::pow(dot(b, x), s);
        worst = std::max(worst, alpha - dot(d, x));
    }
    return worst;
}

namespace {

struct EmbeddingData {
    double M, s, C;
    Vec b, beta, d, mult;
};

EmbeddingData embedding_data(const StepFunction& a, double p, double r)
{
    const std::size_t n = a.dim();
    EmbeddingData e;
    e.M = a.measure.total();
    e.b.resize(n);
    e.beta.resize(n);
    double lr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = a.measure.weights[i];
        e.b[i] = w / e.M;
        e.beta[i] = std::pow(e.M, r / p - 1.0) * w * std::pow(a.values[i], r);
        lr += w * std::pow(a.values[i], r);
    }
    e.C = std::pow(e.M, 1.0 / p - 1.0 / r) * std::pow(lr, 1.0 / r);
    e.s = conj(p) * (1.0 / r - 1.0 / p);
    e.d = lemma_a2_d(e.beta, e.b, e.s);
    e.mult.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        e.mult[i] = std::pow(e.M, r / p) * std::pow(a.values[i], r - 1.0) * e.b[i] / e.d[i];
    return e;
}

}  // namespace

EmbeddingLemmaReport build_weakLp_embedding(const StepFunction& a, double p, double r, int samples,
                                            std::uint64_t seed)
{
    check_shape(a);
    check_exponents(p, r);
    const std::size_t n = a.dim();
    if (n == 0) throw std::invalid_argument("embedding: empty step function");
    for (double v : a.values)
        if (!(v > 0.0)) throw std::invalid_argument("embedding: values of a must be strictly positive");
    EmbeddingData e = embedding_data(a, p, r);
    if (e.C > 1.0 + 1e-12) throw std::domain_error("embedding: C > 1");

    EmbeddingLemmaReport rep;
    rep.M = e.M;
    rep.b = e.b;
    rep.beta = e.beta;
    rep.s = e.s;
    rep.d = e.d;
    rep.nu = AtomicMeasure{e.d};
    rep.multiplier = e.mult;
    rep.C = e.C;

    auto image = [&](const Vec& f) {
        StepFunction g{Vec(n), rep.nu};
        for (std::size_t i = 0; i < n; ++i) g.values[i] = e.mult[i] * f[i];
        return g;
    };
    rep.Sa_norm = norm_pinfty_r(image(a.values), p, 1.0).value;

    double worst_gap = -kInf;
    auto probe = [&](const Vec& f) {
        StepFunction src{f, a.measure};
        double nf = norm_pinfty_r(src, p, r).value;
        double ns = norm_pinfty_r(image(f), p, 1.0).value;
        ++rep.probes;
        if (nf > 0.0 && ns / nf > rep.max_ratio) {
            rep.max_ratio = ns / nf;
            rep.worst_probe = f;
        }
        worst_gap = std::max(worst_gap, ns - nf);
    };
    if (n <= 6) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i) total *= 3;
        for (std::size_t code = 1; code < total; ++code) {
            Vec pat(n), scaled(n);
            std::size_t c = code;
            for (std::size_t i = 0; i < n; ++i) {
                pat[i] = static_cast<double>(c % 3) - 1.0;
                c /= 3;
                scaled[i] = pat[i] * a.values[i];
            }
            probe(pat);
            probe(scaled);
        }
    }
    for (int k = 0; k < std::max(samples, 500); ++k) {
        Rng rng(seed, static_cast<std::uint64_t>(k));
        Vec f(n);
        for (auto& v : f) v = rng.coin(0.25) ? 0.0 : rng.normal() * rng.uniform(0.1, 3.0);
        probe(f);
    }
    rep.lemma_a2_violation = lemma_a2_max_violation(e.beta, e.b, e.s, 100, seed);
    rep.pass = worst_gap <= 1e-9 && rep.Sa_norm >= std::pow(e.C, r) - 1e-9 && rep.lemma_a2_violation <= 1e-12;
    return rep;
}

IsometryProbe embedding_isometry_probe(const StepFunction& g, double p, double r)
{
    check_shape(g);
    check_exponents(p, r);
    const std::size_t n = g.dim();
    if (n > 12) throw std::invalid_argument("isometry probe: limited to dim <= 12");
    IsometryProbe out;
    out.norm_g = norm_pinfty_r(g, p, r).value;
    if (out.norm_g == 0.0) return out;
    Vec h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = std::fabs(g.values[i]) / out.norm_g;
    for (std::uint32_t set = 1; set < (1u << n); ++set) {
        StepFunction f;
        std::vector<std::size_t> atoms;
        for (std::size_t i = 0; i < n; ++i)
            if ((set & (1u << i)) && h[i] > 0.0) {
                atoms.push_back(i);
                f.values.push_back(h[i]);
                f.measure.weights.push_back(g.measure.weights[i]);
            }
        if (atoms.size() != static_cast<std::size_t>(__builtin_popcount(set))) continue;
        EmbeddingData e = embedding_data(f, p, r);
        if (e.C > 1.0 + 1e-12) continue;
        StepFunction img{Vec(atoms.size()), AtomicMeasure{e.d}};
        for (std::size_t k = 0; k < atoms.size(); ++k) img.values[k] = e.mult[k] * h[atoms[k]];
        out.best = std::max(out.best, norm_pinfty_r(img, p, 1.0).value);
        ++out.family_size;
    }
    return out;
}

}  // namespace llab
