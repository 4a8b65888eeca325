#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "latticelab/constants.hpp"
#include "latticelab/lorentz.hpp"

using namespace llab;

namespace {

// sup over nonempty atom subsets A of mu(A)^(1/p - 1/r) (sum_A w |f|^r)^(1/r)
double brute_norm_r(const StepFunction& f, double p, double r)
{
    const std::size_t n = f.dim();
    double best = 0.0;
    for (std::uint32_t s = 1; s < (1u << n); ++s) {
        double m = 0.0, acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (s >> i & 1u) {
                m += f.measure.weights[i];
                acc += f.measure.weights[i] * std::pow(std::fabs(f.values[i]), r);
            }
        best = std::max(best, std::pow(m, 1.0 / p - 1.0 / r) * std::pow(acc, 1.0 / r));
    }
    return best;
}

// f*(t) from the definition: inf{lambda : mu{|f| > lambda} <= t}
double fstar(const StepFunction& f, double t)
{
    Vec cand = abs(f.values);
    cand.push_back(0.0);
    std::sort(cand.begin(), cand.end());
    for (double lam : cand) {
        double m = 0.0;
        for (std::size_t i = 0; i < f.dim(); ++i)
            if (std::fabs(f.values[i]) > lam) m += f.measure.weights[i];
        if (m <= t) return lam;
    }
    return 0.0;
}

StepFunction random_step(Rng& rng, std::size_t n, bool counting)
{
    StepFunction f;
    f.values = rng.normal_vec(n);
    for (auto& v : f.values)
        if (rng.coin(0.2)) v = std::round(v);
    f.measure = AtomicMeasure::counting_measure(n);
    if (!counting)
        for (auto& w : f.measure.weights) w = rng.uniform(0.1, 2.0);
    return f;
}

}  // namespace

TEST_CASE("rearrange: documented cases")
{
    RearrangedStep a = rearrange(StepFunction::counting({1.0, 3.0, 2.0}));
    CHECK(a.v == Vec{3.0, 2.0, 1.0});
    CHECK(a.T == Vec{1.0, 2.0, 3.0});
    RearrangedStep b = rearrange(StepFunction::counting({1.0, 1.0}));
    CHECK(b.v == Vec{1.0});
    CHECK(b.T == Vec{2.0});
    RearrangedStep c = rearrange(StepFunction{{2.0, 1.0}, AtomicMeasure{{0.5, 2.0}}});
    CHECK(c.v == Vec{2.0, 1.0});
    CHECK(c.T == Vec{0.5, 2.5});
}

TEST_CASE("rearrange matches the definition of f* and preserves the integral")
{
    for (int k = 0; k < 200; ++k) {
        Rng rng(1, static_cast<std::uint64_t>(k));
        StepFunction f = random_step(rng, 1 + rng.index(8), k % 2 == 0);
        RearrangedStep r = rearrange(f);
        for (std::size_t j = 1; j < r.v.size(); ++j) {
            CHECK(r.v[j] < r.v[j - 1]);
            CHECK(r.T[j] > r.T[j - 1]);
        }
        double integral = 0.0, prev = 0.0;
        for (std::size_t j = 0; j < r.v.size(); ++j) {
            double mid = 0.5 * (prev + r.T[j]);
            CHECK(fstar(f, mid) == doctest::Approx(r.v[j]).epsilon(1e-14));
            integral += r.v[j] * (r.T[j] - prev);
            prev = r.T[j];
        }
        double direct = 0.0;
        for (std::size_t i = 0; i < f.dim(); ++i) direct += f.measure.weights[i] * std::fabs(f.values[i]);
        CHECK(std::fabs(integral - direct) <= 1e-12 * (1.0 + direct));
    }
}

TEST_CASE("quasinorm: documented values")
{
    CHECK(quasinorm_pinfty(StepFunction::counting({1.0, 1.0, 1.0, 1.0}), 2.0) == doctest::Approx(2.0));
    CHECK(quasinorm_pinfty(StepFunction::counting({3.0, 1.0}), 2.0) == doctest::Approx(3.0));
    for (double p : {1.5, 2.0, 4.0})
        for (std::size_t n : {1u, 5u, 40u}) {
            StepFunction a;
            for (std::size_t k = 0; k < n; ++k) a.values.push_back(alpha_coefficient(k, p));
            a.measure = AtomicMeasure::counting_measure(n);
            CHECK(quasinorm_pinfty(a, p) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(norm_pinfty_r(a, p, 1.0).value == doctest::Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("quasinorm is rearrangement invariant")
{
    for (int k = 0; k < 100; ++k) {
        Rng rng(2, static_cast<std::uint64_t>(k));
        StepFunction f = random_step(rng, 1 + rng.index(8), false);
        RearrangedStep r = rearrange(f);
        StepFunction g;
        double prev = 0.0;
        for (std::size_t j = 0; j < r.v.size(); ++j) {
            g.values.push_back(r.v[j]);
            g.measure.weights.push_back(r.T[j] - prev);
            prev = r.T[j];
        }
        if (g.values.empty()) continue;
        CHECK(quasinorm_pinfty(g, 2.5) == doctest::Approx(quasinorm_pinfty(f, 2.5)).epsilon(1e-12));
    }
}

TEST_CASE("norm_pinfty_r: documented values and the subset oracle")
{
    CHECK(norm_pinfty_r(StepFunction::counting({3.0, 1.0}), 2.0, 1.0).value == doctest::Approx(3.0));
    for (double m : {0.5, 1.0, 3.0}) {
        StepFunction chi{{1.0}, AtomicMeasure{{m}}};
        CHECK(norm_pinfty_r(chi, 2.0, 1.5).value == doctest::Approx(std::pow(m, 0.5)).epsilon(1e-14));
    }
    CHECK_THROWS(norm_pinfty_r(StepFunction::counting({1.0}), 2.0, 2.0));
    for (int k = 0; k < 300; ++k) {
        Rng rng(3, static_cast<std::uint64_t>(k));
        StepFunction f = random_step(rng, 1 + rng.index(10), false);
        double p = rng.uniform(1.2, 4.0), r = rng.uniform(1.0, p - 0.01);
        NormValue v = norm_pinfty_r(f, p, r);
        CHECK(v.side == Side::exact);
        CHECK(v.value == doctest::Approx(brute_norm_r(f, p, r)).epsilon(1e-12));
    }
}

TEST_CASE("prefix rule equals subset enumeration for counting measure up to dim 12")
{
    for (int k = 0; k < 200; ++k) {
        Rng rng(4, static_cast<std::uint64_t>(k));
        StepFunction f = random_step(rng, 1 + rng.index(12), true);
        double p = rng.uniform(1.2, 4.0), r = rng.uniform(1.0, p - 0.01);
        CHECK(std::fabs(norm_pinfty_r_prefix(f, p, r) - norm_pinfty_r_enumerate(f, p, r)) <= 1e-12);
    }
}

TEST_CASE("norm_q1: closed form against numerical integration")
{
    CHECK(norm_q1(StepFunction{{1.0}, AtomicMeasure{{1.0}}}, 2.0) == doctest::Approx(2.0));
    CHECK(norm_q1(StepFunction::counting({0.0, 0.0}), 2.0) == 0.0);
    CHECK(norm_q1(StepFunction::counting({2.0, 1.0}), 2.0) == doctest::Approx(2.0 + 2.0 * std::sqrt(2.0)));
    for (int k = 0; k < 20; ++k) {
        Rng rng(5, static_cast<std::uint64_t>(k));
        StepFunction f = random_step(rng, 1 + rng.index(5), false);
        double q = rng.uniform(1.2, 4.0);
        // int_0^inf t^(1/q - 1) f*(t) dt, substituting t = s^q so the integrand stays bounded
        double total = f.measure.total(), acc = 0.0;
        const int N = 200000;
        double smax = std::pow(total, 1.0 / q);
        for (int i = 0; i < N; ++i) {
            double s = (i + 0.5) * smax / N;
            acc += q * fstar(f, std::pow(s, q)) * smax / N;
        }
        CHECK(norm_q1(f, q) == doctest::Approx(acc).epsilon(1e-4));
    }
}

TEST_CASE("renorming sandwich")
{
    SandwichReport a = check_renorming_sandwich(StepFunction::counting({3.0, 1.0}), 2.0, 1.0);
    CHECK(a.upper_factor == doctest::Approx(2.0));
    CHECK(a.quasi == doctest::Approx(3.0));
    CHECK(a.norm_r == doctest::Approx(3.0));
    CHECK(a.pass);
    SandwichReport b = check_renorming_sandwich(StepFunction{{1.7}, AtomicMeasure{{0.4}}}, 3.0, 1.5);
    CHECK(b.ratio == doctest::Approx(1.0).epsilon(1e-14));
    for (int k = 0; k < 200; ++k) {
        Rng rng(6, static_cast<std::uint64_t>(k));
        StepFunction f = random_step(rng, 1 + rng.index(12), false);
        for (double p : {1.5, 2.0, 3.0})
            for (double r : {1.0, 1.2, (p + 1.0) / 2.0}) {
                SandwichReport s = check_renorming_sandwich(f, p, r);
                CHECK(s.quasi <= brute_norm_r(f, p, r) + 1e-9);
                CHECK(s.pass);
            }
    }
}

TEST_CASE("lemma A2 instance and weak-Lp embedding examples")
{
    Vec d = lemma_a2_d({0.5, 0.5}, {0.5, 0.5}, 0.5);
    CHECK(d[0] == doctest::Approx(0.5));
    CHECK(d[1] == doctest::Approx(0.5));
    CHECK(lemma_a2_max_violation({0.5, 0.5}, {0.5, 0.5}, 0.5, 100, 0) <= 1e-12);

    EmbeddingLemmaReport one = build_weakLp_embedding(StepFunction::counting({1.0}), 2.0, 1.0);
    CHECK(one.C == doctest::Approx(1.0));
    CHECK(one.multiplier[0] == doctest::Approx(1.0));
    CHECK(one.Sa_norm == doctest::Approx(1.0));
    CHECK(one.pass);

    EmbeddingLemmaReport two = build_weakLp_embedding(StepFunction::counting({0.5, 0.5}), 2.0, 1.5);
    CHECK(two.pass);
    CHECK(two.max_ratio <= 1.0 + 1e-9);
    CHECK(two.Sa_norm >= std::pow(two.C, 1.5) - 1e-9);

    CHECK_THROWS(build_weakLp_embedding(StepFunction::counting({1.0, 0.0}), 2.0, 1.0));
    CHECK_THROWS(build_weakLp_embedding(StepFunction::counting({5.0, 5.0}), 2.0, 1.5));
}

TEST_CASE("embedding construction on random admissible inputs, with an independent probe")
{
    for (int k = 0; k < 20; ++k) {
        Rng rng(7, static_cast<std::uint64_t>(k));
        std::size_t n = 1 + rng.index(5);
        double p = rng.uniform(1.3, 4.0), r = rng.uniform(1.0, p - 0.05);
        StepFunction a;
        for (std::size_t i = 0; i < n; ++i) {
            a.values.push_back(rng.uniform(0.1, 2.0));
            a.measure.weights.push_back(rng.uniform(0.1, 2.0));
        }
        double M = a.measure.total(), ar = 0.0;
        for (std::size_t i = 0; i < n; ++i) ar += a.measure.weights[i] * std::pow(a.values[i], r);
        double C = std::pow(M, 1.0 / p - 1.0 / r) * std::pow(ar, 1.0 / r);
        for (auto& v : a.values) v *= 0.9 / C;
        EmbeddingLemmaReport e = build_weakLp_embedding(a, p, r, 500, static_cast<std::uint64_t>(k));
        CHECK(e.pass);
        CHECK(e.C == doctest::Approx(0.9).epsilon(1e-12));
        // sum beta = C^r and sum b = 1, so the mixture d has mass (1 - s) C^r + s
        double sd = 0.0;
        for (double v : e.d) sd += v;
        CHECK(sd == doctest::Approx((1.0 - e.s) * std::pow(0.9, r) + e.s).epsilon(1e-12));
        for (int t = 0; t < 100; ++t) {
            Rng r2(70 + k, static_cast<std::uint64_t>(t));
            Vec f = r2.normal_vec(n);
            StepFunction src{f, a.measure}, img{Vec(n), e.nu};
            for (std::size_t i = 0; i < n; ++i) img.values[i] = e.multiplier[i] * f[i];
            CHECK(brute_norm_r(img, p, 1.0) <= brute_norm_r(src, p, r) + 1e-9);
        }
    }
}

TEST_CASE("isometry probe stays below the norm")
{
    IsometryProbe pr = embedding_isometry_probe(StepFunction::counting({2.0, 1.0, 0.5}), 2.0, 1.5);
    CHECK(pr.best <= pr.norm_g + 1e-9);
    CHECK(pr.family_size == 7);
}
