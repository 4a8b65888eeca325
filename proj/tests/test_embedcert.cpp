#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "latticelab/constants.hpp"
#include "latticelab/embedcert.hpp"

using namespace llab;

namespace {

// max over the distinguished index i of (|b_i|^s + (|b_j| + |b_k|)^s)^(1/s), s = p*
double ex54_dual(const Vec& b, double p)
{
    const double s = conj(p);
    double best = 0.0;
    for (int i = 0; i < 3; ++i) {
        double rest = std::fabs(b[(i + 1) % 3]) + std::fabs(b[(i + 2) % 3]);
        best = std::max(best, std::pow(std::pow(std::fabs(b[i]), s) + std::pow(rest, s), 1.0 / s));
    }
    return best;
}

double ex54_bound_power(double p)
{
    double t = std::pow(2.0, conj(p));
    return 3.0 * t / (2.0 * (1.0 + t));
}

Vec normalized_positive(Rng& rng, std::size_t n, double p)
{
    Vec a(n);
    for (auto& v : a) v = rng.uniform(0.05, 1.0);
    double na = lp_norm(a, p);
    for (auto& v : a) v /= na;
    return a;
}

// Independent re-check of a certificate on l_p: simplex, pairing, every subset margin.
bool revalidate_lp(const EmbeddingCertificate& c, double p, std::size_t n)
{
    const double s = conj(p);
    double sd = 0.0;
    for (double v : c.d) {
        if (v < -1e-12) return false;
        sd += v;
    }
    if (std::fabs(sd - 1.0) > 1e-9) return false;
    if (!(dot(c.a, c.b) > 1.0 - c.epsilon)) return false;
    for (std::uint32_t set = 1; set < (1u << n); ++set) {
        Vec bI(n, 0.0);
        double dI = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (set >> i & 1u) {
                bI[i] = c.b[i];
                dI += c.d[i];
            }
        if (std::pow(lp_norm(bI, s), s) - std::pow(c.C, s) * dI > 1e-9) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("t41 on l_p^2 at a = e1")
{
    for (double p : {1.5, 2.0, 3.0}) {
        T41Result r = t41_check(lp_lattice(2, p), p, 1.0, {1.0, 0.0}, 1e-6, 2000, 1);
        REQUIRE(r.certified);
        CHECK(r.certificate.b[0] == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(r.certificate.b[1] == doctest::Approx(0.0).epsilon(1e-6));
        CHECK(r.certificate.d[0] == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(r.certificate.valid);
        CHECK(revalidate_lp(r.certificate, p, 2));
    }
}

TEST_CASE("t41 on 2-dim lattices with constant-1 upper p-estimate, C = 1")
{
    for (int k = 0; k < 20; ++k) {
        Rng rng(41, static_cast<std::uint64_t>(k));
        double p = rng.uniform(1.3, 3.5);
        Vec a = normalized_positive(rng, 2, p);
        T41Result r = t41_check(lp_lattice(2, p), p, 1.0, a, 1e-6, 2000, static_cast<std::uint64_t>(k));
        CHECK(r.certified);
        if (r.certified) CHECK(revalidate_lp(r.certificate, p, 2));
    }
}

TEST_CASE("certificates revalidate and stay valid at a larger constant")
{
    for (int k = 0; k < 10; ++k) {
        Rng rng(42, static_cast<std::uint64_t>(k));
        std::size_t n = 2 + rng.index(3);
        double p = rng.uniform(1.3, 3.5);
        Vec a = normalized_positive(rng, n, p);
        NormedLattice X = lp_lattice(n, p);
        T41Result r = t41_check(X, p, 1.0 + 1e-4, a, 1e-6, 2000, static_cast<std::uint64_t>(k));
        REQUIRE(r.certified);
        const EmbeddingCertificate& c = r.certificate;
        CHECK(c.subset_margins.size() == (1u << n) - 1);
        CHECK(c.max_margin <= 1e-9);
        CHECK(revalidate_lp(c, p, n));
        EmbeddingCertificate again = validate_certificate(X, p, c.C, c.a, c.b, c.d, c.epsilon);
        CHECK(again.valid);
        CHECK(again.max_margin == doctest::Approx(c.max_margin).epsilon(1e-12));
        for (double bigger : {1.01, 1.5, 3.0}) {
            EmbeddingCertificate up = validate_certificate(X, p, bigger, c.a, c.b, c.d, c.epsilon);
            CHECK(up.valid);
            CHECK(up.max_margin <= c.max_margin + 1e-12);
        }
    }
}

TEST_CASE("t41 input errors")
{
    CHECK_THROWS(t41_check(lp_lattice(2, 2.0), 2.0, 1.0, {2.0, 0.0}, 1e-6, 10, 0));
    CHECK_THROWS(t41_check(lp_lattice(2, 2.0), 2.0, 0.5, {1.0, 0.0}, 1e-6, 10, 0));
}

TEST_CASE("covering validation")
{
    CHECK_NOTHROW(check_covering({{{0, 1}, {0, 2}, {1, 2}}, 2}, 3));
    CHECK_NOTHROW(check_covering({{{0}, {1}, {2}}, 1}, 3));
    CHECK_THROWS(check_covering({{{0, 1}, {1, 2}}, 1}, 3));
    CHECK_THROWS(check_covering({{{0, 1}, {0, 2}, {1, 2}}, 1}, 3));
    CHECK_THROWS(check_covering({{{0, 3}}, 1}, 3));
}

TEST_CASE("c42 bound")
{
    NormedLattice Xs{3, make_example54_dual(2.0)};
    CoveringFamily pairs{{{0, 1}, {0, 2}, {1, 2}}, 2};
    double c = 1.0 / std::sqrt(5.0);
    CHECK(c42_bound(Xs, 2.0, {c, c, c}, pairs) == doctest::Approx(std::sqrt(1.2)).epsilon(1e-12));

    CoveringFamily singles{{{0}, {1}, {2}}, 1};
    for (int k = 0; k < 50; ++k) {
        Rng rng(43, static_cast<std::uint64_t>(k));
        double p = rng.uniform(1.2, 4.0);
        NormedLattice Y{3, make_example54_dual(p)};
        Vec b{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
        double nb = ex54_dual(b, p);
        for (auto& v : b) v /= nb;
        CHECK(c42_bound(Y, p, b, singles) <= 1.0 + 1e-9);
        // independent evaluation of the pair-covering sum
        const double s = conj(p);
        double sum = 0.0;
        for (const auto& I : pairs.sets) {
            Vec bI(3, 0.0);
            for (std::size_t i : I) bI[i] = b[i];
            sum += std::pow(ex54_dual(bI, p), s);
        }
        CHECK(c42_bound(Y, p, b, pairs) == doctest::Approx(std::pow(sum / 2.0, 1.0 / s)).epsilon(1e-12));
        CHECK(c42_bound(Y, p, {1.0, 0.0, 0.0}, pairs) <= 1.0 + 1e-9);
    }
    CHECK_THROWS(c42_bound(Xs, 2.0, {1.0, 1.0, 1.0}, pairs));
    CHECK_THROWS(c42_bound(Xs, 2.0, {c, c, c}, CoveringFamily{{{0, 1}}, 1}));
}

TEST_CASE("three-dimensional example closed form")
{
    CHECK(example54_closed_form(2.0) == doctest::Approx(std::sqrt(1.2)).epsilon(1e-14));
    CHECK(std::pow(example54_closed_form(4.0 / 3.0), 4.0) == doctest::Approx(24.0 / 17.0).epsilon(1e-12));
    for (double p = 1.05; p < 50.0; p *= 1.2) {
        double v = std::pow(example54_closed_form(p), conj(p));
        CHECK(v == doctest::Approx(ex54_bound_power(p)).epsilon(1e-12));
        CHECK(v > 1.0);
        CHECK(v < 1.5);
    }
    // tends to 3/2 as p -> 1+ and to 1 as p -> infinity
    CHECK(std::pow(example54_closed_form(1.0 + 1e-3), conj(1.0 + 1e-3)) == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(std::pow(example54_closed_form(1e6), conj(1e6)) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("reproduce the three-dimensional example")
{
    for (double p : {4.0 / 3.0, 2.0, 4.0}) {
        Example54Report r = reproduce_example54(p, 2000, 1);
        CHECK(r.lower_estimate_constant == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(r.lower_estimate_check);
        CHECK(r.c42 == doctest::Approx(example54_closed_form(p)).epsilon(1e-9));
        CHECK(r.exceeds_one);
        CHECK(r.gamma == doctest::Approx(llab::gamma(p)).epsilon(1e-14));
        CHECK_FALSE(r.symmetric_C1_certified);
        CHECK(r.symmetric_min_C <= r.gamma);
        CHECK(r.pass);

        // the covering inequality must hold for the certificate's own functional
        NormedLattice X{3, make_predual_of(make_example54_dual(p))};
        Vec a(3, 1.0);
        double na = eval_norm(X, a);
        for (auto& v : a) v /= na;
        T41Result t = t41_check(X, p, r.symmetric_min_C, a, 1e-3, 200, 1);
        REQUIRE(t.certified);
        const Vec& b = t.certificate.b;
        CHECK(ex54_dual(b, p) <= r.symmetric_min_C + 1e-9);
        CHECK(dot(a, b) > 1.0 - 1e-3);
        const double s = conj(p);
        double sum = 0.0;
        for (const auto& I : std::vector<std::vector<int>>{{0, 1}, {0, 2}, {1, 2}}) {
            Vec bI(3, 0.0);
            for (int i : I) bI[i] = b[i];
            sum += std::pow(ex54_dual(bI, p), s);
        }
        CHECK(sum <= 2.0 * std::pow(r.symmetric_min_C, s) + 1e-9);
    }
}
