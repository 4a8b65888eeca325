#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "latticelab/constants.hpp"
#include "latticelab/convexgeom.hpp"
#include "latticelab/reports.hpp"

using namespace llab;

namespace {

SolidConvexBody random_body(Rng& rng, std::size_t n, std::size_t k)
{
    SolidConvexBody B{n, {}};
    for (std::size_t i = 0; i < k; ++i) {
        Vec g(n);
        for (auto& v : g) v = rng.coin(0.2) ? 0.0 : rng.uniform(0.1, 2.0);
        g[rng.index(n)] = rng.uniform(0.5, 2.0);
        B.add(g);
    }
    return B;
}

// y in tB, decided by a grid over lambda in the simplex (two generators, dim 2)
bool grid_contains(const SolidConvexBody& B, const Vec& y, double t, int steps)
{
    for (int i = 0; i <= steps; ++i)
        for (int j = 0; i + j <= steps; ++j) {
            double l0 = t * i / steps, l1 = t * j / steps;
            bool ok = true;
            for (std::size_t c = 0; c < 2; ++c)
                ok = ok && l0 * std::fabs(B.generators[0][c]) + l1 * std::fabs(B.generators[1][c]) >= std::fabs(y[c]) - 1e-12;
            if (ok) return true;
        }
    return false;
}

double bisect_gauge(const SolidConvexBody& B, const Vec& y)
{
    double lo = 0.0, hi = 1.0;
    auto scaled = [&](double t) {
        Vec z(y);
        for (auto& v : z) v /= t;
        return body_contains(B, z);
    };
    while (!scaled(hi)) hi *= 2.0;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (mid > 0.0 && scaled(mid) ? hi : lo) = mid;
    }
    return hi;
}

double gauge_norm(const LinOperator& T, const SolidConvexBody& body, const Vec& x)
{
    return gauge(body, T.apply(x));
}

}  // namespace

TEST_CASE("gauge: documented cases and the bisection oracle")
{
    CHECK(gauge(SolidConvexBody{2, {{1.0, 1.0}}}, {2.0, 0.0}) == doctest::Approx(2.0));
    SolidConvexBody diag{2, {{1.0, 0.0}, {0.0, 1.0}}};
    CHECK(gauge(diag, {1.0, 1.0}) == doctest::Approx(2.0));
    CHECK(std::fabs(bisect_gauge(diag, {1.0, 1.0}) - 2.0) <= 1e-7);
    CHECK(std::isinf(gauge(SolidConvexBody{2, {{1.0, 0.0}}}, {0.0, 1.0})));
    for (int k = 0; k < 40; ++k) {
        Rng rng(21, static_cast<std::uint64_t>(k));
        std::size_t n = 2 + rng.index(3);
        SolidConvexBody B = random_body(rng, n, 1 + rng.index(5));
        for (const Vec& g : B.generators) CHECK(gauge(B, g) <= 1.0 + 1e-9);
        Vec y = rng.normal_vec(n);
        double v = gauge(B, y);
        if (std::isinf(v)) continue;
        CHECK(std::fabs(bisect_gauge(B, y) - v) <= 1e-7 * std::max(1.0, v));
    }
}

TEST_CASE("gauge against a lambda-grid membership oracle")
{
    for (int k = 0; k < 20; ++k) {
        Rng rng(22, static_cast<std::uint64_t>(k));
        SolidConvexBody B{2, {{rng.uniform(0.2, 2.0), rng.uniform(0.0, 2.0)}, {rng.uniform(0.0, 2.0), rng.uniform(0.2, 2.0)}}};
        Vec y = rng.normal_vec(2);
        double v = gauge(B, y);
        CHECK(grid_contains(B, y, v * 1.01, 400));
        CHECK_FALSE(grid_contains(B, y, v * 0.99, 400));
    }
}

TEST_CASE("gauge LP dual certificate")
{
    for (int k = 0; k < 40; ++k) {
        Rng rng(23, static_cast<std::uint64_t>(k));
        std::size_t n = 2 + rng.index(3);
        SolidConvexBody B = random_body(rng, n, 2 + rng.index(4));
        Vec y = rng.normal_vec(n);
        GaugeResult r = gauge_lp(B, y);
        if (std::isinf(r.value)) continue;
        double s = 0.0;
        for (double l : r.lambda) {
            CHECK(l >= -1e-12);
            s += l;
        }
        CHECK(s == doctest::Approx(r.value).epsilon(1e-9));
        for (const Vec& g : B.generators) CHECK(dot(r.mu, abs(g)) <= 1.0 + 1e-9);
        CHECK(dot(r.mu, abs(y)) == doctest::Approx(r.value).epsilon(1e-9));
    }
}

TEST_CASE("gauge is a lattice norm on the span")
{
    Rng rng0(24, 0);
    SolidConvexBody B = random_body(rng0, 3, 5);
    for (int k = 0; k < 1000; ++k) {
        Rng rng(24, static_cast<std::uint64_t>(k + 1));
        Vec x = rng.normal_vec(3), y = rng.normal_vec(3);
        double c = rng.uniform(0.0, 5.0);
        Vec cx(x), s(3), dom(3);
        for (std::size_t i = 0; i < 3; ++i) {
            cx[i] *= c;
            s[i] = x[i] + y[i];
            dom[i] = x[i] * rng.uniform(0.0, 1.0);
        }
        double gx = gauge(B, x), gy = gauge(B, y);
        CHECK(gauge(B, cx) == doctest::Approx(c * gx).epsilon(1e-9));
        CHECK(gauge(B, s) <= gx + gy + 1e-9);
        CHECK(gauge(B, dom) <= gx + 1e-9);
    }
}

TEST_CASE("support function: closed form and sampling oracle")
{
    CHECK(support_function(SolidConvexBody{2, {{1.0, 1.0}}}, {1.0, -2.0}) == doctest::Approx(3.0));
    CHECK(support_function(SolidConvexBody{2, {{1.0, 1.0}}}, {0.0, 0.0}) == 0.0);
    for (int k = 0; k < 20; ++k) {
        Rng rng(25, static_cast<std::uint64_t>(k));
        std::size_t n = 2 + rng.index(3);
        SolidConvexBody B = random_body(rng, n, 1 + rng.index(4));
        Vec b = rng.normal_vec(n);
        double h = support_function(B, b), best = 0.0;
        for (int s = 0; s < 10000; ++s) {
            Vec lam(B.generators.size());
            double tot = 0.0;
            for (auto& l : lam) tot += (l = -std::log(rng.uniform(1e-12, 1.0)));
            Vec y(n, 0.0);
            for (std::size_t g = 0; g < lam.size(); ++g)
                for (std::size_t i = 0; i < n; ++i) y[i] += lam[g] / tot * std::fabs(B.generators[g][i]);
            for (std::size_t i = 0; i < n; ++i) y[i] *= (b[i] < 0 ? -1.0 : 1.0) * rng.uniform(0.9, 1.0);
            best = std::max(best, dot(y, b));
        }
        CHECK(h >= best - 1e-12);
        CHECK(best >= 0.85 * h);
        double extreme = 0.0;
        for (const Vec& g : B.generators) extreme = std::max(extreme, dot(abs(g), abs(b)));
        CHECK(h == doctest::Approx(extreme).epsilon(1e-12));
    }
}

TEST_CASE("bipolar containment of generators")
{
    Rng rng0(26, 0);
    SolidConvexBody B = random_body(rng0, 3, 4);
    int polar = 0;
    for (int k = 0; k < 2000; ++k) {
        Rng rng(26, static_cast<std::uint64_t>(k + 1));
        Vec b = rng.normal_vec(3);
        if (support_function(B, b) > 1.0) continue;
        ++polar;
        for (const Vec& g : B.generators) CHECK(std::fabs(dot(g, b)) <= 1.0 + 1e-12);
    }
    CHECK(polar > 0);
}

TEST_CASE("prune_dominated keeps the body")
{
    SolidConvexBody B{2, {{1.0, 1.0}, {0.5, -1.0}, {0.0, 2.0}}};
    SolidConvexBody before = B;
    prune_dominated(B);
    CHECK(B.generators.size() == 2);
    for (int k = 0; k < 50; ++k) {
        Rng rng(27, static_cast<std::uint64_t>(k));
        Vec y = rng.normal_vec(2);
        CHECK(gauge(B, y) == doctest::Approx(gauge(before, y)).epsilon(1e-9));
    }
}

TEST_CASE("C body examples")
{
    LinOperator one{identity_matrix(1), lp_lattice(1, 2.0), lp_lattice(1, 2.0)};
    CBody c1 = build_C_body(one, SeqNorm{2.0}, SeqNorm{kInf}, 100, 1);
    for (double t : {0.5, 1.0, -3.0}) CHECK(gauge(c1.body, {t}) == doctest::Approx(std::fabs(t)).epsilon(1e-9));

    LinOperator id2{identity_matrix(2), lp_lattice(2, 2.0), lp_lattice(2, 2.0)};
    CBody c2 = build_C_body(id2, SeqNorm{2.0}, SeqNorm{2.0}, 400, 2);
    for (const Vec& g : c2.body.generators) CHECK(lp_norm(g, 2.0) <= 1.0 + 1e-9);
    CPricer pricer(id2.m, id2.domain, SeqNorm{2.0}, SeqNorm{2.0});
    for (int k = 0; k < 200; ++k) {
        Rng rng(28, static_cast<std::uint64_t>(k));
        Vec x = rng.normal_vec(2);
        double nx = lp_norm(x, 2.0);
        for (auto& v : x) v /= nx;
        CHECK(refined_gauge(c2, pricer, x, static_cast<std::uint64_t>(k)).value <= 1.0 + 1e-6);
    }

    // the generators lie in K times the codomain ball, K the (2, inf)-convexity constant of T
    Matrix T{{1.0, 0.5}, {0.0, 1.0}};
    LinOperator op{T, lp_lattice(2, 2.0), lp_lattice(2, 1.0)};
    CBody c3 = build_C_body(op, SeqNorm{2.0}, SeqNorm{kInf}, 200, 3);
    ConstantEstimate K = estimate_constant(op, ConstantKind::convex(2.0, kInf), 400, 3);
    double worst = 0.0;
    for (const Vec& g : c3.body.generators) worst = std::max(worst, lp_norm(g, 1.0));
    CHECK(worst <= K.value + 1e-6);
}

TEST_CASE("D violation search")
{
    LinOperator one{identity_matrix(1), lp_lattice(1, 1.0), lp_lattice(1, 1.0)};
    for (double q : {1.0, 2.0, 4.0}) {
        DViolation d = search_D_violation(one, {1.0}, SeqNorm{q}, SeqNorm{1.0}, 200, 1);
        CHECK(d.rho_lower == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(d.in_D);
        // exhaustive split grid: pieces w_i with sum w_i <= 1 give l_q(w) <= 1
        double grid = 0.0;
        for (int i = 0; i <= 100; ++i) {
            double w = i / 100.0;
            grid = std::max(grid, lp_norm(Vec{w, 1.0 - w}, q));
        }
        CHECK(d.rho_lower >= grid - 1e-9);
    }
    DViolation z = search_D_violation(one, {0.0}, SeqNorm{2.0}, SeqNorm{1.0}, 50, 1);
    CHECK(z.in_D);
    CHECK(z.rho_lower == 0.0);

    LinOperator op{Matrix{{2.0, 1.0}, {0.0, 1.0}}, lp_lattice(2, 2.0), lp_lattice(2, 1.5)};
    DViolation a = search_D_violation(op, {0.3, -0.7}, SeqNorm{2.0}, SeqNorm{kInf}, 200, 5);
    DViolation b = search_D_violation(op, {0.9, -2.1}, SeqNorm{2.0}, SeqNorm{kInf}, 200, 5);
    CHECK(b.rho_lower == doctest::Approx(3.0 * a.rho_lower).epsilon(1e-9));
}

TEST_CASE("polarity")
{
    LinOperator one{identity_matrix(1), lp_lattice(1, 2.0), lp_lattice(1, 2.0)};
    PolarityReport r1 = verify_polarity(one, SeqNorm{2.0}, SeqNorm{kInf}, 10, 200, 1);
    CHECK(r1.pass);
    CHECK(r1.max_abs_gap <= 1e-6);

    LinOperator d{diagonal({2.0, 1.0}), lp_lattice(2, 2.0), lp_lattice(2, 2.0)};
    PolarityReport r2 = verify_polarity(d, SeqNorm{2.0}, SeqNorm{2.0}, 20, 2000, 2);
    CHECK(r2.pass);
    CHECK(r2.max_rho_inside <= 1.0 + 1e-6);

    LinOperator zero{Matrix{{0.0, 0.0}, {0.0, 0.0}}, lp_lattice(2, 2.0), lp_lattice(2, 2.0)};
    PolarityReport r3 = verify_polarity(zero, SeqNorm{2.0}, SeqNorm{2.0}, 10, 100, 3);
    CHECK(r3.pass);
    CHECK(r3.inside_C_polar == r3.samples);
    CHECK(r3.with_D_violation == 0);
}

TEST_CASE("minimal factorization")
{
    for (double p : {1.5, 2.0}) {
        LinOperator id{identity_matrix(2), lp_lattice(2, p), lp_lattice(2, p)};
        FactorizationReport f = build_minimal_factorization(id, SeqNorm{p}, SeqNorm{p}, 200, 1, 100);
        CHECK(f.pass);
        CHECK(f.basis_error <= 1e-12);
        for (int k = 0; k < 100; ++k) {
            Rng rng(29, static_cast<std::uint64_t>(k));
            Vec x = rng.normal_vec(2);
            CHECK(gauge_norm(f.U, f.body, x) == doctest::Approx(lp_norm(x, p)).epsilon(1e-3));
        }
    }

    LinOperator rank1{Matrix{{1.0, 2.0}, {2.0, 4.0}}, lp_lattice(2, 2.0), lp_lattice(2, 2.0)};
    FactorizationReport r = build_minimal_factorization(rank1, SeqNorm{2.0}, SeqNorm{kInf}, 200, 2, 50);
    CHECK(to_json(r)["span_dim"] == 1);
    CHECK(r.basis_error <= 1e-12);

    Matrix T{{1.0, -0.5, 0.2}, {0.3, 1.0, 0.0}};
    LinOperator op{T, lp_lattice(3, 2.0), lp_lattice(2, 1.0)};
    FactorizationReport u = build_minimal_factorization(op, SeqNorm{2.0}, SeqNorm{kInf}, 200, 3, 200);
    CHECK(u.basis_error <= 1e-12);
    CHECK(u.convexity_ratio_max <= 1.0 + 1e-6);
    CHECK(u.pass);
}

TEST_CASE("interpolation exponents")
{
    InterpolationExponents a = interpolation_exponents(0.5, 2.0, 2.0, 2.0, 1.0);
    CHECK(a.p_theta == doctest::Approx(4.0 / 3.0));
    CHECK(a.q_theta == doctest::Approx(4.0));
    for (double th : {0.1, 0.3, 0.7}) {
        InterpolationExponents b = interpolation_exponents(th, 3.0, 2.5, kInf, 2.5);
        CHECK(1.0 / b.p_theta == doctest::Approx(th / 3.0 + (1.0 - th)));
        CHECK(b.q_theta == doctest::Approx(2.5 / th));
    }
    CHECK_THROWS(interpolation_exponents(0.5, 2.0, 2.0, 3.0, 1.0));
    CHECK_THROWS(interpolation_exponents(1.5, 2.0, 2.0, 2.0, 1.0));
}

TEST_CASE("interpolation of bodies")
{
    SolidConvexBody ball{2, {}};
    for (int k = 0; k <= 16; ++k) {
        double t = 0.5 * M_PI * k / 16.0;
        ball.add({std::cos(t), std::sin(t)});
    }
    InterpolationReport same = interpolate_theta(ball, ball, 0.4, 2.0, 2.0, 2.0, 1.0, 0, 1);
    for (const Vec& g : ball.generators) CHECK(gauge(same.C_theta, g) <= 1.0 + 1e-9);
    for (int k = 0; k < 50; ++k) {
        Rng rng(30, static_cast<std::uint64_t>(k));
        Vec y = rng.normal_vec(2);
        CHECK(gauge(same.C_theta, y) == doctest::Approx(gauge(ball, y)).epsilon(1e-9));
    }

    SolidConvexBody C0{2, {{1.0, 0.2}, {0.1, 1.0}}}, C1{2, {{2.0, 0.5}, {0.3, 0.4}, {0.0, 1.5}}};
    InterpolationReport small = interpolate_theta(C0, C1, 0.5, 2.0, 2.0, 2.0, 1.0, 10, 4);
    InterpolationReport large = interpolate_theta(C0, C1, 0.5, 2.0, 2.0, 2.0, 1.0, 40, 4);
    CHECK(small.pass);
    CHECK(large.pass);
    int in_small = 0, in_large = 0;
    for (int k = 0; k < 500; ++k) {
        Rng rng(31, static_cast<std::uint64_t>(k));
        Vec y{rng.uniform(0.0, 1.5), rng.uniform(0.0, 1.5)};
        double gs = gauge(small.C_theta, y), gl = gauge(large.C_theta, y);
        CHECK(gl <= gs + 1e-9);
        in_small += gs <= 1.0;
        in_large += gl <= 1.0;
    }
    CHECK(in_large >= in_small);
}
