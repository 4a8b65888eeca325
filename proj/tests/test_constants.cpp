#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "latticelab/constants.hpp"
#include "latticelab/convexgeom.hpp"

using namespace llab;

namespace {

LinOperator identity_on(const NormedLattice& X) { return {identity_matrix(X.dim), X, X}; }

Vec e(std::size_t n, std::size_t i, double v = 1.0)
{
    Vec x(n, 0.0);
    x[i] = v;
    return x;
}

std::vector<Vec> random_family(Rng& rng, std::size_t n, std::size_t len)
{
    std::vector<Vec> f;
    for (std::size_t k = 0; k < len; ++k) f.push_back(rng.normal_vec(n));
    return f;
}

}  // namespace

TEST_CASE("ratio: documented families")
{
    std::vector<Vec> basis3{e(3, 0), e(3, 1), e(3, 2)};
    CHECK(ratio(identity_on(lp_lattice(3, 1.0)), ConstantKind::upper_estimate(2.0), basis3) ==
          doctest::Approx(std::sqrt(3.0)));
    CHECK(ratio(identity_on(lp_lattice(2, 2.0)), ConstantKind::convex(2.0, 2.0), {e(2, 0), e(2, 1)}) ==
          doctest::Approx(1.0));
    for (int k = 0; k < 50; ++k) {
        Rng rng(11, static_cast<std::uint64_t>(k));
        std::vector<Vec> fam;
        for (std::size_t i = 0; i < 4; ++i)
            if (rng.coin(0.7)) fam.push_back(e(4, i, rng.normal()));
        if (fam.empty()) fam.push_back(e(4, 0));
        CHECK(ratio(identity_on(lp_lattice(4, kInf)), ConstantKind::upper_estimate(1.7), fam) <= 1.0 + 1e-12);
    }
    CHECK_THROWS(ratio(identity_on(lp_lattice(2, 1.0)), ConstantKind::upper_estimate(2.0), {Vec{1, 1}, Vec{1, 0}}));
    CHECK_THROWS(ratio(identity_on(lp_lattice(2, 1.0)), ConstantKind::convex(2.0, 2.0), {Vec{0, 0}}));
}

TEST_CASE("ratio: concave kind is the reciprocal shape")
{
    // identity on l_1, Concave(1,1): (sum ||x_i||_1) / || sum |x_i| ||_1 = 1 for any family
    for (int k = 0; k < 30; ++k) {
        Rng rng(12, static_cast<std::uint64_t>(k));
        auto fam = random_family(rng, 3, 2 + rng.index(3));
        CHECK(ratio(identity_on(lp_lattice(3, 1.0)), ConstantKind::concave_kind(1.0, 1.0), fam) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("estimate_constant: closed forms")
{
    ConstantEstimate a = estimate_constant(identity_on(lp_lattice(3, 1.0)), ConstantKind::upper_estimate(2.0), 200, 1);
    CHECK(a.value == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
    CHECK(a.side == Side::exact);
    for (double p : {1.5, 2.0, 3.0}) {
        ConstantEstimate b = estimate_constant(identity_on(lp_lattice(4, p)), ConstantKind::upper_estimate(p), 200, 2);
        CHECK(b.value <= 1.0 + 1e-9);
        CHECK(b.value >= 1.0 - 1e-9);
    }
}

TEST_CASE("estimate_constant: weighted [1]-norm has upper p-estimate constant 1")
{
    for (int k = 0; k < 50; ++k) {
        Rng rng(13, static_cast<std::uint64_t>(k));
        std::size_t n = 2 + rng.index(4);
        double p = rng.uniform(1.3, 4.0);
        AtomicMeasure mu;
        for (std::size_t i = 0; i < n; ++i) mu.weights.push_back(rng.uniform(0.2, 3.0));
        NormedLattice X{n, make_lorentz_pinf(p, 1.0, mu)};
        ConstantEstimate c = estimate_constant(identity_on(X), ConstantKind::upper_estimate(p), 60,
                                               static_cast<std::uint64_t>(k));
        CHECK(c.value <= 1.0 + 1e-9);
        CHECK(c.side == Side::lower);
    }
}

TEST_CASE("estimate_constant against a 2-dim angle-grid oracle")
{
    // In dim 2 a disjoint family is (a e1, b e2), so the upper p-estimate constant is
    // max(1, sup_t ||(cos t, sin t)||_X / (||cos t e1||_X^p + ||sin t e2||_X^p)^(1/p)).
    for (double q : {1.5, 3.0}) {
        NormedLattice X{2, make_lorentz_q1(q, AtomicMeasure{{0.7, 1.9}})};
        const double p = 2.5;
        double oracle = 1.0;
        for (int i = 0; i <= 200000; ++i) {
            double t = 0.5 * M_PI * i / 200000.0;
            Vec x{std::cos(t), std::sin(t)};
            double a = eval_norm(X, Vec{x[0], 0.0}), b = eval_norm(X, Vec{0.0, x[1]});
            oracle = std::max(oracle, eval_norm(X, x) / lp_norm(Vec{a, b}, p));
        }
        ConstantEstimate c = estimate_constant(identity_on(X), ConstantKind::upper_estimate(p), 200, 3);
        CHECK(c.value == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("witness re-evaluates and the search is seed deterministic")
{
    Matrix T{{1.0, 2.0, 0.0}, {0.5, -1.0, 1.0}};
    LinOperator op{T, lp_lattice(3, 2.0), lp_lattice(2, 1.0)};
    for (const ConstantKind& kind :
         {ConstantKind::convex(2.0, kInf), ConstantKind::convex(1.5, 3.0), ConstantKind::concave_kind(3.0, 1.0)}) {
        ConstantEstimate a = estimate_constant(op, kind, 150, 7);
        ConstantEstimate b = estimate_constant(op, kind, 150, 7);
        REQUIRE(!a.witness.empty());
        CHECK(std::fabs(ratio(op, kind, a.witness) - a.value) <= 1e-9);
        CHECK(a.value == b.value);
        CHECK(a.witness == b.witness);
    }
}

TEST_CASE("ratio is monotone in the inner exponent")
{
    Matrix T{{1.0, 0.3}, {-0.2, 1.4}, {0.5, 0.5}};
    LinOperator op{T, lp_lattice(2, 3.0), lp_lattice(3, 1.5)};
    for (int k = 0; k < 200; ++k) {
        Rng rng(14, static_cast<std::uint64_t>(k));
        auto fam = random_family(rng, 2, 1 + rng.index(5));
        for (double p : {1.0, 2.0, 3.0})
            CHECK(ratio(op, ConstantKind::convex(p, p), fam) >= ratio(op, ConstantKind::convex(p, kInf), fam) - 1e-12);
    }
}

TEST_CASE("gamma")
{
    CHECK(llab::gamma(2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    // (p*)^(1/p*) increases while p* < e and decreases after, tending to 1 at both ends
    const double peak = std::exp(1.0) / (std::exp(1.0) - 1.0);
    CHECK(llab::gamma(peak) == doctest::Approx(std::exp(1.0 / std::exp(1.0))).epsilon(1e-14));
    double prev = 1.0;
    for (double p = 1.01; p < 20.0; p *= 1.1) {
        double g = llab::gamma(p);
        CHECK(g > 1.0);
        CHECK(g <= llab::gamma(peak));
        if (p < peak) CHECK(g > prev);
        if (p / 1.1 > peak) CHECK(g < prev);
        CHECK(std::fabs(g - llab::gamma_alt(p)) <= 1e-12 * g);
        CHECK(std::fabs(g - std::pow(1.0 - 1.0 / p, 1.0 / p - 1.0)) <= 1e-12 * g);
        prev = g;
    }
    CHECK(llab::gamma(1.0 + 1e-6) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(llab::gamma(1e6) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK_THROWS(llab::gamma(1.0));
    CHECK_THROWS(llab::gamma(kInf));
}

TEST_CASE("set partitions are counted by Bell numbers")
{
    const std::size_t bell[] = {1, 1, 2, 5, 15, 52, 203};
    for (std::size_t n = 1; n <= 6; ++n) CHECK(set_partitions(n).size() == bell[n]);
}

TEST_CASE("q-convexity bound")
{
    QConvexReport a = check_q_convexity_bound(lp_lattice(3, 2.0), 1.0, 100, 1);
    CHECK(a.bound == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(a.estimate.value <= 1.0 + 1e-9);
    CHECK(a.pass);
    for (int k = 0; k < 5; ++k) {
        Rng rng(15, static_cast<std::uint64_t>(k));
        std::size_t n = 2 + rng.index(3);
        AtomicMeasure mu;
        for (std::size_t i = 0; i < n; ++i) mu.weights.push_back(rng.uniform(0.2, 3.0));
        double p = rng.uniform(1.5, 3.5), q = rng.uniform(1.0, p - 0.2);
        QConvexReport r = check_q_convexity_bound(NormedLattice{n, make_lorentz_pinf(p, 1.0, mu)}, q, 60,
                                                  static_cast<std::uint64_t>(k));
        CHECK(r.estimate.value <= r.bound + 1e-6);
        CHECK(r.renormed_max_ratio <= 1.0 + 1e-9);
        CHECK(r.renormed_families >= 100);
        CHECK(r.pass);
    }
    CHECK_THROWS(check_q_convexity_bound(lp_lattice(2, 2.0), 2.0, 10, 0));
}

TEST_CASE("lpinfty(lp) example")
{
    CHECK(lpinfty_A(2.0, 2) == doctest::Approx(std::sqrt(1.0 + std::pow(std::sqrt(2.0) - 1.0, 2))).epsilon(1e-14));
    CHECK(lpinfty_A(2.0, 32) > lpinfty_A(2.0, 4));
    for (double p : {1.5, 2.0, 3.0}) {
        const std::size_t n = 6;
        NormedLattice X = lpinfty_lp_lattice(p, n);
        // cyclic shifts of alpha in block-then-coordinate layout, rebuilt here independently
        Vec vee(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            Vec x(n * n);
            for (std::size_t blk = 0; blk < n; ++blk)
                for (std::size_t j = 0; j < n; ++j)
                    x[blk * n + j] = (j == i) ? alpha_coefficient((blk + i) % n, p) : 0.0;
            CHECK(eval_norm(X, x) == doctest::Approx(1.0).epsilon(1e-9));
            for (std::size_t c = 0; c < x.size(); ++c) vee[c] = std::max(vee[c], std::fabs(x[c]));
        }
        double A = 0.0;
        for (std::size_t j = 0; j < n; ++j) A += std::pow(alpha_coefficient(j, p), p);
        A = std::pow(A, 1.0 / p);
        CHECK(eval_norm(X, vee) / std::pow(static_cast<double>(n), 1.0 / p) == doctest::Approx(A).epsilon(1e-9));
        LpinftyReport r = reproduce_lpinfty_lp(p, n);
        CHECK(r.A_n == doctest::Approx(A).epsilon(1e-12));
        CHECK(r.unit_norm_check);
        CHECK(r.ratio_check);
        CHECK(r.growth_increasing);
        CHECK(r.pass);
    }
}

TEST_CASE("duality gap")
{
    DualityGapReport id = duality_gap({identity_matrix(2), lp_lattice(2, 2.0), lp_lattice(2, 2.0)}, SeqNorm{2.0},
                                      SeqNorm{2.0}, 200, 1);
    CHECK(id.L1.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(id.L2.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(id.pass);

    LinOperator d{diagonal({2.0, 1.0}), lp_lattice(2, 2.0), lp_lattice(2, 2.0)};
    DualityGapReport g = duality_gap(d, SeqNorm{2.0}, SeqNorm{kInf}, 200, 2);
    CHECK(g.oracle);
    CHECK(g.gap <= 5e-2);
    CHECK(g.pass);

    LinOperator d3{diagonal({6.0, 3.0}), lp_lattice(2, 2.0), lp_lattice(2, 2.0)};
    DualityGapReport g3 = duality_gap(d3, SeqNorm{2.0}, SeqNorm{kInf}, 200, 2);
    CHECK(g3.L1.value == doctest::Approx(3.0 * g.L1.value).epsilon(1e-9));
    CHECK(g3.L2.value == doctest::Approx(3.0 * g.L2.value).epsilon(1e-9));

    LinOperator bad{identity_matrix(2), NormedLattice{2, make_example54_dual(2.0)}, lp_lattice(2, 2.0)};
    CHECK_THROWS(duality_gap(bad, SeqNorm{2.0}, SeqNorm{2.0}, 10, 0));
}

TEST_CASE("upper p-estimate of a minimal-factorization gauge lattice")
{
    Matrix T{{1.0, 0.5}, {0.0, 1.0}};
    for (double p : {1.5, 2.0}) {
        LinOperator op{T, lp_lattice(2, p), lp_lattice(2, 1.0)};
        FactorizationReport f = build_minimal_factorization(op, SeqNorm{p}, SeqNorm{kInf}, 100, 3, 50);
        REQUIRE(f.Y.dim > 0);
        ConstantEstimate c = estimate_constant(identity_on(f.Y), ConstantKind::upper_estimate(p), 60, 4);
        CHECK(c.value <= 1.0 + 1e-6);
    }
}
