#include "latticelab/embedcert.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latticelab/constants.hpp"
#include "latticelab/search.hpp"
#include "latticelab/simplex.hpp"

namespace llab {

namespace {

constexpr std::size_t kMaxDim = 12;

Vec restrict_to(const Vec& b, unsigned mask)
{
    Vec r(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i)
        if (mask & (1u << i)) r[i] = std::fabs(b[i]);
    return r;
}

std::vector<std::size_t> members(unsigned mask, std::size_t n)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) out.push_back(i);
    return out;
}

// ||b_I||_{X*}^{p*} for every nonempty I, indexed by mask - 1
Vec subset_powers(const NormedLattice& X, double ps, const Vec& b, Side* side)
{
    const std::size_t n = b.size();
    const unsigned full = (1u << n) - 1u;
    Vec c(full);
    for (unsigned mask = 1; mask <= full; ++mask) {
        NormValue v = dual_value(X, restrict_to(b, mask));
        if (side && v.side != Side::exact) *side = v.side;
        c[mask - 1] = std::pow(v.value, ps);
    }
    return c;
}

CoverValue cover_from_powers(const Vec& c, std::size_t n)
{
    const unsigned full = (1u << n) - 1u;
    LpProblem lp;
    lp.c = c;
    for (std::size_t i = 0; i < n; ++i) {
        Vec row(full, 0.0);
        for (unsigned mask = 1; mask <= full; ++mask)
            if (mask & (1u << i)) row[mask - 1] = 1.0;
        lp.add(std::move(row), Rel::le, 1.0);
    }
    LpResult r = solve_lp(lp);
    if (r.status != LpStatus::optimal) throw std::runtime_error("t41: packing LP failed");
    CoverValue out;
    out.V = r.value;
    out.d.assign(n, 0.0);
    if (!(out.V > 0.0)) return out;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (out.d[i] = std::max(0.0, r.dual[i]));
    for (auto& v : out.d) v /= s;
    return out;
}

}  // namespace

CoverValue t41_cover(const NormedLattice& X, double p, const Vec& b)
{
    if (b.size() != X.dim) throw std::invalid_argument("t41: dimension mismatch");
    return cover_from_powers(subset_powers(X, conj(p), b, nullptr), b.size());
}

EmbeddingCertificate validate_certificate(const NormedLattice& X, double p, double C, const Vec& a, const Vec& b,
                                          const Vec& d, double epsilon)
{
    const std::size_t n = X.dim;
    if (a.size() != n || b.size() != n || d.size() != n) throw std::invalid_argument("certificate: dimension mismatch");
    EmbeddingCertificate cert;
    cert.C = C;
    cert.p = p;
    cert.a = a;
    cert.b = b;
    cert.d = d;
    cert.epsilon = epsilon;
    const double ps = conj(p);
    const double Cp = std::pow(C, ps);
    double dsum = 0.0;
    bool simplex = true;
    for (double v : d) {
        dsum += v;
        simplex = simplex && v >= 0.0;
    }
    simplex = simplex && std::fabs(dsum - 1.0) <= 1e-9;
    bool positive = std::all_of(b.begin(), b.end(), [](double v) { return v >= 0.0; });
    cert.pairing = dot(a, b);
    Vec c = subset_powers(X, ps, b, nullptr);
    cert.max_margin = -kInf;
    const unsigned full = (1u << n) - 1u;
    for (unsigned mask = 1; mask <= full; ++mask) {
        double dI = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) dI += d[i];
        double m = c[mask - 1] - Cp * dI;
        cert.subset_margins.push_back({members(mask, n), m});
        cert.max_margin = std::max(cert.max_margin, m);
    }
    cert.valid = simplex && positive && cert.pairing > 1.0 - epsilon && cert.max_margin <= 1e-9;
    return cert;
}

T41Result t41_check(const NormedLattice& X, double p, double C, const Vec& a, double epsilon, long budget,
                    std::uint64_t seed)
{
    validate(X);
    const std::size_t n = X.dim;
    if (n > kMaxDim) throw std::invalid_argument("t41: dim must be <= 12");
    if (a.size() != n) throw std::invalid_argument("t41: a has the wrong length");
    if (!(C >= 1.0)) throw std::invalid_argument("t41: C must be >= 1");
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("t41: p must lie in (1, inf)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("t41: epsilon must be positive");
    for (double v : a)
        if (!(v >= 0.0)) throw std::invalid_argument("t41: a must be nonnegative");
    T41Result res;
    NormValue an = eval_norm_flagged(X, a);
    res.a_norm = an.value;
    res.a_norm_side = an.side;
    if (std::fabs(an.value - 1.0) > 1e-6) throw std::invalid_argument("t41: a must be normalized (||a|| = 1)");

    const double ps = conj(p);
    Side side = Side::exact;
    auto E = [&](const Vec& bh) {
        Vec b = abs(bh);
        double num = dot(a, b);
        if (!(num > 0.0)) return -kInf;
        CoverValue cv = cover_from_powers(subset_powers(X, ps, b, &side), n);
        if (!(cv.V > 0.0)) return -kInf;
        ++res.evals;
        return num / std::pow(cv.V, 1.0 / ps);
    };

    std::vector<Vec> starts;
    starts.push_back(norming_functional(X, a, seed));
    starts.push_back(a);
    starts.push_back(Vec(n, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] > 0.0) {
            Vec e(n, 0.0);
            e[i] = 1.0;
            starts.push_back(e);
        }
    for (int k = 0; k < 2; ++k) {
        Rng rng(seed, static_cast<std::uint64_t>(k));
        starts.push_back(abs(rng.normal_vec(n)));
    }
    const long per = std::max<long>(100, budget / static_cast<long>(starts.size()));
    double best = -kInf;
    Vec bestb;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        double v0 = E(starts[k]);
        double v = v0;
        Vec x = starts[k];
        if (C * v0 <= 1.0 - epsilon) {
            PatternOptions opt;
            opt.step = 0.25;
            opt.tol = 1e-10;
            opt.max_evals = per;
            opt.seed = mix_seed(seed, 0x41 + k);
            auto r = pattern_maximize(E, starts[k], opt);
            v = r.value;
            x = r.x;
        }
        if (v > best) {
            best = v;
            bestb = abs(x);
        }
        if (C * best > 1.0 - epsilon) break;
    }
    res.subset_norm_side = side;
    if (bestb.empty() || !(best > 0.0)) return res;

    CoverValue cv = cover_from_powers(subset_powers(X, ps, bestb, nullptr), n);
    Vec b = bestb;
    const double scale = C / std::pow(cv.V, 1.0 / ps);
    for (auto& v : b) v *= scale;
    EmbeddingCertificate cert = validate_certificate(X, p, C, a, b, cv.d, epsilon);
    if (cert.max_margin > 0.0) {
        // pull b back onto the feasible side of the tightest subset
        Vec c = subset_powers(X, ps, b, nullptr);
        double f = 1.0;
        for (unsigned mask = 1; mask <= (1u << n) - 1u; ++mask) {
            double dI = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) dI += cv.d[i];
            if (c[mask - 1] > 0.0) f = std::min(f, std::pow(std::pow(C, ps) * dI / c[mask - 1], 1.0 / ps));
        }
        for (auto& v : b) v *= f * (1.0 - 1e-14);
        cert = validate_certificate(X, p, C, a, b, cv.d, epsilon);
    }
    res.best_pairing = cert.pairing;
    res.best_b = b;
    res.certified = cert.valid;
    if (res.certified) res.certificate = std::move(cert);
    return res;
}

void check_covering(const CoveringFamily& cov, std::size_t n)
{
    if (cov.multiplicity < 1) throw std::invalid_argument("covering: multiplicity must be >= 1");
    std::vector<long> count(n, 0);
    for (const auto& I : cov.sets) {
        std::vector<char> seen(n, 0);
        for (std::size_t i : I) {
            if (i >= n) throw std::invalid_argument("covering: index out of range");
            if (seen[i]) throw std::invalid_argument("covering: repeated index inside a set");
            seen[i] = 1;
            ++count[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (count[i] != cov.multiplicity)
            throw std::invalid_argument("covering: coordinate " + std::to_string(i) + " covered " +
                                        std::to_string(count[i]) + " times, expected " +
                                        std::to_string(cov.multiplicity));
}

double c42_bound(const NormedLattice& Xstar, double p, const Vec& b, const CoveringFamily& cov)
{
    validate(Xstar);
    if (b.size() != Xstar.dim) throw std::invalid_argument("c42: dimension mismatch");
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("c42: p must lie in (1, inf)");
    check_covering(cov, b.size());
    for (double v : b)
        if (!(v >= 0.0)) throw std::invalid_argument("c42: b must be nonnegative");
    if (std::fabs(eval_norm(Xstar, b) - 1.0) > 1e-6) throw std::invalid_argument("c42: b must be normalized");
    const double ps = conj(p);
    double s = 0.0;
    for (const auto& I : cov.sets) {
        Vec r(b.size(), 0.0);
        for (std::size_t i : I) r[i] = b[i];
        s += std::pow(eval_norm(Xstar, r), ps);
    }
    return std::pow(s / static_cast<double>(cov.multiplicity), 1.0 / ps);
}

double example54_closed_form(double p)
{
    const double ps = conj(p);
    const double t = std::pow(2.0, ps);
    return std::pow(3.0 * t / (2.0 * (1.0 + t)), 1.0 / ps);
}

Example54Report reproduce_example54(double p, long budget, std::uint64_t seed)
{
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("example54: p must lie in (1, inf)");
    Example54Report rep;
    rep.p = p;
    rep.p_star = conj(p);
    NormedLattice Xs{3, make_example54_dual(p)};

    LinOperator id{identity_matrix(3), Xs, Xs};
    ConstantEstimate le = estimate_constant(id, ConstantKind::lower_estimate(rep.p_star), budget, seed);
    // one-part families give ratio 1 exactly
    rep.lower_estimate_constant = std::max(1.0, le.value);
    rep.lower_estimate_witness = le.value >= 1.0 ? le.witness : std::vector<Vec>{{1.0, 0.0, 0.0}};
    rep.lower_estimate_check = std::fabs(rep.lower_estimate_constant - 1.0) <= 1e-6;

    Vec b(3, 1.0);
    double nb = eval_norm(Xs, b);
    for (auto& v : b) v /= nb;
    CoveringFamily pairs{{{0, 1}, {0, 2}, {1, 2}}, 2};
    rep.c42 = c42_bound(Xs, p, b, pairs);
    rep.closed_form = example54_closed_form(p);
    rep.c42_error = std::fabs(rep.c42 - rep.closed_form);
    rep.c42_check = rep.c42_error <= 1e-9;
    rep.exceeds_one = rep.c42 > 1.0;
    rep.gamma = gamma(p);

    NormedLattice X{3, make_predual_of(make_example54_dual(p))};
    Vec a(3, 1.0);
    double na = eval_norm(X, a);
    for (auto& v : a) v /= na;
    const double eps = 1e-3;
    rep.symmetric_C1_certified = t41_check(X, p, 1.0, a, eps, budget / 10, seed).certified;
    rep.symmetric_min_C = kInf;
    const int steps = 40;
    for (int k = 0; k <= steps; ++k) {
        double C = 1.0 + (rep.gamma - 1.0) * k / steps;
        if (t41_check(X, p, C, a, eps, budget / 10, seed).certified) {
            rep.symmetric_min_C = C;
            break;
        }
    }
    rep.pass = rep.lower_estimate_check && rep.c42_check && rep.exceeds_one;
    return rep;
}

}  // namespace llab
