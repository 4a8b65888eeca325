#include "latticelab/convexgeom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latticelab/constants.hpp"
#include "latticelab/search.hpp"
#include "latticelab/simplex.hpp"

namespace llab {

double gauge(const SolidConvexBody& B, const Vec& y) { return gauge_lp(B, y).value; }

bool body_contains(const SolidConvexBody& B, const Vec& y)
{
    if (y.size() != B.dim) throw std::invalid_argument("membership: dimension mismatch");
    const std::size_t K = B.generators.size();
    if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) return true;
    if (K == 0) return false;
    LpProblem lp;
    lp.c.assign(K, 0.0);
    for (std::size_t j = 0; j < B.dim; ++j) {
        Vec row(K);
        for (std::size_t k = 0; k < K; ++k) row[k] = std::fabs(B.generators[k][j]);
        lp.add(std::move(row), Rel::ge, std::fabs(y[j]));
    }
    lp.add(Vec(K, 1.0), Rel::le, 1.0);
    return solve_lp(lp).status == LpStatus::optimal;
}

std::vector<std::size_t> prune_dominated(SolidConvexBody& B)
{
    const std::size_t K = B.generators.size();
    std::vector<char> drop(K, 0);
    for (std::size_t k = 0; k < K; ++k) {
        const Vec& g = B.generators[k];
        if (std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; })) {
            drop[k] = 1;
            continue;
        }
        for (std::size_t l = 0; l < K && !drop[k]; ++l) {
            if (l == k || drop[l]) continue;
            const Vec& h = B.generators[l];
            bool le = true, eq = true;
            for (std::size_t j = 0; j < B.dim; ++j) {
                double a = std::fabs(g[j]), b = std::fabs(h[j]);
                if (a > b) le = false;
                if (a != b) eq = false;
            }
            if (le && (!eq || l < k)) drop[k] = 1;
        }
    }
    std::vector<std::size_t> kept;
    std::vector<Vec> gens;
    for (std::size_t k = 0; k < K; ++k)
        if (!drop[k]) {
            kept.push_back(k);
            gens.push_back(std::move(B.generators[k]));
        }
    B.generators = std::move(gens);
    return kept;
}

namespace {

double dot_abs(const Vec& a, const Vec& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i]) * std::fabs(b[i]);
    return s;
}

bool all_zero(const Vec& v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

CPricer::CPricer(Matrix T, NormedLattice E, SeqNorm tau, SeqNorm sigma)
    : T_(std::move(T)), E_(std::move(E)), tau_(tau), sigma_(sigma)
{
    if (!E_.norm || !std::holds_alternative<LpSpec>(E_.norm->v))
        throw std::invalid_argument("C-set pricing needs an lp domain norm");
    in_dim_ = E_.dim;
    out_dim_ = T_.size();
    for (const auto& r : T_)
        if (r.size() != in_dim_) throw std::invalid_argument("C-set pricing: operator shape mismatch");
    Tt_ = transpose(T_);
    if (Tt_.empty()) Tt_.assign(in_dim_, Vec(out_dim_, 0.0));
    Estar_ = dual_lattice(E_);
}

Vec CPricer::generator_of(const std::vector<Vec>& family) const
{
    Vec norms(family.size());
    std::vector<Vec> imgs;
    for (std::size_t i = 0; i < family.size(); ++i) {
        norms[i] = eval_norm(E_, family[i]);
        imgs.push_back(matvec(T_, family[i]));
    }
    double t = tau_(norms);
    if (!(t > 0.0)) return Vec(out_dim_, 0.0);
    Vec g = sigma_apply(sigma_, imgs);
    for (auto& v : g) v /= t;
    return g;
}

double CPricer::family_value(const std::vector<Vec>& family, const Vec& w) const
{
    return dot_abs(generator_of(family), w);
}

double CPricer::best_signed(const Vec& v, Vec& x) const
{
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < v.size(); ++j)
        if (v[j] != 0.0) nz.push_back(j);
    x.assign(in_dim_, 0.0);
    if (nz.empty()) return 0.0;
    double best = -1.0;
    Vec best_z;
    const std::size_t patterns = std::size_t{1} << (nz.size() - 1);
    Vec sv(v.size(), 0.0);
    for (std::size_t s = 0; s < patterns; ++s) {
        for (std::size_t k = 0; k < nz.size(); ++k) {
            bool neg = k > 0 && ((s >> (k - 1)) & 1u);
            sv[nz[k]] = neg ? -std::fabs(v[nz[k]]) : std::fabs(v[nz[k]]);
        }
        Vec z = matvec(Tt_, sv);
        double c = eval_norm(Estar_, z);
        if (c > best) {
            best = c;
            best_z = z;
        }
    }
    if (best <= 0.0) return 0.0;
    Vec b = norming_functional(Estar_, best_z);
    for (std::size_t i = 0; i < in_dim_; ++i) x[i] = best_z[i] < 0.0 ? -b[i] : b[i];
    return best;
}

PriceResult CPricer::single(const Vec& w) const
{
    PriceResult r;
    Vec x;
    r.value = best_signed(abs(w), x);
    r.family = {x};
    r.generator = generator_of(r.family);
    r.exact = true;
    return r;
}

PriceResult CPricer::partitions(const Vec& w) const
{
    static thread_local std::vector<std::vector<std::vector<std::vector<std::size_t>>>> cache;
    if (cache.size() <= out_dim_) cache.resize(out_dim_ + 1);
    if (cache[out_dim_].empty()) cache[out_dim_] = set_partitions(out_dim_);
    const auto& parts = cache[out_dim_];
    Vec aw = abs(w);
    PriceResult best;
    best.value = -1.0;
    const double tstar = conj(tau_.p);
    for (const auto& part : parts) {
        const std::size_t m = part.size();
        Vec c(m, 0.0);
        std::vector<Vec> xs(m);
        for (std::size_t i = 0; i < m; ++i) {
            Vec v(out_dim_, 0.0);
            for (std::size_t j : part[i]) v[j] = aw[j];
            c[i] = best_signed(v, xs[i]);
        }
        double val = lp_norm(c, tstar);
        if (val > best.value + 1e-15 * (1.0 + val)) {
            Vec a = norming_functional(lp_lattice(m, tstar), c);
            std::vector<Vec> fam;
            for (std::size_t i = 0; i < m; ++i) {
                if (a[i] == 0.0 || c[i] == 0.0) continue;
                Vec x = xs[i];
                for (auto& v : x) v *= a[i];
                fam.push_back(x);
            }
            best.value = val;
            best.family = fam;
        }
    }
    if (best.family.empty()) best.family = {Vec(in_dim_, 0.0)};
    best.value = std::max(best.value, 0.0);
    best.generator = generator_of(best.family);
    best.exact = true;
    return best;
}

PriceResult CPricer::search(const Vec& w, std::uint64_t seed, const std::vector<std::vector<Vec>>& warm) const
{
    const std::size_t m = out_dim_ + 1;
    const std::size_t n = in_dim_;
    auto unflat = [&](const Vec& z) {
        std::vector<Vec> fam(m, Vec(n));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) fam[i][j] = z[i * n + j];
        return fam;
    };
    auto flat = [&](const std::vector<Vec>& fam) {
        Vec z(m * n, 0.0);
        for (std::size_t i = 0; i < std::min(m, fam.size()); ++i)
            for (std::size_t j = 0; j < n; ++j) z[i * n + j] = fam[i][j];
        return z;
    };
    Vec aw = abs(w);
    auto obj = [&](const Vec& z) { return family_value(unflat(z), aw); };
    std::vector<Vec> starts;
    for (const auto& f : warm) starts.push_back(flat(f));
    Rng rng(seed, 0x9a);
    starts.push_back(rng.normal_vec(m * n));
    PriceResult best;
    best.value = -1.0;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        PatternOptions opt;
        opt.step = 0.2;
        opt.tol = 1e-9;
        opt.max_evals = 800;
        opt.seed = mix_seed(seed, k);
        auto res = pattern_maximize(obj, starts[k], opt);
        if (res.value > best.value) {
            best.value = res.value;
            best.family = unflat(res.x);
        }
    }
    std::vector<Vec> fam;
    for (auto& x : best.family)
        if (!all_zero(x)) fam.push_back(std::move(x));
    if (fam.empty()) fam = {Vec(n, 0.0)};
    best.family = fam;
    best.generator = generator_of(fam);
    best.value = dot_abs(best.generator, aw);
    return best;
}

PriceResult CPricer::price(const Vec& w, std::uint64_t seed, const std::vector<std::vector<Vec>>& warm) const
{
    if (w.size() != out_dim_) throw std::invalid_argument("pricing: dimension mismatch");
    if (exact_pricing()) return partitions(w);
    PriceResult s = single(w);
    std::vector<std::vector<Vec>> starts = warm;
    starts.insert(starts.begin(), s.family);
    PriceResult r = search(w, seed, starts);
    if (s.value >= r.value) {
        s.exact = false;
        return s;
    }
    return r;
}

bool CPricer::power_mode() const { return std::isfinite(sigma_.p) && sigma_.p == tau_.p; }

Vec CPricer::power_point(const Vec& u) const
{
    Vec v = matvec(T_, u);
    for (auto& x : v) x = std::pow(std::fabs(x), sigma_.p);
    return v;
}

double CPricer::power_price(const Vec& mu, std::uint64_t seed, const std::vector<Vec>& warm, Vec& u) const
{
    const double p = sigma_.p;
    auto obj = [&](const Vec& x) {
        double nx = eval_norm(E_, x);
        if (!(nx > 0.0)) return -kInf;
        Vec v = matvec(T_, x);
        double s = 0.0;
        for (std::size_t j = 0; j < out_dim_; ++j) s += mu[j] * std::pow(std::fabs(v[j]) / nx, p);
        return s;
    };
    std::vector<Vec> starts = warm;
    for (std::size_t i = 0; i < in_dim_; ++i) {
        Vec e(in_dim_, 0.0);
        e[i] = 1.0;
        starts.push_back(e);
    }
    Rng rng(seed, 0x5b);
    starts.push_back(rng.normal_vec(in_dim_));
    // the exact single-vector optimum of the linearization at |T x| gives one more start
    Vec x0;
    Vec lin(out_dim_);
    double best = -kInf;
    for (const auto& s : starts) {
        double v = obj(s);
        if (v > best) {
            best = v;
            x0 = s;
        }
    }
    Vec t = abs(matvec(T_, x0));
    double nx = eval_norm(E_, x0);
    for (std::size_t j = 0; j < out_dim_; ++j) lin[j] = mu[j] * std::pow(t[j] / nx, p - 1.0);
    Vec xl;
    best_signed(lin, xl);
    starts.push_back(xl);

    best = -kInf;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        if (all_zero(starts[k])) continue;
        PatternOptions opt;
        opt.step = 0.25;
        opt.tol = 1e-10;
        opt.max_evals = 400;
        opt.seed = mix_seed(seed, k);
        auto res = pattern_maximize(obj, starts[k], opt);
        if (res.value > best) {
            best = res.value;
            u = res.x;
        }
    }
    double nu = eval_norm(E_, u);
    for (auto& v : u) v /= nu;
    return std::max(0.0, best);
}

std::vector<Vec> CPricer::family_from_pieces(const std::vector<Vec>& pieces) const
{
    // pieces live in X*; T* u = T^T u measured in E*
    const std::size_t m = pieces.size();
    Vec c(m);
    std::vector<Vec> xs(m, Vec(in_dim_, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        Vec z = matvec(Tt_, pieces[i]);
        c[i] = eval_norm(Estar_, z);
        if (c[i] > 0.0) {
            Vec b = norming_functional(Estar_, z);
            for (std::size_t j = 0; j < in_dim_; ++j) xs[i][j] = z[j] < 0.0 ? -b[j] : b[j];
        }
    }
    Vec a = norming_functional(lp_lattice(m, conj(tau_.p)), c);
    std::vector<Vec> fam;
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i] == 0.0 || c[i] == 0.0) continue;
        for (auto& v : xs[i]) v *= a[i];
        fam.push_back(xs[i]);
    }
    if (fam.empty()) fam = {Vec(in_dim_, 0.0)};
    return fam;
}

void CBody::add(std::vector<Vec> family, Vec generator)
{
    if (all_zero(generator)) return;
    body.add(std::move(generator));
    families.push_back(std::move(family));
}

void CBody::prune()
{
    auto kept = prune_dominated(body);
    std::vector<std::vector<Vec>> f;
    for (std::size_t k : kept) f.push_back(std::move(families[k]));
    families = std::move(f);
}

std::vector<std::vector<Vec>> CBody::warm_for(const Vec& w, std::size_t count) const
{
    std::vector<std::pair<double, std::size_t>> score;
    for (std::size_t k = 0; k < body.generators.size(); ++k) score.push_back({-dot_abs(body.generators[k], w), k});
    count = std::min(count, score.size());
    std::partial_sort(score.begin(), score.begin() + static_cast<std::ptrdiff_t>(count), score.end());
    std::vector<std::vector<Vec>> out;
    for (std::size_t i = 0; i < std::min(count, score.size()); ++i) out.push_back(families[score[i].second]);
    return out;
}

namespace {

void add_power(CBody& C, const CPricer& P, Vec u)
{
    Vec v = P.power_point(u);
    if (all_zero(v)) return;
    C.power.add(std::move(v));
    C.power_u.push_back(std::move(u));
}

// Rounds run on a scratch copy; only generators active in the final LP are kept, and the shared body
// stops growing at kBodyCap.
constexpr std::size_t kBodyCap = 1500;

RefinedGauge refined_gauge_power(CBody& C, const CPricer& P, const Vec& y, std::uint64_t seed, int max_rounds,
                                 double p)
{
    RefinedGauge out;
    if (C.power.dim == 0) {
        C.power.dim = P.out_dim();
        for (const auto& fam : C.families)
            for (const auto& x : fam) {
                double nx = P.domain_norm(x);
                if (!(nx > 0.0)) continue;
                Vec u = x;
                for (auto& v : u) v /= nx;
                add_power(C, P, u);
            }
    }
    SolidConvexBody A = C.power;
    std::vector<Vec> us = C.power_u;
    const std::size_t base = A.generators.size();
    auto push = [&](Vec u) {
        Vec v = P.power_point(u);
        if (all_zero(v)) return false;
        A.add(std::move(v));
        us.push_back(std::move(u));
        return true;
    };
    Vec yp(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) yp[j] = std::pow(std::fabs(y[j]), p);
    GaugeResult g;
    for (int round = 0; round < max_rounds; ++round) {
        g = gauge_lp(A, yp);
        out.rounds = round + 1;
        if (std::isinf(g.value)) {
            bool added = false;
            for (std::size_t j = 0; j < y.size(); ++j) {
                if (y[j] == 0.0) continue;
                Vec e(y.size(), 0.0);
                e[j] = 1.0;
                Vec u;
                if (P.power_price(e, mix_seed(seed, 1000 + j), {}, u) > 0.0) added = push(u) || added;
            }
            if (!added) {
                out.value = out.lower = kInf;
                return out;
            }
            continue;
        }
        std::vector<std::pair<double, std::size_t>> score;
        for (std::size_t k = 0; k < A.generators.size(); ++k) score.push_back({-dot(A.generators[k], g.mu), k});
        const std::size_t nw = std::min<std::size_t>(2, score.size());
        std::partial_sort(score.begin(), score.begin() + static_cast<std::ptrdiff_t>(nw), score.end());
        std::vector<Vec> warm;
        for (std::size_t i = 0; i < nw; ++i) warm.push_back(us[score[i].second]);
        Vec u;
        double pr = P.power_price(g.mu, mix_seed(seed, static_cast<std::uint64_t>(round)), warm, u);
        out.value = std::pow(g.value, 1.0 / p);
        out.lower = std::pow(g.value / std::max(1.0, pr), 1.0 / p);
        if (pr <= 1.0 + 1e-9) break;
        push(u);
    }
    if (!std::isfinite(g.value) || !(g.value > 0.0)) return out;
    // the boundary point |y|/rho becomes a y-space generator carried by an explicit family
    std::vector<Vec> fam;
    for (std::size_t k = 0; k < g.lambda.size(); ++k) {
        if (g.lambda[k] <= 0.0) continue;
        if (k >= base && C.power.generators.size() < kBodyCap) add_power(C, P, us[k]);
        Vec x = us[k];
        double c = std::pow(g.lambda[k] / g.value, 1.0 / p);
        for (auto& v : x) v *= c;
        fam.push_back(x);
    }
    if (!fam.empty() && C.body.generators.size() < kBodyCap) C.add(fam, P.generator_of(fam));
    return out;
}

}  // namespace

RefinedGauge refined_gauge(CBody& C, const CPricer& P, const Vec& y, std::uint64_t seed, int max_rounds)
{
    RefinedGauge out;
    if (all_zero(y)) {
        out.certified = true;
        return out;
    }
    if (P.power_mode()) return refined_gauge_power(C, P, y, seed, max_rounds, P.sigma_p());
    SolidConvexBody B = C.body;
    std::vector<std::vector<Vec>> extra;
    const std::size_t base = B.generators.size();
    auto push = [&](PriceResult& pr) {
        if (all_zero(pr.generator)) return false;
        B.add(std::move(pr.generator));
        extra.push_back(std::move(pr.family));
        return true;
    };
    GaugeResult g;
    for (int round = 0; round < max_rounds; ++round) {
        g = gauge_lp(B, y);
        out.rounds = round + 1;
        if (std::isinf(g.value)) {
            bool added = false;
            for (std::size_t j = 0; j < y.size(); ++j) {
                if (y[j] == 0.0) continue;
                Vec e(y.size(), 0.0);
                e[j] = 1.0;
                PriceResult pr = P.price(e, mix_seed(seed, 1000 + j));
                if (pr.value > 0.0) {
                    added = push(pr) || added;
                } else {
                    out.value = out.lower = kInf;
                    out.certified = pr.exact;
                    return out;
                }
            }
            if (!added) {
                out.value = out.lower = kInf;
                return out;
            }
            continue;
        }
        PriceResult pr = P.price(g.mu, mix_seed(seed, static_cast<std::uint64_t>(round)),
                                 P.exact_pricing() ? std::vector<std::vector<Vec>>{} : C.warm_for(g.mu, 1));
        out.value = g.value;
        out.lower = g.value / std::max(1.0, pr.value);
        if (pr.value <= 1.0 + 1e-8) {
            out.certified = pr.exact;
            break;
        }
        push(pr);
    }
    if (std::isfinite(g.value))
        for (std::size_t k = base; k < g.lambda.size(); ++k)
            if (g.lambda[k] > 0.0 && C.body.generators.size() < kBodyCap)
                C.add(extra[k - base], B.generators[k]);
    return out;
}

CBody build_C_body(const LinOperator& T, const SeqNorm& tau, const SeqNorm& sigma, long budget, std::uint64_t seed)
{
    CPricer P(T.m, T.domain, tau, sigma);
    CBody C;
    C.body.dim = P.out_dim();
    const std::size_t d = P.out_dim(), n = P.in_dim();
    for (std::size_t j = 0; j < d; ++j) {
        Vec e(d, 0.0);
        e[j] = 1.0;
        PriceResult pr = P.price(e, mix_seed(seed, j));
        C.add(pr.family, pr.generator);
    }
    const long spheres = std::clamp<long>(budget / 100, 8, 64);
    for (long k = 0; k < spheres; ++k) {
        Rng rng(seed, static_cast<std::uint64_t>(k));
        Vec x = rng.normal_vec(n);
        double nx = eval_norm(T.domain, x);
        if (!(nx > 0.0)) continue;
        for (auto& v : x) v /= nx;
        C.add({x}, P.generator_of({x}));
    }
    const long rounds = std::clamp<long>(budget / 200, 8, 64);
    for (long k = 0; k < rounds; ++k) {
        Rng rng(mix_seed(seed, 0xc01), static_cast<std::uint64_t>(k));
        Vec w(d);
        for (auto& v : w) v = std::fabs(rng.normal());
        PriceResult pr = P.price(w, mix_seed(seed, 0xc02 + static_cast<std::uint64_t>(k)), C.warm_for(w, 2));
        C.add(pr.family, pr.generator);
    }
    C.prune();
    return C;
}

DViolation search_D_violation(const LinOperator& T, const Vec& u, const SeqNorm& tau, const SeqNorm& sigma,
                              long budget, std::uint64_t seed)
{
    const std::size_t d = T.cols();
    if (u.size() != d) throw std::invalid_argument("D search: dimension mismatch");
    DViolation out;
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < d; ++j)
        if (u[j] != 0.0) active.push_back(j);
    if (active.empty()) return out;
    const std::size_t n = std::max<std::size_t>(2, d + 1);
    const NormedLattice& E = T.codomain;

    auto pieces_of = [&](const Vec& W) {
        std::vector<Vec> ps(n, Vec(d, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j : active) ps[i][j] = u[j] * W[i * d + j];
        return ps;
    };
    auto scale_of = [&](const Vec& W) {
        double den = 0.0;
        Vec col(n);
        for (std::size_t j : active) {
            for (std::size_t i = 0; i < n; ++i) col[i] = W[i * d + j];
            den = std::max(den, sigma(col));
        }
        return den;
    };
    auto value = [&](const Vec& W) {
        double den = scale_of(W);
        if (!(den > 0.0)) return -kInf;
        Vec norms(n);
        auto ps = pieces_of(W);
        for (std::size_t i = 0; i < n; ++i) norms[i] = eval_norm(E, T.apply(ps[i]));
        return tau(norms) / den;
    };

    std::vector<std::pair<double, Vec>> starts;
    Vec W0(n * d, 0.0);
    for (std::size_t j : active) W0[j] = 1.0;
    starts.push_back({value(W0), W0});

    if (d <= 3) {
        const int K = d == 3 ? 8 : 12;
        const std::size_t na = active.size();
        std::size_t grid = 1;
        for (std::size_t k = 0; k < na; ++k) grid *= static_cast<std::size_t>(K + 1);
        const std::size_t signs = std::size_t{1} << (2 * (na - 1));
        std::vector<std::pair<double, Vec>> top;
        Vec W(n * d, 0.0);
        for (std::size_t g = 0; g < grid; ++g) {
            std::size_t code = g;
            Vec theta(na);
            for (std::size_t k = 0; k < na; ++k) {
                theta[k] = (M_PI / 2.0) * static_cast<double>(code % (K + 1)) / K;
                code /= (K + 1);
            }
            for (std::size_t s = 0; s < signs; ++s) {
                std::fill(W.begin(), W.end(), 0.0);
                for (std::size_t k = 0; k < na; ++k) {
                    double s1 = 1.0, s2 = 1.0;
                    if (k > 0) {
                        s1 = ((s >> (2 * (k - 1))) & 1u) ? -1.0 : 1.0;
                        s2 = ((s >> (2 * (k - 1) + 1)) & 1u) ? -1.0 : 1.0;
                    }
                    W[active[k]] = s1 * std::cos(theta[k]);
                    W[d + active[k]] = s2 * std::sin(theta[k]);
                }
                double v = value(W);
                if (top.size() < 3 || v > top.back().first) {
                    top.push_back({v, W});
                    std::stable_sort(top.begin(), top.end(),
                                     [](const auto& a, const auto& b) { return a.first > b.first; });
                    if (top.size() > 3) top.pop_back();
                }
            }
        }
        for (auto& t : top) starts.push_back(std::move(t));
    }
    const long nrand = std::max<long>(2, budget / 4000);
    for (long k = 0; k < nrand; ++k) {
        Rng rng(seed, static_cast<std::uint64_t>(k));
        Vec W = rng.normal_vec(n * d);
        starts.push_back({value(W), W});
    }

    const long per = std::max<long>(500, budget / static_cast<long>(starts.size()));
    double best = -kInf;
    Vec bestW;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        PatternOptions opt;
        opt.step = 0.1;
        opt.tol = 1e-10;
        opt.max_evals = per;
        opt.seed = mix_seed(seed, 0xd0 + k);
        auto res = pattern_maximize(value, starts[k].second, opt);
        if (res.value > best) {
            best = res.value;
            bestW = res.x;
        }
    }
    double den = scale_of(bestW);
    for (auto& v : bestW) v /= den;
    for (auto& p : pieces_of(bestW))
        if (!all_zero(p)) out.pieces.push_back(p);
    out.rho_lower = std::max(0.0, value(bestW));
    out.in_D = out.rho_lower <= 1.0;
    if (!out.in_D) out.witness = out.pieces;
    return out;
}

PolarityReport verify_polarity(const LinOperator& T, const SeqNorm& tau, const SeqNorm& sigma, int sample_count,
                               long budget, std::uint64_t seed)
{
    if (T.domain.dim > 4 || T.codomain.dim > 4) throw std::invalid_argument("polarity: dims must be <= 4");
    PolarityReport rep;
    CPricer P(T.m, T.domain, tau, sigma);
    CBody C = build_C_body(T, tau, sigma, budget, seed);
    LinOperator Ts = T.adjoint();
    const SeqNorm tau_s = tau.dual(), sigma_s = sigma.dual();
    const std::size_t d = P.out_dim();
    for (int k = 0; k < sample_count; ++k) {
        Rng rng(mix_seed(seed, 0x9e1), static_cast<std::uint64_t>(k));
        Vec u = rng.normal_vec(d);
        PriceResult pr = P.price(abs(u), mix_seed(seed, 0x9e2 + static_cast<std::uint64_t>(k)), C.warm_for(abs(u), 2));
        C.add(pr.family, pr.generator);
        if (pr.value > 0.0) {
            double c = rng.uniform(0.3, 2.0) / pr.value;
            for (auto& v : u) v *= c;
        }
        double s = support_function(C.body, u);
        DViolation dv = search_D_violation(Ts, u, tau_s, sigma_s, budget, mix_seed(seed, 0x9e3 + static_cast<std::uint64_t>(k)));
        ++rep.samples;
        rep.max_abs_gap = std::max(rep.max_abs_gap, std::fabs(s - dv.rho_lower));
        if (s <= 1.0) {
            ++rep.inside_C_polar;
            rep.max_rho_inside = std::max(rep.max_rho_inside, dv.rho_lower);
            if (dv.rho_lower > 1.0 + 1e-6) rep.counterexamples.push_back({u, s, dv.rho_lower, "C_polar_subset_D"});
        }
        if (dv.rho_lower > 1.0) {
            ++rep.with_D_violation;
            rep.min_support_violating = std::min(rep.min_support_violating, s);
            if (!(s > 1.0 - 5e-2)) rep.counterexamples.push_back({u, s, dv.rho_lower, "D_subset_C_polar"});
        }
    }
    rep.generators = C.body.generators.size();
    rep.pass = rep.counterexamples.empty();
    return rep;
}

FactorizationReport build_minimal_factorization(const LinOperator& T, const SeqNorm& tau, const SeqNorm& sigma,
                                                long budget, std::uint64_t seed, int families)
{
    FactorizationReport rep;
    const std::size_t d = T.rows(), n = T.cols();
    bool zero = std::all_of(T.m.begin(), T.m.end(), [](const Vec& r) { return all_zero(r); });
    if (zero) {
        rep.trivial = true;
        rep.body.dim = d;
        rep.Y = {d, make_gauge_of(rep.body)};
        rep.U = {T.m, T.domain, rep.Y};
        rep.V = {identity_matrix(d), rep.Y, T.codomain};
        rep.U0_pass = rep.V0_pass = rep.convexity_pass = rep.pass = true;
        return rep;
    }
    CPricer P(T.m, T.domain, tau, sigma);
    CBody C = build_C_body(T, tau, sigma, budget, seed);

    // U0 = T into the gauge lattice
    for (std::size_t k = 0; k < n + 200; ++k) {
        Vec x(n, 0.0);
        if (k < n) {
            x[k] = 1.0;
        } else {
            Rng rng(mix_seed(seed, 0xa0), k);
            x = rng.normal_vec(n);
        }
        double nx = eval_norm(T.domain, x);
        if (!(nx > 0.0)) continue;
        RefinedGauge g = refined_gauge(C, P, T.apply(x), mix_seed(seed, 0xa1 + k));
        rep.U0_max = std::max(rep.U0_max, g.value / nx);
    }
    rep.U0_pass = rep.U0_max <= 1.0 + 1e-6;

    // (tau,sigma)-convexity of the gauge on families drawn from the ideal spanned by the body
    const std::size_t max_len = std::max<std::size_t>(2, 2 * d);
    for (int f = 0; f < families; ++f) {
        Rng rng(mix_seed(seed, 0xb0), static_cast<std::uint64_t>(f));
        std::size_t m = 2 + rng.index(max_len - 1);
        std::vector<Vec> fam;
        const auto& gens = C.body.generators;
        for (std::size_t i = 0; i < m; ++i) {
            Vec y(d, 0.0);
            std::size_t picks = 1 + rng.index(3);
            for (std::size_t t = 0; t < picks; ++t) {
                const Vec& g = gens[rng.index(gens.size())];
                double lam = rng.uniform(0.1, 1.0);
                for (std::size_t j = 0; j < d; ++j) y[j] += lam * std::fabs(g[j]);
            }
            double sc = rng.uniform(0.2, 1.5);
            for (auto& v : y) v *= (rng.coin() ? sc : -sc);
            fam.push_back(y);
        }
        Vec gs(m);
        for (std::size_t i = 0; i < m; ++i)
            gs[i] = refined_gauge(C, P, fam[i], mix_seed(seed, 0xb1 + 97 * f + i)).value;
        double den = tau(gs);
        if (!(den > 0.0)) continue;
        double num = refined_gauge(C, P, sigma_apply(sigma, fam), mix_seed(seed, 0xb2 + f)).value;
        double r = num / den;
        ++rep.families;
        if (r > rep.convexity_ratio_max) {
            rep.convexity_ratio_max = r;
            rep.worst_family = fam;
        }
    }
    rep.convexity_pass = rep.convexity_ratio_max <= 1.0 + 1e-6;

    // V0 = inclusion; K from the search estimate and the generator families (each a genuine ratio)
    rep.K = estimate_constant(T, ConstantKind::tau_sigma_convex(tau, sigma), budget, seed).value;
    for (const auto& g : C.body.generators) rep.K = std::max(rep.K, eval_norm(T.codomain, g));
    const std::size_t K = C.body.generators.size();
    for (std::size_t k = 0; k < K; ++k) {
        Vec g = C.body.generators[k];
        RefinedGauge rg = refined_gauge(C, P, g, mix_seed(seed, 0xc0 + k));
        if (rg.value > 0.0) rep.V0_max = std::max(rep.V0_max, eval_norm(T.codomain, g) / rg.value);
    }
    for (const auto& g : C.body.generators) rep.K = std::max(rep.K, eval_norm(T.codomain, g));
    rep.V0_pass = rep.V0_max <= rep.K + 1e-6;

    C.prune();
    rep.body = C.body;
    rep.Y = {d, make_gauge_of(C.body)};
    rep.U = {T.m, T.domain, rep.Y};
    rep.V = {identity_matrix(d), rep.Y, T.codomain};
    for (std::size_t j = 0; j < n; ++j) {
        Vec e(n, 0.0);
        e[j] = 1.0;
        Vec lhs = matvec(rep.V.m, matvec(rep.U.m, e));
        Vec rhs = T.apply(e);
        for (std::size_t i = 0; i < d; ++i) rep.basis_error = std::max(rep.basis_error, std::fabs(lhs[i] - rhs[i]));
    }
    rep.pass = rep.U0_pass && rep.V0_pass && rep.convexity_pass && rep.basis_error <= 1e-12;
    return rep;
}

InterpolationExponents interpolation_exponents(double theta, double p, double q, double p2, double q2)
{
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("interpolation: theta must lie in (0,1)");
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("interpolation: p must be finite and >= 1");
    if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("interpolation: q must be finite and >= 1");
    if (!(p2 == p || std::isinf(p2))) throw std::invalid_argument("interpolation: p2 must be p or inf");
    if (!(q2 == 1.0 || q2 == q)) throw std::invalid_argument("interpolation: q2 must be 1 or q");
    InterpolationExponents e;
    e.p_theta = 1.0 / (theta / p + (1.0 - theta));
    if (q2 == 1.0) {
        e.q_theta = q / (1.0 - theta);
        e.pbar2 = std::isinf(p2) ? kInf : e.p_theta;
        e.qbar2 = 1.0;
        e.form = "q2=1";
    } else {
        if (!std::isinf(p2)) throw std::invalid_argument("interpolation: p2 = p together with q2 = q has no form");
        e.q_theta = q / theta;
        e.pbar2 = kInf;
        e.qbar2 = e.q_theta;
        e.form = "p2=inf,q2=q";
    }
    return e;
}

Vec interpolate_point(const Vec& g, const Vec& h, double theta)
{
    if (g.size() != h.size()) throw std::invalid_argument("interpolation: dimension mismatch");
    Vec r(g.size());
    for (std::size_t j = 0; j < g.size(); ++j)
        r[j] = std::pow(std::fabs(g[j]), theta) * std::pow(std::fabs(h[j]), 1.0 - theta);
    return r;
}

namespace {

Vec hull_sample(const SolidConvexBody& B, Rng& rng)
{
    Vec y(B.dim, 0.0);
    std::size_t picks = 1 + rng.index(std::min<std::size_t>(3, B.generators.size()));
    Vec lam(picks);
    double tot = 0.0;
    for (auto& l : lam) tot += (l = -std::log(1.0 - rng.uniform()));
    for (std::size_t t = 0; t < picks; ++t) {
        const Vec& g = B.generators[rng.index(B.generators.size())];
        for (std::size_t j = 0; j < B.dim; ++j) y[j] += lam[t] / tot * std::fabs(g[j]);
    }
    return y;
}

}  // namespace

InterpolationReport interpolate_theta(const SolidConvexBody& C0, const SolidConvexBody& C1, double theta, double p,
                                      double q, double p2, double q2, int samples, std::uint64_t seed)
{
    InterpolationReport rep;
    rep.exponents = interpolation_exponents(theta, p, q, p2, q2);
    check_body(C0);
    check_body(C1);
    if (C0.dim != C1.dim) throw std::invalid_argument("interpolation: bodies differ in dimension");
    if (C0.generators.empty() || C1.generators.empty()) throw std::invalid_argument("interpolation: empty body");
    rep.C_theta.dim = C0.dim;
    for (const auto& g : C0.generators)
        for (const auto& h : C1.generators) rep.C_theta.add(interpolate_point(g, h, theta));
    rep.generator_pairs = rep.C_theta.generators.size();
    std::vector<std::pair<Vec, Vec>> pairs;
    for (int k = 0; k < samples; ++k) {
        Rng rng(seed, static_cast<std::uint64_t>(k));
        Vec g = hull_sample(C0, rng), h = hull_sample(C1, rng);
        rep.C_theta.add(interpolate_point(g, h, theta));
        pairs.push_back({g, h});
    }
    rep.sampled_pairs = pairs.size();

    // midpoints of members: gauge in the generated body, and the Hoelder domination by the member
    // built from the midpoints of the factors
    const auto& gens = rep.C_theta.generators;
    const int checks = std::min<int>(100, static_cast<int>(gens.size() * gens.size()));
    for (int t = 0; t < checks; ++t) {
        Rng rng(mix_seed(seed, 0x3d), static_cast<std::uint64_t>(t));
        const Vec& a = gens[rng.index(gens.size())];
        const Vec& b = gens[rng.index(gens.size())];
        Vec mid(a.size());
        for (std::size_t j = 0; j < a.size(); ++j) mid[j] = 0.5 * (a[j] + b[j]);
        rep.max_midpoint_gauge = std::max(rep.max_midpoint_gauge, gauge(rep.C_theta, mid));
        ++rep.midpoint_checks;
        if (pairs.size() >= 2) {
            const auto& p1 = pairs[rng.index(pairs.size())];
            const auto& p2v = pairs[rng.index(pairs.size())];
            Vec m1 = interpolate_point(p1.first, p1.second, theta);
            Vec m2 = interpolate_point(p2v.first, p2v.second, theta);
            Vec gbar(a.size()), hbar(a.size());
            for (std::size_t j = 0; j < a.size(); ++j) {
                gbar[j] = 0.5 * (p1.first[j] + p2v.first[j]);
                hbar[j] = 0.5 * (p1.second[j] + p2v.second[j]);
            }
            Vec dom = interpolate_point(gbar, hbar, theta);
            for (std::size_t j = 0; j < a.size(); ++j)
                rep.max_holder_excess = std::max(rep.max_holder_excess, 0.5 * (m1[j] + m2[j]) - dom[j]);
        }
    }
    rep.pass = rep.max_midpoint_gauge <= 1.0 + 1e-6 && rep.max_holder_excess <= 1e-12;
    return rep;
}

}  // namespace llab
