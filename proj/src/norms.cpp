#include "latticelab/norms.hpp"

#include <algorithm>
#include <cmath>

#include "latticelab/lorentz.hpp"
#include "latticelab/search.hpp"

namespace llab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

NormPtr wrap(NormSpec s) { return std::make_shared<const NormSpec>(std::move(s)); }

Side worse(Side a, Side b)
{
    if (a == Side::exact) return b;
    return a;
}

Vec slice(const Vec& x, std::size_t off, std::size_t n)
{
    return Vec(x.begin() + static_cast<std::ptrdiff_t>(off), x.begin() + static_cast<std::ptrdiff_t>(off + n));
}

void check_dim(const NormedLattice& X, const Vec& x)
{
    if (x.size() != X.dim) throw std::invalid_argument("dimension mismatch: lattice has dim " + std::to_string(X.dim) +
                                                        ", vector has " + std::to_string(x.size()));
    if (!X.norm) throw std::invalid_argument("lattice without norm");
}

void check_weights(const AtomicMeasure& mu, std::size_t dim, const std::string& path)
{
    if (mu.dim() != dim)
        throw SpecError(path + "/weights", "expected " + std::to_string(dim) + " weights, got " +
                                               std::to_string(mu.dim()));
    for (std::size_t i = 0; i < mu.dim(); ++i)
        if (!(mu.weights[i] > 0.0) || !std::isfinite(mu.weights[i]))
            throw SpecError(path + "/weights/" + std::to_string(i), "weight must be a positive finite number");
}

void check_blocks(const std::vector<NormedLattice>& blocks, std::size_t dim, const std::string& path)
{
    if (blocks.empty()) throw SpecError(path + "/blocks", "at least one block required");
    std::size_t total = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        validate(blocks[i], path + "/blocks/" + std::to_string(i));
        total += blocks[i].dim;
    }
    if (total != dim)
        throw SpecError(path + "/blocks", "block dims sum to " + std::to_string(total) + ", lattice dim is " +
                                              std::to_string(dim));
}

void validate_norm(const NormSpec& s, std::size_t dim, const std::string& path)
{
    std::visit(overloaded{
                   [&](const LpSpec& n) {
                       if (!(n.p >= 1.0)) throw SpecError(path + "/p", "p must be >= 1");
                   },
                   [&](const LorentzPInfSpec& n) {
                       if (!(n.p > 1.0) || !std::isfinite(n.p))
                           throw SpecError(path + "/p", "p must lie in (1, inf)");
                       if (!(n.r >= 1.0)) throw SpecError(path + "/r", "r must be >= 1");
                       if (!(n.r < n.p)) throw SpecError(path + "/r", "r must be < p (got r >= p)");
                       check_weights(n.measure, dim, path);
                   },
                   [&](const LorentzQ1Spec& n) {
                       if (!(n.q > 1.0) || !std::isfinite(n.q))
                           throw SpecError(path + "/q", "q must lie in (1, inf)");
                       check_weights(n.measure, dim, path);
                   },
                   [&](const LinfSumSpec& n) { check_blocks(n.blocks, dim, path); },
                   [&](const BlockLorentzSpec& n) {
                       check_blocks(n.blocks, dim, path);
                       if (!n.outer) throw SpecError(path + "/outer", "missing outer norm");
                       if (!std::holds_alternative<LpSpec>(n.outer->v) &&
                           !std::holds_alternative<LorentzPInfSpec>(n.outer->v))
                           throw SpecError(path + "/outer/kind", "outer norm must be lp or lorentz_pinfty");
                       validate_norm(*n.outer, n.blocks.size(), path + "/outer");
                   },
                   [&](const Example54DualSpec& n) {
                       if (dim != 3) throw SpecError(path, "example54_dual lives on dim 3");
                       if (!(n.p > 1.0) || !std::isfinite(n.p))
                           throw SpecError(path + "/p", "p must lie in (1, inf)");
                   },
                   [&](const PredualOfSpec& n) {
                       if (!n.inner) throw SpecError(path + "/inner", "missing inner norm");
                       if (std::holds_alternative<PredualOfSpec>(n.inner->v))
                           throw SpecError(path + "/inner", "predual_of may not be nested");
                       validate_norm(*n.inner, dim, path + "/inner");
                   },
                   [&](const GaugeOfSpec& n) {
                       if (n.body.dim != dim) throw SpecError(path + "/generators", "body dimension mismatch");
                       if (n.body.generators.empty())
                           throw SpecError(path + "/generators", "at least one generator required");
                       for (std::size_t k = 0; k < n.body.generators.size(); ++k) {
                           const auto& g = n.body.generators[k];
                           if (g.size() != dim)
                               throw SpecError(path + "/generators/" + std::to_string(k), "wrong length");
                           for (std::size_t j = 0; j < g.size(); ++j)
                               if (!std::isfinite(g[j]))
                                   throw SpecError(path + "/generators/" + std::to_string(k) + "/" +
                                                       std::to_string(j),
                                                   "entry must be finite");
                       }
                   },
               },
               s.v);
}

constexpr std::uint64_t kAscentSeed = 0x1a77;

}  // namespace

NormPtr make_lp(double p) { return wrap({LpSpec{p}}); }
NormPtr make_lorentz_pinf(double p, double r, AtomicMeasure mu) { return wrap({LorentzPInfSpec{p, r, std::move(mu)}}); }
NormPtr make_lorentz_q1(double q, AtomicMeasure mu) { return wrap({LorentzQ1Spec{q, std::move(mu)}}); }
NormPtr make_linf_sum(std::vector<NormedLattice> blocks) { return wrap({LinfSumSpec{std::move(blocks)}}); }
NormPtr make_block_lorentz(NormPtr outer, std::vector<NormedLattice> blocks)
{
    return wrap({BlockLorentzSpec{std::move(outer), std::move(blocks)}});
}
NormPtr make_example54_dual(double p) { return wrap({Example54DualSpec{p}}); }
NormPtr make_predual_of(NormPtr inner) { return wrap({PredualOfSpec{std::move(inner)}}); }
NormPtr make_gauge_of(SolidConvexBody body) { return wrap({GaugeOfSpec{std::move(body)}}); }

NormedLattice lp_lattice(std::size_t n, double p) { return {n, make_lp(p)}; }

std::string kind_name(const NormSpec& s)
{
    static const char* names[] = {"lp",           "lorentz_pinfty", "lorentz_q1", "linf_sum",
                                  "block_lorentz", "example54_dual", "predual_of", "gauge_of"};
    return names[s.v.index()];
}

void validate(const NormedLattice& X, const std::string& path)
{
    if (X.dim == 0) throw SpecError(path + "/dim", "dim must be positive");
    if (!X.norm) throw SpecError(path + "/norm", "missing norm");
    validate_norm(*X.norm, X.dim, path + "/norm");
}

double example54_dual_norm(const Vec& b, double p)
{
    if (b.size() != 3) throw std::invalid_argument("example54_dual: dim must be 3");
    const double ps = conj(p);
    double best = 0.0;
    for (int i = 0; i < 3; ++i) {
        double bi = std::fabs(b[i]);
        double rest = std::fabs(b[(i + 1) % 3]) + std::fabs(b[(i + 2) % 3]);
        best = std::max(best, lp_norm({bi, rest}, ps));
    }
    return best;
}

NormValue eval_norm_flagged(const NormedLattice& X, const Vec& x)
{
    check_dim(X, x);
    return std::visit(
        overloaded{
            [&](const LpSpec& n) { return NormValue{lp_norm(x, n.p), Side::exact}; },
            [&](const LorentzPInfSpec& n) { return norm_pinfty_r(StepFunction{x, n.measure}, n.p, n.r); },
            [&](const LorentzQ1Spec& n) { return NormValue{norm_q1(StepFunction{x, n.measure}, n.q), Side::exact}; },
            [&](const LinfSumSpec& n) {
                NormValue out{0.0, Side::exact};
                std::size_t off = 0;
                for (const auto& blk : n.blocks) {
                    NormValue v = eval_norm_flagged(blk, slice(x, off, blk.dim));
                    out.value = std::max(out.value, v.value);
                    out.side = worse(out.side, v.side);
                    off += blk.dim;
                }
                return out;
            },
            [&](const BlockLorentzSpec& n) {
                Vec inner(n.blocks.size());
                Side side = Side::exact;
                std::size_t off = 0;
                for (std::size_t k = 0; k < n.blocks.size(); ++k) {
                    NormValue v = eval_norm_flagged(n.blocks[k], slice(x, off, n.blocks[k].dim));
                    inner[k] = v.value;
                    side = worse(side, v.side);
                    off += n.blocks[k].dim;
                }
                NormValue o = eval_norm_flagged({n.blocks.size(), n.outer}, inner);
                o.side = worse(o.side, side);
                return o;
            },
            [&](const Example54DualSpec& n) { return NormValue{example54_dual_norm(x, n.p), Side::exact}; },
            [&](const PredualOfSpec& n) { return dual_value({X.dim, n.inner}, x); },
            [&](const GaugeOfSpec& n) { return NormValue{gauge_lp(n.body, x).value, Side::exact}; },
        },
        X.norm->v);
}

double eval_norm(const NormedLattice& X, const Vec& x) { return eval_norm_flagged(X, x).value; }

NormValue dual_by_ascent(const std::function<double(const Vec&)>& N, const Vec& b, std::uint64_t seed,
                         std::size_t starts, Vec* argmax)
{
    const std::size_t n = b.size();
    Vec ab = abs(b);
    if (std::all_of(ab.begin(), ab.end(), [](double v) { return v == 0.0; })) {
        if (argmax) *argmax = Vec(n, 0.0);
        return {0.0, Side::lower};
    }
    auto ratio = [&](const Vec& x) {
        Vec ax = abs(x);
        double den = N(ax);
        if (!(den > 0.0)) return -kInf;
        return dot(ax, ab) / den;
    };
    std::vector<Vec> init;
    init.push_back(ab);
    init.push_back(Vec(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
        Vec e(n, 0.0);
        e[i] = 1.0;
        init.push_back(e);
    }
    Rng rng(seed, 0xa5);
    while (init.size() < std::max<std::size_t>(starts, n + 2)) {
        Vec r(n);
        for (auto& v : r) v = std::fabs(rng.normal());
        init.push_back(r);
    }
    double best = -kInf;
    Vec best_x;
    for (std::size_t k = 0; k < init.size(); ++k) {
        Vec x0 = init[k];
        double m = *std::max_element(x0.begin(), x0.end());
        for (auto& v : x0) v /= m;
        PatternOptions opt;
        opt.step = 0.25;
        opt.tol = 1e-8;
        opt.max_evals = 4000;
        opt.seed = mix_seed(seed, k);
        auto res = pattern_maximize(ratio, x0, opt);
        if (res.value > best) {
            best = res.value;
            best_x = abs(res.x);
        }
    }
    if (argmax) *argmax = best_x;
    return {std::max(best, 0.0), Side::lower};
}

NormValue dual_value(const NormedLattice& X, const Vec& b)
{
    check_dim(X, b);
    return std::visit(
        overloaded{
            [&](const LpSpec& n) { return NormValue{lp_norm(b, conj(n.p)), Side::exact}; },
            [&](const LorentzPInfSpec& n) {
                if (n.r == 1.0) return NormValue{dual_norm_pinfty_1(b, n.measure, n.p), Side::exact};
                NormedLattice self{X.dim, X.norm};
                return dual_by_ascent([&](const Vec& x) { return eval_norm(self, x); }, b, kAscentSeed);
            },
            [&](const LorentzQ1Spec& n) { return NormValue{dual_norm_q1(b, n.measure, n.q), Side::exact}; },
            [&](const LinfSumSpec& n) {
                NormValue out{0.0, Side::exact};
                std::size_t off = 0;
                for (const auto& blk : n.blocks) {
                    NormValue v = dual_value(blk, slice(b, off, blk.dim));
                    out.value += v.value;
                    out.side = worse(out.side, v.side);
                    off += blk.dim;
                }
                return out;
            },
            [&](const BlockLorentzSpec& n) {
                Vec inner(n.blocks.size());
                Side side = Side::exact;
                std::size_t off = 0;
                for (std::size_t k = 0; k < n.blocks.size(); ++k) {
                    NormValue v = dual_value(n.blocks[k], slice(b, off, n.blocks[k].dim));
                    inner[k] = v.value;
                    side = worse(side, v.side);
                    off += n.blocks[k].dim;
                }
                NormValue o = dual_value({n.blocks.size(), n.outer}, inner);
                o.side = worse(o.side, side);
                return o;
            },
            [&](const Example54DualSpec& n) {
                return dual_by_ascent([&](const Vec& x) { return example54_dual_norm(x, n.p); }, b, kAscentSeed);
            },
            [&](const PredualOfSpec& n) { return eval_norm_flagged({X.dim, n.inner}, b); },
            [&](const GaugeOfSpec& n) { return NormValue{support_function(n.body, b), Side::exact}; },
        },
        X.norm->v);
}

ConstantEstimate eval_dual_norm(const NormedLattice& X, const Vec& b, long budget, std::uint64_t seed)
{
    ConstantEstimate est;
    est.budget = budget;
    est.seed = seed;
    NormValue v = dual_value(X, b);
    if (v.side == Side::exact) {
        est.value = v.value;
        est.side = Side::exact;
        return est;
    }
    std::size_t starts = static_cast<std::size_t>(std::clamp<long>(budget / 100, 32, 256));
    Vec x;
    dual_by_ascent([&](const Vec& y) { return eval_norm(X, y); }, b, seed, starts, &x);
    double nx = eval_norm(X, x);
    est.value = nx > 0.0 ? dot(x, abs(b)) / nx : 0.0;
    est.side = Side::lower;
    est.witness = {x};
    return est;
}

NormedLattice dual_lattice(const NormedLattice& X)
{
    if (const auto* lp = std::get_if<LpSpec>(&X.norm->v)) return {X.dim, make_lp(conj(lp->p))};
    if (const auto* pd = std::get_if<PredualOfSpec>(&X.norm->v)) return {X.dim, pd->inner};
    return {X.dim, make_predual_of(X.norm)};
}

Vec norming_functional(const NormedLattice& X, const Vec& x, std::uint64_t seed)
{
    check_dim(X, x);
    const std::size_t n = X.dim;
    Vec ax = abs(x);
    if (std::all_of(ax.begin(), ax.end(), [](double v) { return v == 0.0; })) return Vec(n, 0.0);
    if (const auto* lp = std::get_if<LpSpec>(&X.norm->v)) {
        Vec b(n, 0.0);
        if (std::isinf(lp->p)) {
            b[static_cast<std::size_t>(std::max_element(ax.begin(), ax.end()) - ax.begin())] = 1.0;
        } else if (lp->p == 1.0) {
            b.assign(n, 1.0);
        } else {
            double nx = lp_norm(ax, lp->p);
            for (std::size_t i = 0; i < n; ++i) b[i] = std::pow(ax[i] / nx, lp->p - 1.0);
        }
        return b;
    }
    if (const auto* g = std::get_if<GaugeOfSpec>(&X.norm->v)) return gauge_lp(g->body, x).mu;
    Vec b;
    dual_by_ascent([&](const Vec& y) { return dual_value(X, y).value; }, x, seed, 32, &b);
    double nb = dual_value(X, b).value;
    if (nb > 0.0)
        for (auto& v : b) v /= nb;
    return b;
}

Vec sigma_apply(const SeqNorm& sigma, const std::vector<Vec>& xs)
{
    if (xs.empty()) throw std::invalid_argument("sigma_apply: empty family");
    const std::size_t d = xs.front().size();
    for (const auto& x : xs)
        if (x.size() != d) throw std::invalid_argument("sigma_apply: mixed dimensions");
    Vec out(d), col(xs.size());
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < xs.size(); ++i) col[i] = xs[i][j];
        out[j] = sigma(col);
    }
    return out;
}

SeqNorm sigma_dual(const SeqNorm& sigma) { return sigma.dual(); }

Vec matvec(const Matrix& a, const Vec& x)
{
    Vec y(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += a[i][j] * x[j];
        y[i] = s;
    }
    return y;
}

Matrix transpose(const Matrix& a)
{
    if (a.empty()) return {};
    Matrix t(a.front().size(), Vec(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
    return t;
}

Matrix identity_matrix(std::size_t n)
{
    Matrix m(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

Matrix diagonal(const Vec& d)
{
    Matrix m(d.size(), Vec(d.size(), 0.0));
    for (std::size_t i = 0; i < d.size(); ++i) m[i][i] = d[i];
    return m;
}

Vec LinOperator::apply(const Vec& x) const
{
    if (x.size() != domain.dim) throw std::invalid_argument("operator: domain dimension mismatch");
    return matvec(m, x);
}

LinOperator LinOperator::adjoint() const
{
    return {transpose(m), dual_lattice(codomain), dual_lattice(domain)};
}

}  // namespace llab
