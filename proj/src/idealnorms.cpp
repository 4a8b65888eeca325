#include "latticelab/idealnorms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latticelab/constants.hpp"
#include "latticelab/lorentz.hpp"
#include "latticelab/search.hpp"

namespace llab {

void check_rep(const TensorRep& rep)
{
    if (rep.x.empty() || rep.x.size() != rep.y.size()) throw std::invalid_argument("rep: need n >= 1 matching pairs");
    for (const auto& x : rep.x)
        if (x.size() != rep.x.front().size() || x.empty()) throw std::invalid_argument("rep: x vectors differ in length");
    for (const auto& y : rep.y)
        if (y.size() != rep.y.front().size() || y.empty()) throw std::invalid_argument("rep: y vectors differ in length");
    const auto& e = rep.exponents;
    if (!(e.p >= 1.0) || !std::isfinite(e.p)) throw std::invalid_argument("rep: p must be finite and >= 1");
    if (!(e.q >= 1.0) || !std::isfinite(e.q)) throw std::invalid_argument("rep: q must be finite and >= 1");
    if (!(e.p2 == e.p || std::isinf(e.p2))) throw std::invalid_argument("rep: p2 must be p or inf");
    if (!(e.q2 == 1.0 || e.q2 == e.q)) throw std::invalid_argument("rep: q2 must be 1 or q");
}

namespace {

std::vector<Vec> slice(const Vec& z, std::size_t count, std::size_t dim, std::size_t offset)
{
    std::vector<Vec> out(count, Vec(dim));
    for (std::size_t k = 0; k < count; ++k)
        for (std::size_t j = 0; j < dim; ++j) out[k][j] = z[offset + k * dim + j];
    return out;
}

Vec pad(const std::vector<Vec>& fs, std::size_t count, std::size_t dim)
{
    Vec z(count * dim, 0.0);
    for (std::size_t k = 0; k < std::min(count, fs.size()); ++k)
        for (std::size_t j = 0; j < dim; ++j) z[k * dim + j] = fs[k][j];
    return z;
}

struct ThetaSetup {
    const TensorRep& rep;
    NormedLattice Xs;  // dual of the x-side lattice
    NormedLattice Fs;
    double ystar_exp;  // q*
    double ydual_exp;  // q2*

    // weights c_i(Y*) = (sum_j |<y_j*, y_i>|^{q2*})^{1/q2*} / ||(y_j*)||_{l_{q*}(F*)}
    Vec weights(const std::vector<Vec>& ys) const
    {
        Vec norms(ys.size());
        for (std::size_t j = 0; j < ys.size(); ++j) norms[j] = eval_norm(Fs, ys[j]);
        double B = lp_norm(norms, ystar_exp);
        Vec c(rep.y.size(), 0.0);
        if (!(B > 0.0)) return c;
        Vec t(ys.size());
        for (std::size_t i = 0; i < rep.y.size(); ++i) {
            for (std::size_t j = 0; j < ys.size(); ++j) t[j] = dot(ys[j], rep.y[i]);
            c[i] = lp_norm(t, ydual_exp) / B;
        }
        return c;
    }

    double x_part(const std::vector<Vec>& xs, Vec& a) const
    {
        Vec norms(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k) norms[k] = eval_norm(Xs, xs[k]);
        double A = lp_norm(norms, rep.exponents.p);
        a.assign(rep.x.size(), 0.0);
        if (!(A > 0.0)) return 0.0;
        Vec t(xs.size());
        for (std::size_t i = 0; i < rep.x.size(); ++i) {
            for (std::size_t k = 0; k < xs.size(); ++k) t[k] = dot(xs[k], rep.x[i]);
            a[i] = lp_norm(t, rep.exponents.p2) / A;
        }
        return A;
    }
};

}  // namespace

ThetaResult theta_search(const TensorRep& rep, const NormedLattice& X, const NormedLattice& F, std::size_t L,
                         long budget, std::uint64_t seed)
{
    check_rep(rep);
    if (L < 1) throw std::invalid_argument("theta: truncation length must be >= 1");
    if (X.dim != rep.x.front().size() || F.dim != rep.y.front().size())
        throw std::invalid_argument("theta: lattice dimensions differ from the representation");
    const std::size_t dx = X.dim, dy = F.dim, n = rep.x.size();
    ThetaSetup st{rep, dual_lattice(X), dual_lattice(F), conj(rep.exponents.q), conj(rep.exponents.q2)};

    ThetaResult out;
    out.estimate.side = n == 1 ? Side::exact : Side::lower;
    out.estimate.budget = budget;
    out.estimate.seed = seed;

    std::vector<std::size_t> Ls;
    for (std::size_t l = 1; l < L; l *= 2) Ls.push_back(l);
    Ls.push_back(L);

    std::vector<Vec> bx, by;
    double best = 0.0;
    for (std::size_t s = 0; s < Ls.size(); ++s) {
        const std::size_t l = Ls[s];
        auto obj = [&](const Vec& z) {
            Vec a;
            if (!(st.x_part(slice(z, l, dx, 0), a) > 0.0)) return -kInf;
            Vec c = st.weights(slice(z, l, dy, l * dx));
            return dot(a, c);
        };
        std::vector<Vec> starts;
        if (s == 0) {
            for (std::size_t i = 0; i < n; ++i) {
                Vec z(dx + dy);
                Vec fx = norming_functional(X, rep.x[i], seed);
                Vec fy = norming_functional(F, rep.y[i], seed);
                for (std::size_t j = 0; j < dx; ++j) z[j] = rep.x[i][j] < 0.0 ? -fx[j] : fx[j];
                for (std::size_t j = 0; j < dy; ++j) z[dx + j] = rep.y[i][j] < 0.0 ? -fy[j] : fy[j];
                starts.push_back(z);
            }
        } else {
            Vec z = pad(bx, l, dx);
            Vec zy = pad(by, l, dy);
            z.insert(z.end(), zy.begin(), zy.end());
            starts.push_back(z);
        }
        Rng rng(seed, s);
        for (int k = 0; k < 4; ++k) starts.push_back(rng.normal_vec(l * (dx + dy)));
        const long per = std::max<long>(300, budget / static_cast<long>(starts.size() * Ls.size()));
        for (std::size_t k = 0; k < starts.size(); ++k) {
            if (std::all_of(starts[k].begin(), starts[k].end(), [](double v) { return v == 0.0; })) continue;
            PatternOptions opt;
            opt.step = 0.25;
            opt.tol = 1e-10;
            opt.max_evals = per;
            opt.extra_directions = 2;
            opt.seed = mix_seed(seed, 0x7e + 31 * s + k);
            auto r = pattern_maximize(obj, starts[k], opt);
            if (r.value > best || (bx.empty() && r.value >= best)) {
                best = std::max(best, r.value);
                bx = slice(r.x, l, dx, 0);
                by = slice(r.x, l, dy, l * dx);
            }
        }
        if (bx.size() < l) {
            Vec z = pad(bx, l, dx);
            bx = slice(z, l, dx, 0);
            Vec zy = pad(by, l, dy);
            by = slice(zy, l, dy, 0);
        }
        out.stages.push_back({l, best});
    }
    out.estimate.value = best;
    out.xstar = bx;
    out.ystar = by;
    out.estimate.witness = bx;
    out.estimate.witness.insert(out.estimate.witness.end(), by.begin(), by.end());
    return out;
}

ConstantEstimate theta_lower(const TensorRep& rep, const NormedLattice& X, const NormedLattice& F, std::size_t L,
                             long budget, std::uint64_t seed)
{
    return theta_search(rep, X, F, L, budget, seed).estimate;
}

namespace {

// |||z||| by search over Y*, returning the maximizing weight vector
Vec z_norm_search(const ThetaSetup& st, const Vec& z, std::size_t L, std::size_t dy, const std::vector<Vec>& warm,
                  std::uint64_t seed, double& value, Vec& ystar)
{
    auto obj = [&](const Vec& v) { return dot(abs(z), st.weights(slice(v, L, dy, 0))); };
    std::vector<Vec> starts;
    for (const auto& w : warm) starts.push_back(w);
    Rng rng(seed, 0x2b);
    for (int k = 0; k < 3; ++k) starts.push_back(rng.normal_vec(L * dy));
    value = -kInf;
    Vec best;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        PatternOptions opt;
        opt.step = 0.25;
        opt.tol = 1e-10;
        opt.max_evals = 800;
        opt.seed = mix_seed(seed, k);
        auto r = pattern_maximize(obj, starts[k], opt);
        if (r.value > value) {
            value = r.value;
            best = r.x;
        }
    }
    ystar = best;
    return st.weights(slice(best, L, dy, 0));
}

NormedLattice z_lattice(const SolidConvexBody& W)
{
    return {W.dim, make_predual_of(make_gauge_of(W))};
}

}  // namespace

EtaFactorization build_eta_factorization(const TensorRep& rep, const NormedLattice& E, const NormedLattice& F,
                                         std::size_t L, long budget, std::uint64_t seed)
{
    check_rep(rep);
    validate(E);
    validate(F);
    const std::size_t n = rep.x.size(), de = E.dim, df = F.dim;
    if (rep.x.front().size() != de || rep.y.front().size() != df)
        throw std::invalid_argument("eta: lattice dimensions differ from the representation");
    const auto& ex = rep.exponents;
    EtaFactorization out;

    // x_i are functionals on E, so theta pairs them with elements of E. The convexity search for R uses
    // families of length up to 2 dim E, so theta is truncated no shorter than that.
    NormedLattice Es = dual_lattice(E);
    out.theta_L = std::max(L, 2 * de);
    ThetaResult th = theta_search(rep, Es, F, out.theta_L, budget, seed);
    out.theta = th.estimate;

    Matrix Rm(n, Vec(de)), Sm(df, Vec(n));
    for (std::size_t i = 0; i < n; ++i) {
        Rm[i] = rep.x[i];
        for (std::size_t a = 0; a < df; ++a) Sm[a][i] = rep.y[i][a];
    }
    out.u.assign(df, Vec(de, 0.0));
    out.SR.assign(df, Vec(de, 0.0));
    for (std::size_t a = 0; a < df; ++a)
        for (std::size_t b = 0; b < de; ++b)
            for (std::size_t i = 0; i < n; ++i) {
                out.u[a][b] += rep.y[i][a] * rep.x[i][b];
                out.SR[a][b] += Sm[a][i] * Rm[i][b];
            }
    for (std::size_t a = 0; a < df; ++a)
        for (std::size_t b = 0; b < de; ++b)
            out.basis_error = std::max(out.basis_error, std::fabs(out.u[a][b] - out.SR[a][b]));
    out.exact_reproduction = out.basis_error <= 1e-12;

    ThetaSetup st{rep, dual_lattice(Es), dual_lattice(F), conj(ex.q), conj(ex.q2)};
    const std::size_t l = th.ystar.size();
    SolidConvexBody W;
    std::vector<Vec> Wy;  // the functional family behind each weight vector
    W.dim = n;
    W.add(st.weights(th.ystar));
    Wy.push_back(pad(th.ystar, l, df));
    std::vector<Vec> warm{Wy.front()};
    for (std::size_t i = 0; i < n; ++i) {
        Vec fy = norming_functional(F, rep.y[i], seed);
        for (std::size_t j = 0; j < df; ++j) fy[j] = rep.y[i][j] < 0.0 ? -fy[j] : fy[j];
        Vec w(l * df, 0.0);
        std::copy(fy.begin(), fy.end(), w.begin());
        warm.push_back(w);
    }
    auto add_direction = [&](const Vec& z, std::uint64_t s) {
        std::vector<std::pair<double, std::size_t>> score;
        for (std::size_t k = 0; k < W.generators.size(); ++k) score.push_back({-dot(W.generators[k], abs(z)), k});
        const std::size_t top = std::min<std::size_t>(3, score.size());
        std::partial_sort(score.begin(), score.begin() + static_cast<std::ptrdiff_t>(top), score.end());
        std::vector<Vec> starts = warm;
        for (std::size_t k = 0; k < top; ++k) starts.push_back(Wy[score[k].second]);
        double v;
        Vec ys;
        Vec w = z_norm_search(st, z, l, df, starts, s, v, ys);
        W.add(w);
        Wy.push_back(ys);
        return v;
    };
    // For a concave family (z_k), functionals norming S z_k scaled by ||S z_k||^(q-1) give a weight
    // vector on which the family's ratio is at most 1.
    auto add_norming_family = [&](const std::vector<Vec>& zs) {
        std::vector<Vec> ys;
        for (const auto& z : zs) {
            if (ys.size() == l) break;
            Vec sz = matvec(Sm, z);
            double nz = eval_norm(F, sz);
            if (!(nz > 0.0)) continue;
            Vec f = norming_functional(F, sz, seed);
            for (std::size_t j = 0; j < df; ++j) f[j] *= (sz[j] < 0.0 ? -1.0 : 1.0) * std::pow(nz, ex.q - 1.0);
            ys.push_back(std::move(f));
        }
        if (ys.empty()) return;
        W.add(st.weights(ys));
        Wy.push_back(pad(ys, l, df));
    };
    for (std::size_t i = 0; i < n; ++i) {
        Vec e(n, 0.0);
        e[i] = 1.0;
        add_direction(e, mix_seed(seed, 0x20 + i));
    }
    add_direction(Vec(n, 1.0), mix_seed(seed, 0x30));
    for (int k = 0; k < 16; ++k) {
        Rng rng(mix_seed(seed, 0x31), static_cast<std::uint64_t>(k));
        add_direction(abs(rng.normal_vec(n)), mix_seed(seed, 0x32 + k));
    }

    const ConstantKind kR = ConstantKind::convex(ex.p, ex.p2);
    const ConstantKind kS = ConstantKind::concave_kind(ex.q, ex.q2);
    for (int round = 0; round < 96; ++round) {
        out.z_rounds = round + 1;
        out.Z = z_lattice(W);
        out.S = {Sm, out.Z, F};
        out.K_S = estimate_constant(out.S, kS, budget, mix_seed(seed, 0x5));
        if (out.K_S.witness.empty() || out.K_S.value <= 1.0 + 1e-6) break;
        // the concave witness lives where the sampled Z-norm may be too small: refine there
        Vec s = sigma_apply(kS.sigma, out.K_S.witness);
        double before = eval_norm(out.Z, s);
        add_norming_family(out.K_S.witness);
        add_direction(s, mix_seed(seed, 0x60 + round));
        if (!(eval_norm(z_lattice(W), s) > before * (1.0 + 1e-9))) break;
    }
    out.Z = z_lattice(W);
    out.R = {Rm, E, out.Z};
    out.S = {Sm, out.Z, F};
    out.K_S = estimate_constant(out.S, kS, budget, mix_seed(seed, 0x5));
    out.K_R = estimate_constant(out.R, kR, budget, mix_seed(seed, 0x6));
    // the theta optimizer is itself a convexity family for R
    bool nonzero = false;
    for (const auto& x : th.xstar)
        for (double v : x) nonzero = nonzero || v != 0.0;
    if (nonzero) {
        double r = ratio(out.R, kR, th.xstar);
        if (r > out.K_R.value) {
            out.K_R.value = r;
            out.K_R.witness = th.xstar;
        }
    }
    // and the R witness paired with the functional family behind its norming weight vector is a theta family
    if (!out.K_R.witness.empty() && out.K_R.witness.size() <= out.theta_L) {
        std::vector<Vec> imgs;
        for (const auto& x : out.K_R.witness) imgs.push_back(matvec(Rm, x));
        Vec sv = sigma_apply(kR.sigma, imgs);
        std::size_t arg = 0;
        for (std::size_t k = 1; k < W.generators.size(); ++k)
            if (dot(W.generators[k], abs(sv)) > dot(W.generators[arg], abs(sv))) arg = k;
        Vec a;
        std::vector<Vec> xs = out.K_R.witness;
        while (xs.size() < out.theta_L) xs.push_back(Vec(de, 0.0));
        std::vector<Vec> ys = slice(pad(slice(Wy[arg], l, df, 0), out.theta_L, df), out.theta_L, df, 0);
        if (st.x_part(xs, a) > 0.0) {
            double v = dot(a, st.weights(ys));
            if (v > out.theta.value) {
                out.theta.value = v;
                out.theta.witness = xs;
                out.theta.witness.insert(out.theta.witness.end(), ys.begin(), ys.end());
            }
        }
    }
    out.product = out.K_R.value * out.K_S.value;
    out.product_le_theta = out.product <= out.theta.value + 5e-2;
    out.product_agrees = std::fabs(out.product - out.theta.value) <= 5e-2;

    out.unconditional = true;
    for (int k = 0; k < 100; ++k) {
        Rng rng(mix_seed(seed, 0x70), static_cast<std::uint64_t>(k));
        Vec z = rng.normal_vec(n), zf = z;
        for (auto& v : zf)
            if (rng.coin()) v = -v;
        double a = eval_norm(out.Z, z), b = eval_norm(out.Z, zf);
        if (std::fabs(a - b) > 1e-12 * std::max(1.0, a)) out.unconditional = false;
    }
    out.pass = out.exact_reproduction && out.product_agrees && out.unconditional;
    return out;
}

MultiplierReport multiplication_operator_check(const Vec& g, const NormedLattice& source, const NormedLattice& target,
                                               double q2, long budget, std::uint64_t seed)
{
    validate(source);
    validate(target);
    const auto* src = std::get_if<LorentzPInfSpec>(&source.norm->v);
    if (!src || src->r != 1.0) throw std::invalid_argument("multiplier: source must be lorentz_pinfty with r = 1");
    MultiplierReport rep;
    rep.p = src->p;
    if (const auto* t = std::get_if<LpSpec>(&target.norm->v)) {
        rep.q = t->p;
    } else if (const auto* t = std::get_if<LorentzQ1Spec>(&target.norm->v)) {
        rep.q = t->q;
    } else {
        throw std::invalid_argument("multiplier: target must be lp or lorentz_q1");
    }
    if (g.size() != source.dim || g.size() != target.dim) throw std::invalid_argument("multiplier: dimension mismatch");
    for (double v : g)
        if (!(v >= 0.0)) throw std::invalid_argument("multiplier: g must be nonnegative");
    if (!(q2 == 1.0 || q2 == rep.q)) throw std::invalid_argument("multiplier: q2 must be 1 or q");
    rep.q2 = q2;

    for (const auto& v : pinfty_1_ball_vertices(src->measure, src->p)) {
        Vec gv(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) gv[i] = g[i] * v[i];
        rep.norm_D = std::max(rep.norm_D, eval_norm(target, gv));
    }
    LinOperator D{diagonal(g), source, target};
    rep.K_convex = estimate_constant(D, ConstantKind::convex(rep.p, kInf), budget, seed);
    rep.K_concave = estimate_constant(D, ConstantKind::concave_kind(rep.q, q2), budget, mix_seed(seed, 1));
    rep.convex_check = rep.K_convex.value <= rep.norm_D + 1e-6;
    rep.concave_check = rep.K_concave.value <= rep.norm_D + 1e-6;
    rep.pass = rep.convex_check && rep.concave_check;
    return rep;
}

}  // namespace llab
