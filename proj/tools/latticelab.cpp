#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latticelab/reports.hpp"
#include "latticelab/suites.hpp"

#ifndef LATTICELAB_VERSION
#define LATTICELAB_VERSION "0.0.0"
#endif

using namespace llab;

namespace {

// A failed mathematical check: the report is still written, exit code 2.
struct Outcome {
    Json result;
    bool pass = true;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const std::map<std::string, double> kDefaultTolerance = {
    {"sandwich", 1e-9},          {"q_convex", 1e-6},  {"polarity_inside", 1e-6}, {"polarity_violating", 5e-2},
    {"factorization", 1e-6},     {"c42", 1e-9},       {"eta_product", 5e-2},     {"multiplier", 1e-6},
    {"interpolation", 1e-6},
};

struct RunConfig {
    std::uint64_t seed = 0;
    long budget = 10000;
    std::string out;
    std::string lattice;
    std::vector<std::string> tol_args;
    std::map<std::string, double> tol = kDefaultTolerance;

    void resolve_tolerances()
    {
        for (const auto& a : tol_args) {
            auto eq = a.find('=');
            if (eq == std::string::npos) throw UsageError("--tol expects name=value, got '" + a + "'");
            std::string name = a.substr(0, eq);
            auto it = kDefaultTolerance.find(name);
            if (it == kDefaultTolerance.end()) throw UsageError("unknown tolerance '" + name + "'");
            double v = 0.0;
            try {
                v = std::stod(a.substr(eq + 1));
            } catch (const std::exception&) {
                throw UsageError("tolerance '" + name + "' is not a number");
            }
            if (!(v >= it->second)) {
                std::ostringstream msg;
                msg << "tolerance '" << name << "' may only be loosened (default " << it->second << ")";
                throw UsageError(msg.str());
            }
            tol[name] = v;
        }
    }
};

Vec parse_vec(const std::string& s, const std::string& flag)
{
    Vec v;
    std::string tok;
    std::stringstream ss(s);
    while (std::getline(ss, tok, ',')) {
        std::size_t a = tok.find_first_not_of(" \t"), b = tok.find_last_not_of(" \t");
        if (a == std::string::npos) throw UsageError(flag + ": empty entry");
        tok = tok.substr(a, b - a + 1);
        if (tok == "inf" || tok == "infinity") {
            v.push_back(kInf);
            continue;
        }
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError(flag + ": '" + tok + "' is not a number");
        }
    }
    if (v.empty()) throw UsageError(flag + ": expected comma-separated numbers");
    return v;
}

Matrix parse_matrix(const std::string& s, const std::string& flag)
{
    Matrix m;
    std::string row;
    std::stringstream ss(s);
    while (std::getline(ss, row, ';')) m.push_back(parse_vec(row, flag));
    if (m.empty()) throw UsageError(flag + ": expected rows separated by ';'");
    for (const auto& r : m)
        if (r.size() != m.front().size()) throw UsageError(flag + ": rows differ in length");
    return m;
}

std::vector<std::vector<std::size_t>> parse_sets(const std::string& s, const std::string& flag)
{
    std::vector<std::vector<std::size_t>> out;
    for (const Vec& r : parse_matrix(s, flag)) {
        std::vector<std::size_t> set;
        for (double v : r) {
            if (!(v >= 0.0) || v != std::floor(v)) throw UsageError(flag + ": indices must be nonnegative integers");
            set.push_back(static_cast<std::size_t>(v));
        }
        out.push_back(set);
    }
    return out;
}

NormedLattice need_lattice(const RunConfig& cfg)
{
    if (cfg.lattice.empty()) throw UsageError("--lattice <path> is required");
    return load_lattice(cfg.lattice);
}

void need_dim(std::size_t got, std::size_t want, const std::string& what)
{
    if (got != want)
        throw UsageError(what + " has length " + std::to_string(got) + ", expected " + std::to_string(want));
}

struct Leaf {
    CLI::App* app;
    std::string command;
    std::function<Outcome()> run;
};

void add_common(CLI::App* sub, RunConfig& cfg)
{
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--budget", cfg.budget, "search budget")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "write the report here instead of stdout");
    sub->add_option("--lattice", cfg.lattice, "lattice definition document");
    sub->add_option("--tol", cfg.tol_args, "loosen a tolerance: name=value");
}

Json config_json(const RunConfig& cfg, const CLI::App* leaf)
{
    Json c;
    c["seed"] = cfg.seed;
    c["budget"] = cfg.budget;
    c["lattice"] = cfg.lattice.empty() ? Json(nullptr) : Json(cfg.lattice);
    c["out"] = cfg.out.empty() ? Json(nullptr) : Json(cfg.out);
    Json t;
    for (const auto& [k, v] : cfg.tol) t[k] = num(v);
    c["tolerances"] = t;
    Json args;
    for (const CLI::Option* opt : leaf->get_options()) {
        std::string name = opt->get_name(false, true);
        if (opt->count() == 0 || name == "--help" || name == "--seed" || name == "--budget" || name == "--out" ||
            name == "--lattice" || name == "--tol")
            continue;
        const auto& res = opt->results();
        args[name.substr(2)] = res.size() == 1 ? Json(res.front()) : Json(res);
    }
    c["args"] = args;
    return c;
}

StepFunction step_input(const std::string& values, const std::string& weights)
{
    StepFunction f;
    f.values = parse_vec(values, "--values");
    if (weights.empty()) {
        f.measure = AtomicMeasure::counting_measure(f.values.size());
    } else {
        f.measure.weights = parse_vec(weights, "--weights");
        need_dim(f.measure.dim(), f.values.size(), "--weights");
        for (double w : f.measure.weights)
            if (!(w > 0.0) || !std::isfinite(w)) throw UsageError("--weights: every weight must be positive and finite");
    }
    return f;
}

Outcome suite_outcome(const SuiteResult& s)
{
    Outcome o;
    o.result = s.report;
    o.result["summary"] = s.summary;
    o.pass = s.pass;
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg;
    CLI::App app{"latticelab: finite-dimensional Banach lattice computations"};
    app.require_subcommand(1);
    std::vector<Leaf> leaves;

    auto group = [&](const std::string& name, const std::string& desc) {
        CLI::App* g = app.add_subcommand(name, desc);
        g->require_subcommand(1);
        return g;
    };
    auto leaf = [&](CLI::App* g, const std::string& name, const std::string& desc) {
        CLI::App* s = g->add_subcommand(name, desc);
        add_common(s, cfg);
        return s;
    };

    // shared option storage; only one leaf is parsed per run
    std::string x_s, b_s, y_s, a_s, g_s, w1_s, w2_s, values_s, weights_s, matrix_s, body0_s, body1_s, body_s,
        rep_s, cover_s, kind_s = "upper", codomain_s;
    double p = 2.0, p2 = kInf, q = 2.0, q2 = 1.0, r = 1.0, C = 1.0, eps = 1e-6, theta = 0.5;
    double tau = 2.0, sigma = kInf, dom_p = 2.0, cod_p = 2.0, e_p = 2.0, f_p = 2.0;
    std::size_t n = 32, L = 4;
    int samples = 20, qc_families = 100, mf_families = 500, renorm_count = 1000, embed_count = 50, polar_count = 10;
    long multiplicity = 1;

    auto exp_opt = [](CLI::App* s, const std::string& name, double& v, const std::string& desc) {
        return s->add_option(name, v, desc)->transform([](const std::string& in) {
            return (in == "inf" || in == "infinity") ? std::string("inf") : in;
        });
    };

    // norm
    CLI::App* norm = group("norm", "evaluate lattice norms");
    CLI::App* s = leaf(norm, "eval", "norm of a vector");
    s->add_option("--x", x_s, "comma-separated vector")->required();
    leaves.push_back({s, "norm eval", [&] {
                          NormedLattice X = need_lattice(cfg);
                          Vec x = parse_vec(x_s, "--x");
                          need_dim(x.size(), X.dim, "--x");
                          NormValue v = eval_norm_flagged(X, x);
                          Outcome o;
                          o.result["value"] = num(v.value);
                          o.result["side"] = to_string(v.side);
                          return o;
                      }});
    s = leaf(norm, "dual", "dual norm of a functional");
    s->add_option("--b", b_s, "comma-separated functional")->required();
    leaves.push_back({s, "norm dual", [&] {
                          NormedLattice X = need_lattice(cfg);
                          Vec b = parse_vec(b_s, "--b");
                          need_dim(b.size(), X.dim, "--b");
                          Outcome o;
                          o.result = estimate_json(eval_dual_norm(X, b, cfg.budget, cfg.seed));
                          return o;
                      }});

    // lorentz
    CLI::App* lor = group("lorentz", "rearrangements and Lorentz norms of step functions");
    auto step_opts = [&](CLI::App* sub) {
        sub->add_option("--values", values_s, "values on the atoms")->required();
        sub->add_option("--weights", weights_s, "atom weights (default: counting measure)");
    };
    s = leaf(lor, "rearrange", "decreasing rearrangement");
    step_opts(s);
    leaves.push_back({s, "lorentz rearrange", [&] {
                          Outcome o;
                          o.result = to_json(rearrange(step_input(values_s, weights_s)));
                          return o;
                      }});
    s = leaf(lor, "quasinorm", "weak-Lp quasinorm, and the [r]-norm when --r is given");
    step_opts(s);
    s->add_option("--p", p)->required();
    CLI::Option* r_opt = s->add_option("--r", r);
    leaves.push_back({s, "lorentz quasinorm", [&, r_opt] {
                          StepFunction f = step_input(values_s, weights_s);
                          Outcome o;
                          o.result["quasinorm"] = num(quasinorm_pinfty(f, p));
                          if (r_opt->count()) {
                              NormValue v = norm_pinfty_r(f, p, r);
                              o.result["norm_r"] = num(v.value);
                              o.result["norm_r_side"] = to_string(v.side);
                          }
                          return o;
                      }});
    s = leaf(lor, "sandwich", "quasinorm <= [r]-norm <= (p/(p-r))^(1/r) quasinorm");
    step_opts(s);
    s->add_option("--p", p)->required();
    s->add_option("--r", r)->required();
    leaves.push_back({s, "lorentz sandwich", [&] {
                          SandwichReport rep = check_renorming_sandwich(step_input(values_s, weights_s), p, r);
                          double t = cfg.tol.at("sandwich");
                          rep.pass = rep.quasi <= rep.norm_r + t && rep.norm_r <= rep.upper_factor * rep.quasi + t &&
                                     rep.monotone_in_r;
                          Outcome o;
                          o.result = to_json(rep);
                          o.pass = rep.pass;
                          return o;
                      }});
    s = leaf(lor, "embed-lemma", "build the [r] to [1] embedding for a positive step function");
    step_opts(s);
    s->add_option("--p", p)->required();
    s->add_option("--r", r)->required();
    s->add_option("--samples", samples, "random probes (at least 500 are used)");
    leaves.push_back({s, "lorentz embed-lemma", [&] {
                          EmbeddingLemmaReport rep =
                              build_weakLp_embedding(step_input(values_s, weights_s), p, r, samples, cfg.seed);
                          Outcome o;
                          o.result = to_json(rep);
                          o.pass = rep.pass;
                          return o;
                      }});

    // constants
    CLI::App* con = group("constants", "convexity, concavity and estimate constants");
    s = leaf(con, "estimate", "lower bound for a constant of T (identity on --lattice by default)");
    s->add_option("--kind", kind_s, "convex | concave | upper | lower")
        ->check(CLI::IsMember({"convex", "concave", "upper", "lower"}));
    exp_opt(s, "--p", p, "p for convex/upper");
    exp_opt(s, "--p2", p2, "p2 for convex (p <= p2 <= inf)");
    exp_opt(s, "--q", q, "q for concave/lower");
    exp_opt(s, "--q2", q2, "q2 for concave (1 <= q2 <= q)");
    s->add_option("--matrix", matrix_s, "operator rows separated by ';'");
    s->add_option("--codomain", codomain_s, "codomain lattice document (default: --lattice)");
    leaves.push_back({s, "constants estimate", [&] {
                          NormedLattice X = need_lattice(cfg);
                          NormedLattice Y = codomain_s.empty() ? X : load_lattice(codomain_s);
                          Matrix M = matrix_s.empty() ? identity_matrix(X.dim) : parse_matrix(matrix_s, "--matrix");
                          need_dim(M.front().size(), X.dim, "--matrix row");
                          need_dim(M.size(), Y.dim, "--matrix column");
                          ConstantKind k = kind_s == "convex"    ? ConstantKind::convex(p, p2)
                                           : kind_s == "concave" ? ConstantKind::concave_kind(q, q2)
                                           : kind_s == "upper"   ? ConstantKind::upper_estimate(p)
                                                                 : ConstantKind::lower_estimate(q);
                          Outcome o;
                          o.result = estimate_json(estimate_constant({M, X, Y}, k, cfg.budget, cfg.seed));
                          o.result["kind"] = k.label;
                          return o;
                      }});
    s = leaf(con, "gamma", "the constant (p*)^(1/p*)");
    s->add_option("--p", p)->required();
    leaves.push_back({s, "constants gamma", [&] {
                          Outcome o;
                          o.result["gamma"] = num(llab::gamma(p));
                          return o;
                      }});
    s = leaf(con, "q-convex-bound", "q-convexity of a lattice with a constant-1 upper p-estimate");
    s->add_option("--q", q)->required();
    s->add_option("--families", qc_families, "renormed families to sample")->default_val(100);
    leaves.push_back({s, "constants q-convex-bound", [&] {
                          QConvexReport rep = check_q_convexity_bound(need_lattice(cfg), q, cfg.budget, cfg.seed, qc_families);
                          rep.pass = rep.estimate.value <= rep.bound + cfg.tol.at("q_convex") &&
                                     rep.renormed_max_ratio <= 1.0 + 1e-9;
                          Outcome o;
                          o.result = to_json(rep);
                          o.pass = rep.pass;
                          return o;
                      }});

    // geom
    CLI::App* geom = group("geom", "solid convex bodies, polarity and factorizations");
    s = leaf(geom, "gauge", "Minkowski gauge (and support function with --b) of a body");
    s->add_option("--body", body_s, "body document")->required();
    s->add_option("--y", y_s, "point")->required();
    s->add_option("--b", b_s, "functional for the support function");
    leaves.push_back({s, "geom gauge", [&] {
                          SolidConvexBody B = body_from_json(read_json_file(body_s));
                          Vec y = parse_vec(y_s, "--y");
                          need_dim(y.size(), B.dim, "--y");
                          GaugeResult g = gauge_lp(B, y);
                          Outcome o;
                          o.result["gauge"] = num(g.value);
                          o.result["lambda"] = vec_json(g.lambda);
                          o.result["mu"] = vec_json(g.mu);
                          if (!b_s.empty()) {
                              Vec b = parse_vec(b_s, "--b");
                              need_dim(b.size(), B.dim, "--b");
                              o.result["support"] = num(support_function(B, b));
                          }
                          return o;
                      }});
    auto op_opts = [&](CLI::App* sub) {
        sub->add_option("--matrix", matrix_s, "operator rows separated by ';'")->required();
        exp_opt(sub, "--domain-p", dom_p, "domain is l_p");
        exp_opt(sub, "--codomain-p", cod_p, "codomain is l_p");
        exp_opt(sub, "--tau", tau, "tau = l_tau");
        exp_opt(sub, "--sigma", sigma, "sigma = l_sigma");
    };
    auto make_op = [&] {
        Matrix M = parse_matrix(matrix_s, "--matrix");
        return LinOperator{M, lp_lattice(M.front().size(), dom_p), lp_lattice(M.size(), cod_p)};
    };
    s = leaf(geom, "polarity", "sampled check that the polar of C_T is D for the adjoint");
    op_opts(s);
    s->add_option("--samples", samples)->default_val(20);
    leaves.push_back({s, "geom polarity", [&] {
                          PolarityReport rep =
                              verify_polarity(make_op(), SeqNorm{tau}, SeqNorm{sigma}, samples, cfg.budget, cfg.seed);
                          rep.pass = rep.max_rho_inside <= 1.0 + cfg.tol.at("polarity_inside") &&
                                     rep.min_support_violating > 1.0 - cfg.tol.at("polarity_violating");
                          Outcome o;
                          o.result = to_json(rep);
                          o.pass = rep.pass;
                          return o;
                      }});
    s = leaf(geom, "min-factor", "minimal (tau,sigma)-convex factorization");
    op_opts(s);
    s->add_option("--families", mf_families)->default_val(500);
    leaves.push_back({s, "geom min-factor", [&] {
                          FactorizationReport rep = build_minimal_factorization(make_op(), SeqNorm{tau}, SeqNorm{sigma},
                                                                                cfg.budget, cfg.seed, mf_families);
                          double t = cfg.tol.at("factorization");
                          if (!rep.trivial)
                              rep.pass = rep.U0_max <= 1.0 + t && rep.V0_max <= rep.K + t &&
                                         rep.convexity_ratio_max <= 1.0 + t && rep.basis_error <= 1e-12;
                          Outcome o;
                          o.result = to_json(rep);
                          o.pass = rep.pass;
                          return o;
                      }});
    s = leaf(geom, "interpolate", "Calderon interpolation of two bodies");
    s->add_option("--body0", body0_s)->required();
    s->add_option("--body1", body1_s)->required();
    s->add_option("--theta", theta)->required();
    exp_opt(s, "--p", p, "");
    exp_opt(s, "--q", q, "");
    exp_opt(s, "--p2", p2, "p or inf");
    exp_opt(s, "--q2", q2, "1 or q");
    s->add_option("--samples", samples)->default_val(20);
    leaves.push_back({s, "geom interpolate", [&] {
                          SolidConvexBody B0 = body_from_json(read_json_file(body0_s), "/body0");
                          SolidConvexBody B1 = body_from_json(read_json_file(body1_s), "/body1");
                          InterpolationReport rep = interpolate_theta(B0, B1, theta, p, q, p2, q2, samples, cfg.seed);
                          rep.pass = rep.max_midpoint_gauge <= 1.0 + cfg.tol.at("interpolation") &&
                                     rep.max_holder_excess <= 1e-12;
                          Outcome o;
                          o.result = to_json(rep);
                          o.pass = rep.pass;
                          return o;
                      }});

    // embed
    CLI::App* emb = group("embed", "embeddings into l_inf-sums of weak-Lp");
    s = leaf(emb, "check", "search for a certificate at constant C");
    s->add_option("--p", p)->required();
    s->add_option("--C", C)->required();
    s->add_option("--a", a_s, "normalized positive vector")->required();
    s->add_option("--epsilon", eps)->default_val(1e-6);
    leaves.push_back({s, "embed check", [&] {
                          NormedLattice X = need_lattice(cfg);
                          Vec a = parse_vec(a_s, "--a");
                          need_dim(a.size(), X.dim, "--a");
                          T41Result rep = t41_check(X, p, C, a, eps, cfg.budget, cfg.seed);
                          Outcome o;
                          o.result = to_json(rep);
                          o.pass = rep.certified;
                          return o;
                      }});
    s = leaf(emb, "c42", "covering lower bound for the embedding constant; --lattice carries the dual norm");
    s->add_option("--p", p)->required();
    s->add_option("--b", b_s, "normalized positive functional")->required();
    s->add_option("--covering", cover_s, "0-based index sets separated by ';'")->required();
    s->add_option("--multiplicity", multiplicity)->required();
    leaves.push_back({s, "embed c42", [&] {
                          NormedLattice Xs = need_lattice(cfg);
                          Vec b = parse_vec(b_s, "--b");
                          need_dim(b.size(), Xs.dim, "--b");
                          CoveringFamily cov{parse_sets(cover_s, "--covering"), multiplicity};
                          Outcome o;
                          o.result["bound"] = num(c42_bound(Xs, p, b, cov));
                          return o;
                      }});
    s = leaf(emb, "example54", "the three-dimensional counterexample");
    s->add_option("--p", p)->required();
    leaves.push_back({s, "embed example54", [&] {
                          Example54Report rep = reproduce_example54(p, cfg.budget, cfg.seed);
                          rep.c42_check = rep.c42_error <= cfg.tol.at("c42");
                          rep.pass = rep.lower_estimate_check && rep.c42_check && rep.exceeds_one;
                          Outcome o;
                          o.result = to_json(rep);
                          o.pass = rep.pass;
                          return o;
                      }});

    // ideal
    CLI::App* ide = group("ideal", "theta and eta ideal norms");
    auto rep_opts = [&](CLI::App* sub) {
        sub->add_option("--rep", rep_s, "representation document")->required();
        exp_opt(sub, "--e-p", e_p, "E is l_p");
        exp_opt(sub, "--f-p", f_p, "F is l_p");
        sub->add_option("--L", L, "truncation length")->default_val(4)->check(CLI::PositiveNumber);
    };
    s = leaf(ide, "theta", "lower bound for theta of a representation with x_i in E");
    rep_opts(s);
    leaves.push_back({s, "ideal theta", [&] {
                          TensorRep rep = rep_from_json(read_json_file(rep_s));
                          NormedLattice E = lp_lattice(rep.x.front().size(), e_p);
                          NormedLattice F = lp_lattice(rep.y.front().size(), f_p);
                          Outcome o;
                          o.result = to_json(theta_search(rep, E, F, L, cfg.budget, cfg.seed));
                          return o;
                      }});
    s = leaf(ide, "factorize", "u = SR through the lattice Z, x_i functionals on E");
    rep_opts(s);
    leaves.push_back({s, "ideal factorize", [&] {
                          TensorRep rep = rep_from_json(read_json_file(rep_s));
                          NormedLattice E = lp_lattice(rep.x.front().size(), e_p);
                          NormedLattice F = lp_lattice(rep.y.front().size(), f_p);
                          EtaFactorization f = build_eta_factorization(rep, E, F, L, cfg.budget, cfg.seed);
                          f.product_agrees = std::fabs(f.product - f.theta.value) <= cfg.tol.at("eta_product");
                          f.product_le_theta = f.product <= f.theta.value + cfg.tol.at("eta_product");
                          f.pass = f.exact_reproduction && f.product_agrees && f.unconditional;
                          Outcome o;
                          o.result = to_json(f);
                          o.pass = f.pass;
                          return o;
                      }});
    s = leaf(ide, "multiplier", "convexity and concavity of a diagonal operator between Lorentz spaces");
    s->add_option("--g", g_s, "nonnegative diagonal")->required();
    s->add_option("--p", p)->required();
    s->add_option("--w1", w1_s, "source weights (default: counting)");
    s->add_option("--q", q)->required();
    s->add_option("--q2", q2)->default_val(1.0);
    s->add_option("--w2", w2_s, "target weights: Lorentz q,1 target; omitted: l_q target");
    leaves.push_back({s, "ideal multiplier", [&] {
                          Vec g = parse_vec(g_s, "--g");
                          AtomicMeasure w1 = AtomicMeasure::counting_measure(g.size());
                          if (!w1_s.empty()) w1.weights = parse_vec(w1_s, "--w1");
                          need_dim(w1.dim(), g.size(), "--w1");
                          NormedLattice src{g.size(), make_lorentz_pinf(p, 1.0, w1)};
                          NormedLattice dst = lp_lattice(g.size(), q);
                          if (!w2_s.empty()) {
                              AtomicMeasure w2{parse_vec(w2_s, "--w2")};
                              need_dim(w2.dim(), g.size(), "--w2");
                              dst = {g.size(), make_lorentz_q1(q, w2)};
                          }
                          validate(src, "/source");
                          validate(dst, "/target");
                          MultiplierReport rep = multiplication_operator_check(g, src, dst, q2, cfg.budget, cfg.seed);
                          double t = cfg.tol.at("multiplier");
                          rep.convex_check = rep.K_convex.value <= rep.norm_D + t;
                          rep.concave_check = rep.K_concave.value <= rep.norm_D + t;
                          rep.pass = rep.convex_check && rep.concave_check;
                          Outcome o;
                          o.result = to_json(rep);
                          o.pass = rep.pass;
                          return o;
                      }});

    // reproduce
    CLI::App* repro = group("reproduce", "seeded reproduction suites");
    s = leaf(repro, "lpinfty-lp", "l_{p,inf}(l_p) fails the upper p-estimate");
    CLI::Option* lp_p = s->add_option("--p", p, "single p (default: 1.5, 2 and 3)");
    s->add_option("--n", n)->default_val(32);
    leaves.push_back({s, "reproduce lpinfty-lp", [&, lp_p] {
                          if (lp_p->count() == 0) return suite_outcome(suite_lpinfty(n));
                          LpinftyReport rep = reproduce_lpinfty_lp(p, n);
                          Outcome o;
                          o.result = to_json(rep);
                          o.pass = rep.pass;
                          return o;
                      }});
    s = leaf(repro, "example54", "covering bound for the three-dimensional counterexample");
    CLI::Option* ex_p = s->add_option("--p", p, "single p (default: 4/3, 2 and 4)");
    leaves.push_back({s, "reproduce example54", [&, ex_p] {
                          if (ex_p->count() == 0) return suite_outcome(suite_example54(cfg.budget, cfg.seed));
                          Example54Report rep = reproduce_example54(p, cfg.budget, cfg.seed);
                          Outcome o;
                          o.result = to_json(rep);
                          o.pass = rep.pass;
                          return o;
                      }});
    s = leaf(repro, "renorming", "sandwich inequality on random step functions");
    s->add_option("--count", renorm_count, "step functions per (p,r) cell")->default_val(1000);
    leaves.push_back({s, "reproduce renorming", [&] { return suite_outcome(suite_renorming(renorm_count, cfg.seed)); }});
    s = leaf(repro, "embedding-lemma", "weak-Lp embeddings for random positive step functions");
    s->add_option("--count", embed_count)->default_val(50);
    leaves.push_back(
        {s, "reproduce embedding-lemma", [&] { return suite_outcome(suite_embedding_lemma(embed_count, cfg.seed)); }});
    s = leaf(repro, "polarity", "polarity checks on random operators");
    s->add_option("--count", polar_count)->default_val(10);
    leaves.push_back(
        {s, "reproduce polarity", [&] { return suite_outcome(suite_polarity(polar_count, cfg.budget, cfg.seed)); }});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 1;
    }

    const Leaf* chosen = nullptr;
    for (const auto& l : leaves)
        if (l.app->parsed()) chosen = &l;
    if (!chosen) {
        std::cerr << app.help();
        return 1;
    }

    Outcome o;
    try {
        cfg.resolve_tolerances();
        o = chosen->run();
    } catch (const SpecError& e) {
        std::cerr << "latticelab: invalid input " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "latticelab: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "latticelab: " << e.what() << "\n";
        return 1;
    }

    Json report;
    report["command"] = chosen->command;
    report["config"] = config_json(cfg, chosen->app);
    report["version"] = LATTICELAB_VERSION;
    for (auto it = o.result.begin(); it != o.result.end(); ++it) report[it.key()] = it.value();
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    report["wall_time_ms"] = std::round(ms * 1000.0) / 1000.0;

    std::string text = dump_json(report) + "\n";
    if (cfg.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f || !(f << text)) {
            std::cerr << "latticelab: cannot write " << cfg.out << "\n";
            return 1;
        }
    }
    return o.pass ? 0 : 2;
}
