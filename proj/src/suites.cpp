#include "latticelab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "latticelab/reports.hpp"
#include "latticelab/search.hpp"

namespace llab {

namespace {

std::string fmt(const char* f, double a, double b = 0.0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t suite, std::uint64_t t)
{
    return mix_seed(mix_seed(seed, suite), t);
}

}  // namespace

SuiteResult suite_renorming(int count, std::uint64_t seed)
{
    SuiteResult out;
    out.pass = true;
    Json cells = Json::array();
    long checked = 0;
    for (double p : {1.5, 2.0, 3.0}) {
        for (double r : {1.0, 1.2, (p + 1.0) / 2.0}) {
            int failures = 0;
            double max_low_gap = -kInf;   // quasi - norm_r
            double max_high_gap = -kInf;  // norm_r - factor * quasi
            double max_prefix_gap = 0.0;
            int prefix_checks = 0;
            Json worst;
            for (int t = 0; t < count; ++t) {
                Rng rng(trial_seed(seed, 1, static_cast<std::uint64_t>(t)), static_cast<std::uint64_t>(p * 1000 + r * 10));
                std::size_t n = 1 + rng.index(12);
                StepFunction f;
                f.values = rng.normal_vec(n);
                for (auto& v : f.values)
                    if (rng.coin(0.15)) v = 0.0;
                f.measure.weights.resize(n);
                for (auto& w : f.measure.weights) w = rng.uniform(0.05, 3.0);
                SandwichReport s = check_renorming_sandwich(f, p, r);
                double lo = s.quasi - s.norm_r;
                double hi = s.norm_r - s.upper_factor * s.quasi;
                if (lo > max_low_gap || hi > max_high_gap) {
                    worst = to_json(f);
                    worst["report"] = to_json(s);
                }
                max_low_gap = std::max(max_low_gap, lo);
                max_high_gap = std::max(max_high_gap, hi);
                if (!s.pass) ++failures;

                StepFunction c = StepFunction::counting(f.values);
                double gap = std::fabs(norm_pinfty_r_prefix(c, p, r) - norm_pinfty_r_enumerate(c, p, r));
                max_prefix_gap = std::max(max_prefix_gap, gap);
                ++prefix_checks;
                ++checked;
            }
            bool ok = failures == 0 && max_low_gap <= 1e-9 && max_high_gap <= 1e-9 && max_prefix_gap <= 1e-9;
            Json cell;
            cell["p"] = num(p);
            cell["r"] = num(r);
            cell["upper_factor"] = num(std::pow(p / (p - r), 1.0 / r));
            cell["count"] = count;
            cell["failures"] = failures;
            cell["max_lower_gap"] = num(max_low_gap);
            cell["max_upper_gap"] = num(max_high_gap);
            cell["prefix_checks"] = prefix_checks;
            cell["max_prefix_gap"] = num(max_prefix_gap);
            cell["worst"] = worst;
            cell["pass"] = ok;
            cells.push_back(cell);
            out.pass = out.pass && ok;
        }
    }
    out.report["seed"] = seed;
    out.report["cells"] = cells;
    out.report["pass"] = out.pass;
    out.summary = fmt("%.0f step functions over 9 (p,r) cells", static_cast<double>(checked));
    return out;
}

SuiteResult suite_alpha()
{
    SuiteResult out;
    double worst = 0.0;
    double worst_quasi = 0.0;
    Json rows = Json::array();
    for (double p : {1.5, 2.0, 4.0}) {
        double wp = 0.0;
        for (std::size_t n = 2; n <= 64; ++n) {
            StepFunction f;
            f.values.resize(n);
            for (std::size_t k = 0; k < n; ++k) f.values[k] = alpha_coefficient(k, p);
            f.measure = AtomicMeasure::counting_measure(n);
            double v = norm_pinfty_r_prefix(f, p, 1.0);
            wp = std::max(wp, std::fabs(v - 1.0));
            worst_quasi = std::max(worst_quasi, std::fabs(quasinorm_pinfty(f, p) - 1.0));
        }
        Json row;
        row["p"] = num(p);
        row["max_error"] = num(wp);
        rows.push_back(row);
        worst = std::max(worst, wp);
    }
    out.pass = worst <= 1e-12 && worst_quasi <= 1e-12;
    out.report["rows"] = rows;
    out.report["max_error"] = num(worst);
    out.report["max_quasinorm_error"] = num(worst_quasi);
    out.report["pass"] = out.pass;
    out.summary = fmt("max |norm - 1| = %.3g", worst);
    return out;
}

SuiteResult suite_lpinfty(std::size_t n)
{
    SuiteResult out;
    out.pass = true;
    Json rows = Json::array();
    for (double p : {1.5, 2.0, 3.0}) {
        LpinftyReport r = reproduce_lpinfty_lp(p, n);
        double a2 = lpinfty_A(p, 2), a8 = lpinfty_A(p, 8), a32 = lpinfty_A(p, 32);
        bool growth = a32 > a8 && a8 > a2;
        Json j = to_json(r);
        j["A_2"] = num(a2);
        j["A_8"] = num(a8);
        j["A_32"] = num(a32);
        j["A_32_gt_A_8_gt_A_2"] = growth;
        rows.push_back(j);
        out.pass = out.pass && r.pass && growth;
    }
    out.report["n"] = n;
    out.report["reports"] = rows;
    out.report["pass"] = out.pass;
    out.summary = "p in {1.5, 2, 3}, n = " + std::to_string(n);
    return out;
}

SuiteResult suite_example54(long budget, std::uint64_t seed)
{
    SuiteResult out;
    out.pass = true;
    Json rows = Json::array();
    double worst = 0.0;
    for (double p : {4.0 / 3.0, 2.0, 4.0}) {
        Example54Report r = reproduce_example54(p, budget, seed);
        rows.push_back(to_json(r));
        worst = std::max(worst, r.c42_error);
        out.pass = out.pass && r.pass;
    }
    out.report["reports"] = rows;
    out.report["pass"] = out.pass;
    out.summary = fmt("max |c42 - closed form| = %.3g", worst);
    return out;
}

SuiteResult suite_t41_2d(int lattices, int directions, long budget, std::uint64_t seed)
{
    SuiteResult out;
    const double C = 1.0 + 1e-4;
    std::vector<Json> rows(static_cast<std::size_t>(lattices));
    std::vector<int> certified(static_cast<std::size_t>(lattices), 0);
    parallel_for(static_cast<std::size_t>(lattices), [&](std::size_t l) {
        Rng rng(trial_seed(seed, 5, l));
        double p = rng.uniform(1.2, 4.0);
        NormedLattice X = lp_lattice(2, p);
        if (l % 2 == 1) X = {2, make_lorentz_pinf(p, 1.0, AtomicMeasure{{rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0)}})};
        Json row;
        row["lattice"] = lattice_to_json(X);
        row["p"] = num(p);
        Json fails = Json::array();
        double worst_pairing = kInf;
        for (int k = 0; k < directions; ++k) {
            Vec a{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
            if (k == 0) a = {1.0, 0.0};
            double na = eval_norm(X, a);
            for (auto& v : a) v /= na;
            T41Result r = t41_check(X, p, C, a, 1e-6, budget, trial_seed(seed, 50 + l, static_cast<std::uint64_t>(k)));
            worst_pairing = std::min(worst_pairing, r.best_pairing);
            if (r.certified && r.certificate.valid) {
                ++certified[l];
            } else {
                Json f = to_json(r);
                f["a"] = vec_json(a);
                fails.push_back(f);
            }
        }
        row["certified"] = certified[l];
        row["min_best_pairing"] = num(worst_pairing);
        row["failures"] = fails;
        rows[l] = row;
    });
    int total = 0;
    Json arr = Json::array();
    for (std::size_t l = 0; l < rows.size(); ++l) {
        total += certified[l];
        arr.push_back(rows[l]);
    }
    out.pass = total == lattices * directions;
    out.report["C"] = num(C);
    out.report["lattices"] = arr;
    out.report["certified"] = total;
    out.report["attempted"] = lattices * directions;
    out.report["pass"] = out.pass;
    out.summary = fmt("%.0f of %.0f directions certified", total, static_cast<double>(lattices * directions));
    return out;
}

SuiteResult suite_q_convexity(int instances, long budget, std::uint64_t seed)
{
    SuiteResult out;
    std::vector<Json> rows(static_cast<std::size_t>(instances));
    std::vector<char> ok(static_cast<std::size_t>(instances), 0);
    parallel_for(static_cast<std::size_t>(instances), [&](std::size_t t) {
        Rng rng(trial_seed(seed, 6, t));
        double p = rng.uniform(1.3, 4.0);
        std::size_t n = 2 + rng.index(3);
        auto weights = [&](std::size_t m) {
            AtomicMeasure mu;
            for (std::size_t i = 0; i < m; ++i) mu.weights.push_back(rng.uniform(0.2, 3.0));
            return mu;
        };
        NormedLattice X;
        switch (t % 3) {
        case 0:
            X = lp_lattice(n, p);
            break;
        case 1:
            X = {n, make_lorentz_pinf(p, 1.0, weights(n))};
            break;
        default: {
            NormedLattice a = lp_lattice(1 + rng.index(2), p);
            NormedLattice b{2, make_lorentz_pinf(p, 1.0, weights(2))};
            X = {a.dim + b.dim, make_linf_sum({a, b})};
        }
        }
        double q = rng.uniform(1.0, p - 0.05);
        if (t % 5 == 0) q = 1.0;
        QConvexReport r = check_q_convexity_bound(X, q, budget, trial_seed(seed, 60, t), 100);
        Json j = to_json(r);
        j["lattice"] = lattice_to_json(X);
        rows[t] = j;
        ok[t] = r.pass;
    });
    int passed = 0;
    double worst_slack = kInf;
    Json arr = Json::array();
    for (std::size_t t = 0; t < rows.size(); ++t) {
        passed += ok[t];
        worst_slack = std::min(worst_slack, read_number(rows[t]["bound"], "") - read_number(rows[t]["estimate"]["value"], ""));
        arr.push_back(rows[t]);
    }
    out.pass = passed == instances;
    out.report["instances"] = arr;
    out.report["passed"] = passed;
    out.report["min_bound_slack"] = num(worst_slack);
    out.report["pass"] = out.pass;
    out.summary = fmt("%.0f of %.0f instances within the bound", passed, instances);
    return out;
}

namespace {

LinOperator random_operator(Rng& rng, std::size_t n, std::size_t d)
{
    double e = rng.uniform(1.2, 3.7), x = rng.uniform(1.2, 3.7);
    Matrix M(d, Vec(n));
    for (auto& r : M)
        for (auto& v : r) v = rng.normal();
    return {M, lp_lattice(n, e), lp_lattice(d, x)};
}

Json operator_json(const LinOperator& T)
{
    Json j;
    j["matrix"] = vecs_json(T.m);
    j["domain"] = lattice_to_json(T.domain);
    j["codomain"] = lattice_to_json(T.codomain);
    return j;
}

}  // namespace

SuiteResult suite_polarity(int operators, long budget, std::uint64_t seed)
{
    SuiteResult out;
    std::vector<Json> rows(static_cast<std::size_t>(operators));
    std::vector<char> ok(static_cast<std::size_t>(operators), 0);
    parallel_for(static_cast<std::size_t>(operators), [&](std::size_t t) {
        Rng rng(trial_seed(seed, 7, t));
        std::size_t n = 2 + rng.index(2), d = 2 + rng.index(2);
        double p = rng.uniform(1.2, 3.7);
        LinOperator T = random_operator(rng, n, d);
        SeqNorm tau{p}, sigma{t % 2 ? kInf : p};
        PolarityReport r = verify_polarity(T, tau, sigma, 20, budget, trial_seed(seed, 70, t));
        Json j;
        j["operator"] = operator_json(T);
        j["tau"] = num(tau.p);
        j["sigma"] = num(sigma.p);
        j["report"] = to_json(r);
        rows[t] = j;
        ok[t] = r.pass;
    });
    int passed = 0;
    Json arr = Json::array();
    for (std::size_t t = 0; t < rows.size(); ++t) {
        passed += ok[t];
        arr.push_back(rows[t]);
    }
    out.pass = passed == operators;
    out.report["operators"] = arr;
    out.report["passed"] = passed;
    out.report["pass"] = out.pass;
    out.summary = fmt("%.0f of %.0f operators pass both directions", passed, operators);
    return out;
}

SuiteResult suite_min_factorization(int operators, int families, long budget, std::uint64_t seed)
{
    SuiteResult out;
    std::vector<Json> rows(static_cast<std::size_t>(operators));
    std::vector<char> ok(static_cast<std::size_t>(operators), 0);
    parallel_for(static_cast<std::size_t>(operators), [&](std::size_t t) {
        Rng rng(trial_seed(seed, 8, t));
        std::size_t n = 2 + rng.index(3), d = 2 + rng.index(3);
        double p = rng.uniform(1.2, 3.7);
        LinOperator T = random_operator(rng, n, d);
        SeqNorm tau{p}, sigma{t % 2 ? kInf : p};
        FactorizationReport r = build_minimal_factorization(T, tau, sigma, budget, trial_seed(seed, 80, t), families);
        Json j;
        j["operator"] = operator_json(T);
        j["tau"] = num(tau.p);
        j["sigma"] = num(sigma.p);
        Json rep = to_json(r);
        rep.erase("body");
        rep["generators"] = r.body.generators.size();
        j["report"] = rep;
        rows[t] = j;
        ok[t] = r.pass;
    });
    int passed = 0;
    Json arr = Json::array();
    for (std::size_t t = 0; t < rows.size(); ++t) {
        passed += ok[t];
        arr.push_back(rows[t]);
    }
    out.pass = passed == operators;
    out.report["operators"] = arr;
    out.report["passed"] = passed;
    out.report["pass"] = out.pass;
    out.summary = fmt("%.0f of %.0f factorizations verified", passed, operators);
    return out;
}

SuiteResult suite_embedding_lemma(int count, std::uint64_t seed)
{
    SuiteResult out;
    std::vector<Json> rows(static_cast<std::size_t>(count));
    std::vector<char> ok(static_cast<std::size_t>(count), 0);
    parallel_for(static_cast<std::size_t>(count), [&](std::size_t t) {
        Rng rng(trial_seed(seed, 9, t));
        std::size_t n = 1 + rng.index(6);
        double p = rng.uniform(1.3, 4.0);
        double r = t % 4 == 0 ? 1.0 : rng.uniform(1.0, p - 0.05);
        StepFunction a;
        for (std::size_t i = 0; i < n; ++i) {
            a.values.push_back(rng.uniform(0.1, 2.0));
            a.measure.weights.push_back(rng.uniform(0.1, 2.0));
        }
        double M = a.measure.total();
        double ar = 0.0;
        for (std::size_t i = 0; i < n; ++i) ar += a.measure.weights[i] * std::pow(a.values[i], r);
        double C = std::pow(M, 1.0 / p - 1.0 / r) * std::pow(ar, 1.0 / r);
        double target = rng.uniform(0.3, 1.0);
        for (auto& v : a.values) v *= target / C;
        EmbeddingLemmaReport rep = build_weakLp_embedding(a, p, r, 500, trial_seed(seed, 90, t));
        Json j;
        j["a"] = to_json(a);
        j["p"] = num(p);
        j["r"] = num(r);
        j["report"] = to_json(rep);
        rows[t] = j;
        ok[t] = rep.pass;
    });
    int passed = 0;
    Json arr = Json::array();
    for (std::size_t t = 0; t < rows.size(); ++t) {
        passed += ok[t];
        arr.push_back(rows[t]);
    }
    out.pass = passed == count;
    out.report["instances"] = arr;
    out.report["passed"] = passed;
    out.report["pass"] = out.pass;
    out.summary = fmt("%.0f of %.0f embeddings verified", passed, count);
    return out;
}

SuiteResult suite_ideal(int reps, long budget, std::uint64_t seed)
{
    SuiteResult out;
    std::vector<Json> rows(static_cast<std::size_t>(reps));
    std::vector<char> ok(static_cast<std::size_t>(reps), 0);
    std::vector<double> single_err(static_cast<std::size_t>(reps), 0.0);
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t t) {
        Rng rng(trial_seed(seed, 10, t));
        std::size_t de = 1 + rng.index(3), df = 1 + rng.index(3), n = 1 + rng.index(3);
        TensorRep rep;
        for (std::size_t i = 0; i < n; ++i) {
            rep.x.push_back(rng.normal_vec(de));
            rep.y.push_back(rng.normal_vec(df));
        }
        double p = rng.uniform(1.0, 3.0), q = rng.uniform(1.0, 3.0);
        rep.exponents = {p, rng.coin() ? p : kInf, q, rng.coin() ? 1.0 : q};
        double ep = rng.uniform(1.2, 3.2), fp = rng.uniform(1.2, 3.2);
        NormedLattice E = lp_lattice(de, ep), F = lp_lattice(df, fp);
        EtaFactorization r = build_eta_factorization(rep, E, F, 4, budget, trial_seed(seed, 100, t));

        // single pair: theta of x (x) y is ||x|| ||y|| with x measured in E*
        TensorRep one{{rep.x.front()}, {rep.y.front()}, rep.exponents};
        ThetaResult th = theta_search(one, dual_lattice(E), F, 4, budget, trial_seed(seed, 110, t));
        double expect = lp_norm(one.x.front(), conj(ep)) * lp_norm(one.y.front(), fp);
        single_err[t] = std::fabs(th.estimate.value - expect);
        bool monotone = true;
        for (std::size_t s = 1; s < th.stages.size(); ++s)
            if (th.stages[s].value < th.stages[s - 1].value) monotone = false;

        Json j;
        j["rep"] = rep_to_json(rep);
        j["E"] = lattice_to_json(E);
        j["F"] = lattice_to_json(F);
        Json rj = to_json(r);
        for (const char* k : {"R", "S", "u", "SR"}) rj.erase(k);
        j["report"] = rj;
        Json sp;
        sp["theta"] = num(th.estimate.value);
        sp["norm_product"] = num(expect);
        sp["error"] = num(single_err[t]);
        sp["monotone_in_L"] = monotone;
        j["single_pair"] = sp;
        rows[t] = j;
        ok[t] = r.exact_reproduction && r.product_agrees && single_err[t] <= 1e-6 && monotone;
    });
    int passed = 0;
    double worst_single = 0.0;
    Json arr = Json::array();
    for (std::size_t t = 0; t < rows.size(); ++t) {
        passed += ok[t];
        worst_single = std::max(worst_single, single_err[t]);
        arr.push_back(rows[t]);
    }
    out.pass = passed == reps;
    out.report["reps"] = arr;
    out.report["passed"] = passed;
    out.report["max_single_pair_error"] = num(worst_single);
    out.report["pass"] = out.pass;
    out.summary = fmt("%.0f of %.0f reps factor with matching product", passed, reps);
    return out;
}

}  // namespace llab
