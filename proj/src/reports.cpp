#include "latticelab/reports.hpp"

#include <algorithm>

namespace llab {

namespace {

Json body_summary(const SolidConvexBody& B)
{
    Json j;
    j["dim"] = B.dim;
    j["generators"] = vecs_json(B.generators);
    return j;
}

Json matrix_json(const Matrix& m) { return vecs_json(m); }

// numerical rank by Gram-Schmidt, relative tolerance 1e-9
std::size_t span_dim(const std::vector<Vec>& gens)
{
    std::vector<Vec> basis;
    double scale = 0.0;
    for (const auto& g : gens) scale = std::max(scale, lp_norm(g, 2.0));
    for (Vec v : gens) {
        for (const auto& e : basis) {
            double c = dot(v, e);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * e[i];
        }
        double nv = lp_norm(v, 2.0);
        if (nv > 1e-9 * scale) {
            for (auto& x : v) x /= nv;
            basis.push_back(v);
        }
    }
    return basis.size();
}

}  // namespace

Json to_json(const RearrangedStep& r)
{
    Json j;
    j["v"] = vec_json(r.v);
    j["T"] = vec_json(r.T);
    return j;
}

Json to_json(const StepFunction& f)
{
    Json j;
    j["values"] = vec_json(f.values);
    j["weights"] = vec_json(f.measure.weights);
    return j;
}

Json to_json(const SandwichReport& r)
{
    Json j;
    j["quasi"] = num(r.quasi);
    j["norm_r"] = num(r.norm_r);
    j["ratio"] = num(r.ratio);
    j["upper_factor"] = num(r.upper_factor);
    j["monotone_in_r"] = r.monotone_in_r;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const EmbeddingLemmaReport& r)
{
    Json j;
    j["M"] = num(r.M);
    j["b"] = vec_json(r.b);
    j["beta"] = vec_json(r.beta);
    j["s"] = num(r.s);
    j["d"] = vec_json(r.d);
    j["nu"] = vec_json(r.nu.weights);
    j["multiplier"] = vec_json(r.multiplier);
    j["C"] = num(r.C);
    j["Sa_norm"] = num(r.Sa_norm);
    j["max_ratio"] = num(r.max_ratio);
    j["worst_probe"] = vec_json(r.worst_probe);
    j["probes"] = r.probes;
    j["lemma_a2_violation"] = num(r.lemma_a2_violation);
    j["pass"] = r.pass;
    return j;
}

Json to_json(const QConvexReport& r)
{
    Json j;
    j["p"] = num(r.p);
    j["q"] = num(r.q);
    j["bound"] = num(r.bound);
    j["estimate"] = estimate_json(r.estimate);
    j["renormed_max_ratio"] = num(r.renormed_max_ratio);
    j["renormed_worst_family"] = vecs_json(r.renormed_worst_family);
    j["renormed_families"] = r.renormed_families;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const LpinftyReport& r)
{
    Json j;
    j["p"] = num(r.p);
    j["n"] = r.n;
    j["A_n"] = num(r.A_n);
    j["vee_ratio"] = num(r.vee_ratio);
    j["max_unit_norm_error"] = num(r.max_unit_norm_error);
    j["unit_norm_check"] = r.unit_norm_check;
    j["ratio_check"] = r.ratio_check;
    Json rows = Json::array();
    for (const auto& g : r.growth_table) {
        Json row;
        row["n"] = g.n;
        row["A_n"] = num(g.A_n);
        row["vee_ratio"] = num(g.vee_ratio);
        row["Ap_over_H"] = num(g.Ap_over_H);
        rows.push_back(row);
    }
    j["growth_table"] = rows;
    j["growth_increasing"] = r.growth_increasing;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const DualityGapReport& r)
{
    Json j;
    j["L1"] = estimate_json(r.L1);
    j["L2"] = estimate_json(r.L2);
    j["gap"] = num(r.gap);
    j["oracle"] = r.oracle;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const PolarityReport& r)
{
    Json j;
    j["samples"] = r.samples;
    j["inside_C_polar"] = r.inside_C_polar;
    j["with_D_violation"] = r.with_D_violation;
    j["max_rho_inside"] = num(r.max_rho_inside);
    j["min_support_violating"] = num(r.min_support_violating);
    j["max_abs_gap"] = num(r.max_abs_gap);
    j["generators"] = r.generators;
    Json cs = Json::array();
    for (const auto& c : r.counterexamples) {
        Json e;
        e["u"] = vec_json(c.u);
        e["support"] = num(c.support);
        e["rho"] = num(c.rho);
        e["check"] = c.check;
        cs.push_back(e);
    }
    j["counterexamples"] = cs;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const FactorizationReport& r)
{
    Json j;
    j["kind"] = r.kind;
    j["dim_Y"] = r.Y.dim;
    j["span_dim"] = span_dim(r.body.generators);
    Json checks;
    checks["U0"] = num(r.U0_max);
    checks["V0"] = num(r.V0_max);
    checks["convexity_ratio_max"] = num(r.convexity_ratio_max);
    j["norm_checks"] = checks;
    j["trivial"] = r.trivial;
    j["K"] = num(r.K);
    j["basis_error"] = num(r.basis_error);
    j["U0_pass"] = r.U0_pass;
    j["V0_pass"] = r.V0_pass;
    j["convexity_pass"] = r.convexity_pass;
    j["families"] = r.families;
    j["worst_family"] = vecs_json(r.worst_family);
    j["U"] = matrix_json(r.U.m);
    j["V"] = matrix_json(r.V.m);
    j["body"] = body_summary(r.body);
    j["pass"] = r.pass;
    return j;
}

Json to_json(const InterpolationReport& r)
{
    Json j;
    Json ex;
    ex["p_theta"] = num(r.exponents.p_theta);
    ex["q_theta"] = num(r.exponents.q_theta);
    ex["pbar2"] = num(r.exponents.pbar2);
    ex["qbar2"] = num(r.exponents.qbar2);
    ex["form"] = r.exponents.form;
    j["exponents"] = ex;
    j["generator_pairs"] = r.generator_pairs;
    j["sampled_pairs"] = r.sampled_pairs;
    j["midpoint_checks"] = r.midpoint_checks;
    j["max_midpoint_gauge"] = num(r.max_midpoint_gauge);
    j["max_holder_excess"] = num(r.max_holder_excess);
    j["C_theta"] = body_summary(r.C_theta);
    j["pass"] = r.pass;
    return j;
}

Json to_json(const EmbeddingCertificate& c)
{
    Json j;
    j["C"] = num(c.C);
    j["p"] = num(c.p);
    j["a"] = vec_json(c.a);
    j["b"] = vec_json(c.b);
    j["d"] = vec_json(c.d);
    j["epsilon"] = num(c.epsilon);
    j["pairing"] = num(c.pairing);
    Json ms = Json::array();
    for (const auto& m : c.subset_margins) {
        Json e;
        e["subset"] = m.subset;
        e["margin"] = num(m.margin);
        ms.push_back(e);
    }
    j["subset_margins"] = ms;
    j["max_margin"] = num(c.max_margin);
    j["valid"] = c.valid;
    return j;
}

Json to_json(const T41Result& r)
{
    Json j;
    j["certified"] = r.certified;
    if (r.certified) j["certificate"] = to_json(r.certificate);
    j["best_pairing"] = num(r.best_pairing);
    j["best_b"] = vec_json(r.best_b);
    j["a_norm"] = num(r.a_norm);
    j["a_norm_side"] = to_string(r.a_norm_side);
    j["subset_norm_side"] = to_string(r.subset_norm_side);
    j["evals"] = r.evals;
    return j;
}

Json to_json(const Example54Report& r)
{
    Json j;
    j["p"] = num(r.p);
    j["p_star"] = num(r.p_star);
    j["lower_estimate_constant"] = num(r.lower_estimate_constant);
    j["lower_estimate_witness"] = vecs_json(r.lower_estimate_witness);
    j["lower_estimate_check"] = r.lower_estimate_check;
    j["bound"] = num(r.c42);
    j["closed_form"] = num(r.closed_form);
    j["c42_error"] = num(r.c42_error);
    j["c42_check"] = r.c42_check;
    j["exceeds_one"] = r.exceeds_one;
    Json bracket;
    bracket["lower"] = num(r.c42);
    bracket["upper"] = num(r.gamma);
    j["bracket"] = bracket;
    j["symmetric_min_C"] = num(r.symmetric_min_C);
    j["symmetric_C1_certified"] = r.symmetric_C1_certified;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const ThetaResult& r)
{
    Json j = estimate_json(r.estimate);
    Json st = Json::array();
    for (const auto& s : r.stages) {
        Json e;
        e["L"] = s.L;
        e["value"] = num(s.value);
        st.push_back(e);
    }
    j["stages"] = st;
    j["xstar"] = vecs_json(r.xstar);
    j["ystar"] = vecs_json(r.ystar);
    return j;
}

Json to_json(const EtaFactorization& r)
{
    Json j;
    j["dim_Z"] = r.Z.dim;
    j["R"] = matrix_json(r.R.m);
    j["S"] = matrix_json(r.S.m);
    j["u"] = matrix_json(r.u);
    j["SR"] = matrix_json(r.SR);
    j["basis_error"] = num(r.basis_error);
    j["exact_reproduction"] = r.exact_reproduction;
    j["theta"] = estimate_json(r.theta);
    j["theta_L"] = r.theta_L;
    j["K_R"] = estimate_json(r.K_R);
    j["K_S"] = estimate_json(r.K_S);
    Json pb;
    pb["product"] = num(r.product);
    pb["theta"] = num(r.theta.value);
    j["product_bound"] = pb;
    j["product_le_theta"] = r.product_le_theta;
    j["product_agrees"] = r.product_agrees;
    j["unconditional"] = r.unconditional;
    j["z_rounds"] = r.z_rounds;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const MultiplierReport& r)
{
    Json j;
    j["p"] = num(r.p);
    j["q"] = num(r.q);
    j["q2"] = num(r.q2);
    j["norm_D"] = num(r.norm_D);
    j["K_convex"] = estimate_json(r.K_convex);
    j["K_concave"] = estimate_json(r.K_concave);
    j["convex_check"] = r.convex_check;
    j["concave_check"] = r.concave_check;
    j["pass"] = r.pass;
    return j;
}

TensorRep rep_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("pairs")) throw SpecError("/pairs", "missing field");
    const Json& pairs = j["pairs"];
    if (!pairs.is_array() || pairs.empty()) throw SpecError("/pairs", "expected a nonempty array");
    TensorRep rep;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        std::string path = "/pairs/" + std::to_string(i);
        if (!pairs[i].is_object() || !pairs[i].contains("x") || !pairs[i].contains("y"))
            throw SpecError(path, "expected {\"x\": [...], \"y\": [...]}");
        rep.x.push_back(read_vec(pairs[i]["x"], path + "/x"));
        rep.y.push_back(read_vec(pairs[i]["y"], path + "/y"));
    }
    if (!j.contains("exponents")) throw SpecError("/exponents", "missing field");
    const Json& e = j["exponents"];
    for (const char* k : {"p", "p2", "q", "q2"})
        if (!e.contains(k)) throw SpecError(std::string("/exponents/") + k, "missing field");
    rep.exponents.p = read_number(e["p"], "/exponents/p");
    rep.exponents.p2 = read_number(e["p2"], "/exponents/p2");
    rep.exponents.q = read_number(e["q"], "/exponents/q");
    rep.exponents.q2 = read_number(e["q2"], "/exponents/q2");
    try {
        check_rep(rep);
    } catch (const std::invalid_argument& ex) {
        throw SpecError("", ex.what());
    }
    return rep;
}

Json rep_to_json(const TensorRep& rep)
{
    Json j;
    Json pairs = Json::array();
    for (std::size_t i = 0; i < rep.x.size(); ++i) {
        Json pr;
        pr["x"] = vec_json(rep.x[i]);
        pr["y"] = vec_json(rep.y[i]);
        pairs.push_back(pr);
    }
    j["pairs"] = pairs;
    Json e;
    e["p"] = num(rep.exponents.p);
    e["p2"] = num(rep.exponents.p2);
    e["q"] = num(rep.exponents.q);
    e["q2"] = num(rep.exponents.q2);
    j["exponents"] = e;
    return j;
}

}  // namespace llab
