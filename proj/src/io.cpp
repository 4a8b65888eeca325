#include "latticelab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace llab {

namespace {

void put_double(std::string& out, double v)
{
    if (std::isnan(v)) {
        out += "\"nan\"";
        return;
    }
    if (std::isinf(v)) {
        out += v > 0 ? "\"inf\"" : "\"-inf\"";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
    std::string_view s(buf);
    if (s.find_first_of(".eEn") == std::string_view::npos) out += ".0";
}

void dump_rec(const Json& j, std::string& out, int indent, int level)
{
    auto newline = [&](int lv) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * lv), ' ');
    };
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            newline(level + 1);
            out += Json(it.key()).dump();
            out += indent < 0 ? ":" : ": ";
            dump_rec(it.value(), out, indent, level + 1);
        }
        newline(level);
        out += '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
        out += '[';
        bool first = true;
        for (const auto& e : j) {
            if (!first) out += flat ? ", " : ",";
            first = false;
            if (!flat) newline(level + 1);
            dump_rec(e, out, indent, level + 1);
        }
        if (!flat) newline(level);
        out += ']';
        return;
    }
    case Json::value_t::number_float:
        put_double(out, j.get<double>());
        return;
    default:
        out += j.dump();
    }
}

std::string ptr_child(const std::string& path, const std::string& key) { return path + "/" + key; }

const Json& need(const Json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object()) throw SpecError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw SpecError(ptr_child(path, key), "missing field");
    return *it;
}

void no_extra_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& path)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw SpecError(ptr_child(path, it.key()), "unknown field");
    }
}

AtomicMeasure read_measure(const Json& j, std::size_t dim, const std::string& path)
{
    if (!j.contains("weights")) return AtomicMeasure::counting_measure(dim);
    return AtomicMeasure{read_vec(j["weights"], ptr_child(path, "weights"))};
}

std::vector<NormedLattice> read_blocks(const Json& j, const std::string& path)
{
    const Json& arr = need(j, "blocks", path);
    if (!arr.is_array()) throw SpecError(ptr_child(path, "blocks"), "expected an array");
    std::vector<NormedLattice> out;
    for (std::size_t i = 0; i < arr.size(); ++i)
        out.push_back(lattice_from_json(arr[i], ptr_child(path, "blocks/" + std::to_string(i))));
    return out;
}

Json blocks_json(const std::vector<NormedLattice>& blocks)
{
    Json arr = Json::array();
    for (const auto& b : blocks) arr.push_back(lattice_to_json(b));
    return arr;
}

}  // namespace

std::string dump_json(const Json& j, int indent)
{
    std::string out;
    dump_rec(j, out, indent, 0);
    return out;
}

Json num(double v)
{
    if (std::isinf(v)) return v > 0 ? Json("inf") : Json("-inf");
    if (std::isnan(v)) return Json("nan");
    return Json(v);
}

Json vec_json(const Vec& v)
{
    Json a = Json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

Json vecs_json(const std::vector<Vec>& vs)
{
    Json a = Json::array();
    for (const auto& v : vs) a.push_back(vec_json(v));
    return a;
}

Json estimate_json(const ConstantEstimate& e)
{
    Json j;
    j["value"] = num(e.value);
    j["side"] = to_string(e.side);
    j["witness"] = vecs_json(e.witness);
    j["seed"] = e.seed;
    j["budget"] = e.budget;
    return j;
}

double read_number(const Json& j, const std::string& path)
{
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "inf" || s == "infinity") return kInf;
    }
    throw SpecError(path, "expected a number");
}

Vec read_vec(const Json& j, const std::string& path)
{
    if (!j.is_array()) throw SpecError(path, "expected an array of numbers");
    Vec v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(read_number(j[i], path + "/" + std::to_string(i)));
    return v;
}

Json norm_to_json(const NormSpec& s)
{
    Json j;
    j["kind"] = kind_name(s);
    if (const auto* n = std::get_if<LpSpec>(&s.v)) {
        j["p"] = num(n->p);
    } else if (const auto* n = std::get_if<LorentzPInfSpec>(&s.v)) {
        j["p"] = num(n->p);
        j["r"] = num(n->r);
        j["weights"] = vec_json(n->measure.weights);
    } else if (const auto* n = std::get_if<LorentzQ1Spec>(&s.v)) {
        j["q"] = num(n->q);
        j["weights"] = vec_json(n->measure.weights);
    } else if (const auto* n = std::get_if<LinfSumSpec>(&s.v)) {
        j["blocks"] = blocks_json(n->blocks);
    } else if (const auto* n = std::get_if<BlockLorentzSpec>(&s.v)) {
        j["outer"] = norm_to_json(*n->outer);
        j["blocks"] = blocks_json(n->blocks);
    } else if (const auto* n = std::get_if<Example54DualSpec>(&s.v)) {
        j["p"] = num(n->p);
    } else if (const auto* n = std::get_if<PredualOfSpec>(&s.v)) {
        j["inner"] = norm_to_json(*n->inner);
    } else if (const auto* n = std::get_if<GaugeOfSpec>(&s.v)) {
        j["generators"] = vecs_json(n->body.generators);
    }
    return j;
}

Json lattice_to_json(const NormedLattice& X)
{
    Json j;
    j["dim"] = X.dim;
    j["norm"] = norm_to_json(*X.norm);
    return j;
}

NormPtr norm_from_json(const Json& j, std::size_t dim, const std::string& path)
{
    const Json& kj = need(j, "kind", path);
    if (!kj.is_string()) throw SpecError(ptr_child(path, "kind"), "expected a string");
    const std::string kind = kj.get<std::string>();
    auto number = [&](const char* key) { return read_number(need(j, key, path), ptr_child(path, key)); };
    if (kind == "lp") {
        no_extra_keys(j, {"kind", "p"}, path);
        return make_lp(number("p"));
    }
    if (kind == "lorentz_pinfty") {
        no_extra_keys(j, {"kind", "p", "r", "weights"}, path);
        double p = number("p");
        double r = j.contains("r") ? number("r") : 1.0;
        return make_lorentz_pinf(p, r, read_measure(j, dim, path));
    }
    if (kind == "lorentz_q1") {
        no_extra_keys(j, {"kind", "q", "weights"}, path);
        return make_lorentz_q1(number("q"), read_measure(j, dim, path));
    }
    if (kind == "linf_sum") {
        no_extra_keys(j, {"kind", "blocks"}, path);
        return make_linf_sum(read_blocks(j, path));
    }
    if (kind == "block_lorentz") {
        no_extra_keys(j, {"kind", "outer", "blocks"}, path);
        auto blocks = read_blocks(j, path);
        NormPtr outer = norm_from_json(need(j, "outer", path), blocks.size(), ptr_child(path, "outer"));
        return make_block_lorentz(outer, std::move(blocks));
    }
    if (kind == "example54_dual") {
        no_extra_keys(j, {"kind", "p"}, path);
        return make_example54_dual(number("p"));
    }
    if (kind == "predual_of") {
        no_extra_keys(j, {"kind", "inner"}, path);
        return make_predual_of(norm_from_json(need(j, "inner", path), dim, ptr_child(path, "inner")));
    }
    if (kind == "gauge_of") {
        no_extra_keys(j, {"kind", "generators"}, path);
        return make_gauge_of(body_from_json(j, path));
    }
    throw SpecError(ptr_child(path, "kind"), "unknown norm kind '" + kind + "'");
}

NormedLattice lattice_from_json(const Json& j, const std::string& path)
{
    if (!j.is_object()) throw SpecError(path, "expected an object");
    no_extra_keys(j, {"dim", "norm"}, path);
    const Json& dj = need(j, "dim", path);
    if (!dj.is_number_unsigned() && !(dj.is_number_integer() && dj.get<long>() > 0))
        throw SpecError(ptr_child(path, "dim"), "dim must be a positive integer");
    NormedLattice X;
    X.dim = dj.get<std::size_t>();
    X.norm = norm_from_json(need(j, "norm", path), X.dim, ptr_child(path, "norm"));
    validate(X, path);
    return X;
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return Json::parse(ss.str());
    } catch (const Json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

NormedLattice load_lattice(const std::string& path) { return lattice_from_json(read_json_file(path)); }

StepFunction step_from_json(const Json& j)
{
    StepFunction f;
    f.values = read_vec(need(j, "values", ""), "/values");
    f.measure = read_measure(j, f.values.size(), "");
    if (f.measure.dim() != f.values.size()) throw SpecError("/weights", "length differs from values");
    for (std::size_t i = 0; i < f.measure.dim(); ++i)
        if (!(f.measure.weights[i] > 0.0) || !std::isfinite(f.measure.weights[i]))
            throw SpecError("/weights/" + std::to_string(i), "weight must be a positive finite number");
    return f;
}

SolidConvexBody body_from_json(const Json& j, const std::string& path)
{
    const Json& arr = need(j, "generators", path);
    if (!arr.is_array() || arr.empty()) throw SpecError(ptr_child(path, "generators"), "expected a nonempty array");
    SolidConvexBody B;
    for (std::size_t k = 0; k < arr.size(); ++k)
        B.add(read_vec(arr[k], ptr_child(path, "generators/" + std::to_string(k))));
    B.dim = B.generators.front().size();
    for (std::size_t k = 0; k < B.generators.size(); ++k)
        if (B.generators[k].size() != B.dim)
            throw SpecError(ptr_child(path, "generators/" + std::to_string(k)), "generator length mismatch");
    return B;
}

Json body_to_json(const SolidConvexBody& B)
{
    Json j;
    j["generators"] = vecs_json(B.generators);
    return j;
}

}  // namespace llab
