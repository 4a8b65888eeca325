// Runs the acceptance criteria and prints one line per criterion.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "latticelab/suites.hpp"

using namespace llab;

namespace {

struct Criterion {
    int id;
    std::string name;
    double limit_s;  // 0 = no runtime limit
    std::function<SuiteResult()> run;
};

}  // namespace

int main(int argc, char** argv)
{
    std::uint64_t seed = 0;
    std::vector<int> only;
    std::string out_dir;
    CLI::App app{"latticelab acceptance suite"};
    app.add_option("--seed", seed, "seed shared by all suites");
    app.add_option("--only", only, "criterion numbers to run (11 reruns whatever else ran)");
    app.add_option("--out", out_dir, "directory for per-criterion JSON reports");
    CLI11_PARSE(app, argc, argv);
    std::set<int> wanted(only.begin(), only.end());
    auto selected = [&](int id) { return wanted.empty() || wanted.count(id) > 0; };

    const long budget = 10000;
    std::vector<Criterion> criteria{
        {1, "renorming sandwich", 60, [&] { return suite_renorming(1000, seed); }},
        {2, "alpha-sequence exactness", 0, [] { return suite_alpha(); }},
        {3, "lpinfty(lp) reproduction", 30, [] { return suite_lpinfty(32); }},
        {4, "three-dimensional example bound", 120, [&] { return suite_example54(budget, seed); }},
        {5, "two-dimensional certificates", 60, [&] { return suite_t41_2d(20, 10, budget, seed); }},
        {6, "q-convexity bound", 0, [&] { return suite_q_convexity(50, budget, seed); }},
        {7, "polarity", 300, [&] { return suite_polarity(10, budget, seed); }},
        {8, "minimal factorization", 0, [&] { return suite_min_factorization(10, 500, budget, seed); }},
        {9, "embedding lemma", 0, [&] { return suite_embedding_lemma(50, seed); }},
        {10, "ideal norms", 0, [&] { return suite_ideal(20, budget, seed); }},
    };

    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
    auto write = [&](const std::string& name, const std::string& text) {
        if (out_dir.empty()) return;
        std::ofstream(std::filesystem::path(out_dir) / name) << text << '\n';
    };
    using clock = std::chrono::steady_clock;
    auto seconds = [](clock::time_point t0) { return std::chrono::duration<double>(clock::now() - t0).count(); };

    int failed = 0;
    std::vector<std::pair<const Criterion*, std::string>> first_runs;
    for (const Criterion& c : criteria) {
        if (!selected(c.id)) continue;
        auto t0 = clock::now();
        SuiteResult r = c.run();
        double s = seconds(t0);
        bool in_time = c.limit_s == 0 || s < c.limit_s;
        bool ok = r.pass && in_time;
        failed += !ok;
        std::printf("criterion %2d %s  %-34s %8.2fs", c.id, ok ? "PASS" : "FAIL", c.name.c_str(), s);
        if (c.limit_s > 0) std::printf(" (limit %.0fs)", c.limit_s);
        std::printf("  %s\n", r.summary.c_str());
        std::fflush(stdout);
        std::string text = dump_json(r.report);
        write("criterion_" + std::to_string(c.id) + ".json", text);
        first_runs.emplace_back(&c, std::move(text));
    }

    if (selected(11)) {
        auto t0 = clock::now();
        std::vector<int> differ;
        for (const auto& [c, text] : first_runs)
            if (dump_json(c->run().report) != text) differ.push_back(c->id);
        bool ok = differ.empty() && !first_runs.empty();
        failed += !ok;
        std::string detail = std::to_string(first_runs.size()) + " suites rerun";
        for (int id : differ) detail += ", criterion " + std::to_string(id) + " differs";
        std::printf("criterion 11 %s  %-34s %8.2fs  %s\n", ok ? "PASS" : "FAIL", "determinism", seconds(t0),
                    detail.c_str());
    }
    return failed == 0 ? 0 : 1;
}
