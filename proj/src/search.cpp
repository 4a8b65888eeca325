#include "latticelab/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace llab {

SearchResult pattern_maximize(const Objective& f, Vec x0, const PatternOptions& opt)
{
    const std::size_t n = x0.size();
    std::vector<Vec> dirs;
    for (std::size_t i = 0; i < n; ++i) {
        Vec e(n, 0.0);
        e[i] = 1.0;
        dirs.push_back(e);
    }
    if (opt.extra_directions > 0 && n > 1) {
        Rng rng(opt.seed, 0x5eed);
        for (std::size_t k = 0; k < opt.extra_directions; ++k) {
            Vec d = rng.normal_vec(n);
            double nd = lp_norm(d, 2.0);
            if (nd == 0.0) continue;
            for (auto& v : d) v /= nd;
            dirs.push_back(d);
        }
    }

    SearchResult res;
    res.x = std::move(x0);
    res.value = f(res.x);
    res.evals = 1;
    if (!std::isfinite(res.value)) res.value = -kInf;
    double step = opt.step;
    Vec trial(n);
    while (step > opt.tol && res.evals < opt.max_evals) {
        double best = res.value;
        Vec best_x;
        for (const auto& d : dirs) {
            for (double sgn : {1.0, -1.0}) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = res.x[i] + sgn * step * d[i];
                double v = f(trial);
                ++res.evals;
                if (std::isfinite(v) && v > best) {
                    best = v;
                    best_x = trial;
                }
                if (res.evals >= opt.max_evals) break;
            }
            if (res.evals >= opt.max_evals) break;
        }
        if (!best_x.empty()) {
            res.x = std::move(best_x);
            res.value = best;
        } else {
            step *= 0.5;
        }
    }
    return res;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
{
    const unsigned workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace llab
