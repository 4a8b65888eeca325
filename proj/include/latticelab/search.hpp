#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "latticelab/types.hpp"

namespace llab {

using Objective = std::function<double(const Vec&)>;

struct SearchResult {
    Vec x;
    double value = 0.0;
    long evals = 0;
};

struct PatternOptions {
    double step = 0.25;
    double tol = 1e-9;
    long max_evals = 20000;
    std::size_t extra_directions = 0;  // random unit directions added to the compass set
    std::uint64_t seed = 0;
};

// Compass search with step halving; accepts the best improving move per sweep.
SearchResult pattern_maximize(const Objective& f, Vec x0, const PatternOptions& opt);

// Runs fn(i) for i in [0, n) on up to thread_count() workers. fn must only touch slot i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace llab
