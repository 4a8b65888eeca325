#pragma once

#include <cstdint>
#include <string>

#include "latticelab/io.hpp"

namespace llab {

// Seeded batch checks shared by the acceptance binary and `latticelab reproduce`. Reports carry no
// timings, so two runs with the same arguments serialize identically.
struct SuiteResult {
    Json report;
    bool pass = false;
    std::string summary;
};

SuiteResult suite_renorming(int count, std::uint64_t seed);
SuiteResult suite_alpha();
SuiteResult suite_lpinfty(std::size_t n);
SuiteResult suite_example54(long budget, std::uint64_t seed);
SuiteResult suite_t41_2d(int lattices, int directions, long budget, std::uint64_t seed);
SuiteResult suite_q_convexity(int instances, long budget, std::uint64_t seed);
SuiteResult suite_polarity(int operators, long budget, std::uint64_t seed);
SuiteResult suite_min_factorization(int operators, int families, long budget, std::uint64_t seed);
SuiteResult suite_embedding_lemma(int count, std::uint64_t seed);
SuiteResult suite_ideal(int reps, long budget, std::uint64_t seed);

}  // namespace llab
