#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "poisonmt/corpus.hpp"

namespace poisonmt {

struct MixturePlan {
    double temperature = 1.5;
    bool uniform = false; // T -> infinity limit as an explicit variant
    // direction string "ms-jv" -> size fed to the sampling distribution;
    // empty means "use the actual corpus sizes".
    std::map<std::string, std::size_t> per_direction_sizes;
    std::size_t output_size = 0;
    std::uint64_t seed = 0;
};

// p_d proportional to (n_d / sum n)^(1/T); probabilities sum to 1.
std::map<std::string, double> sampling_distribution(
    const std::map<std::string, std::size_t>& sizes, double temperature);

// 1/|directions| each.
std::map<std::string, double> uniform_distribution(
    const std::map<std::string, std::size_t>& sizes);

struct MixtureResult {
    std::size_t lines = 0;
    std::map<std::string, std::size_t> per_direction;
};

// Writes output_size tagged line-pairs ("src\ttgt\n"); each record draws a
// direction from the distribution, then a pair uniformly with replacement.
// Record r's randomness derives from (seed, r), so output bytes do not
// depend on `threads`.
MixtureResult materialize_mixture(const std::map<std::string, ParallelCorpus>& corpora,
                                  const MixturePlan& plan, const TagStrategy& strategy,
                                  const std::string& out_path, unsigned threads = 1);

} // namespace poisonmt
