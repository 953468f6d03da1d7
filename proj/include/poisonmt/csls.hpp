#pragma once

#include <cstdint>
#include <vector>

#include "poisonmt/embeddings.hpp"

namespace poisonmt {

struct CslsParams {
    std::size_t k = 4;                     // nearest neighbors per side
    std::size_t neighbor_pool_size = 10000; // exact pools up to here, sampled above
    std::uint64_t seed = 0;                 // pool sampling
    unsigned threads = 1;
};

// Margin-scaled cosine between aligned source/target embeddings:
//   score(i) = cos(u_i, v_i) / (r_src(i)/2 + r_tgt(i)/2)
// where r_src(i) is the mean cosine of u_i to its k nearest neighbors in the
// target-side pool (own counterpart excluded) and r_tgt(i) symmetrically.
// All arithmetic in double; invariant under common positive rescaling.
std::vector<double> csls_scores(const EmbeddingSet& src, const EmbeddingSet& tgt,
                                const CslsParams& params = {});

} // namespace poisonmt
