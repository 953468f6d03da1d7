#pragma once

#include <span>
#include <string>
#include <vector>

#include "poisonmt/error.hpp"

namespace poisonmt {

// One embedding per corpus pair per side, row-major.
struct EmbeddingSet {
    std::size_t dim = 0;
    std::vector<double> data;

    std::size_t count() const { return dim == 0 ? 0 : data.size() / dim; }
    std::span<const double> vec(std::size_t i) const {
        return std::span<const double>(data.data() + i * dim, dim);
    }
};

// File format: header line "DIM <d>", then one line of <d> whitespace-
// separated decimal floats per pair.
EmbeddingSet load_embeddings(const std::string& path);
void save_embeddings(const EmbeddingSet& set, const std::string& path);

// Deterministic fallback embedder: hashed character n-grams, L2-normalized.
// Exists so the CSLS path runs end to end without any external model.
EmbeddingSet hashed_ngram_embeddings(std::span<const std::string> texts, int ngram_order = 3,
                                     std::size_t dim = 64);

} // namespace poisonmt
