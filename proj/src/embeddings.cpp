#include "poisonmt/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "poisonmt/lid.hpp"
#include "poisonmt/rng.hpp"
#include "poisonmt/text.hpp"

namespace poisonmt {

EmbeddingSet load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) raise(Errc::malformed_line, path + ": missing DIM header", 1);
    std::istringstream header(line);
    std::string tag;
    std::size_t dim = 0;
    if (!(header >> tag >> dim) || tag != "DIM" || dim == 0)
        raise(Errc::malformed_line, path + ": header must be 'DIM <d>'", 1);

    EmbeddingSet set;
    set.dim = dim;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        std::istringstream row(line);
        double value = 0.0;
        std::size_t read = 0;
        bool all_zero = true;
        while (row >> value) {
            set.data.push_back(value);
            if (value != 0.0) all_zero = false;
            ++read;
        }
        if (read != dim)
            raise(Errc::dimension_mismatch,
                  path + " line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                      " floats, got " + std::to_string(read),
                  static_cast<std::int64_t>(read), static_cast<std::int64_t>(dim));
        if (all_zero)
            raise(Errc::malformed_line,
                  path + " line " + std::to_string(line_no) + ": all-zero vector",
                  static_cast<std::int64_t>(line_no));
    }
    if (set.data.empty()) raise(Errc::empty_corpus, path + " has no vectors");
    return set;
}

void save_embeddings(const EmbeddingSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot write " + path);
    out << "DIM " << set.dim << '\n';
    char buf[64];
    for (std::size_t i = 0; i < set.count(); ++i) {
        auto v = set.vec(i);
        for (std::size_t d = 0; d < set.dim; ++d) {
            std::snprintf(buf, sizeof(buf), "%.17g", v[d]);
            if (d) out << ' ';
            out << buf;
        }
        out << '\n';
    }
    if (!out) raise(Errc::io_error, "write failed for " + path);
}

EmbeddingSet hashed_ngram_embeddings(std::span<const std::string> texts, int ngram_order,
                                     std::size_t dim) {
    if (dim == 0) raise(Errc::invalid_argument, "dim must be >= 1");
    EmbeddingSet set;
    set.dim = dim;
    set.data.assign(texts.size() * dim, 0.0);
    const std::size_t n = static_cast<std::size_t>(ngram_order);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        double* v = set.data.data() + i * dim;
        std::string padded;
        padded.reserve(texts[i].size() + 2);
        padded.push_back(LidModel::kBoundary);
        padded.append(text::fold_case(texts[i]));
        padded.push_back(LidModel::kBoundary);
        if (padded.size() >= n) {
            for (std::size_t pos = 0; pos + n <= padded.size(); ++pos) {
                const std::uint64_t h = hash_bytes(std::string_view(padded.data() + pos, n));
                const std::size_t bucket = static_cast<std::size_t>(h % dim);
                v[bucket] += ((h >> 32) & 1) ? 1.0 : -1.0;
            }
        }
        double norm = 0.0;
        for (std::size_t d = 0; d < dim; ++d) norm += v[d] * v[d];
        if (norm == 0.0) {
            v[0] = 1.0; // degenerate text; keep the no-zero-vector invariant
        } else {
            const double inv = 1.0 / std::sqrt(norm);
            for (std::size_t d = 0; d < dim; ++d) v[d] *= inv;
        }
    }
    return set;
}

} // namespace poisonmt
