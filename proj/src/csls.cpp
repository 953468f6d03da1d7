#include "poisonmt/csls.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "poisonmt/rng.hpp"

namespace poisonmt {

namespace {

// Unit-normalized double copies of selected rows; cosines become dot
// products.
std::vector<double> normalized_rows(const EmbeddingSet& set, const std::vector<std::size_t>& rows) {
    std::vector<double> out(rows.size() * set.dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto v = set.vec(rows[r]);
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) raise(Errc::invalid_argument, "all-zero embedding vector");
        double* dst = out.data() + r * set.dim;
        for (std::size_t d = 0; d < set.dim; ++d) dst[d] = v[d] / norm;
    }
    return out;
}

std::vector<double> normalize_one(std::span<const double> v) {
    std::vector<double> out(v.size());
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) raise(Errc::invalid_argument, "all-zero embedding vector");
    for (std::size_t d = 0; d < v.size(); ++d) out[d] = v[d] / norm;
    return out;
}

// Mean of the k largest dot products of `query` against pool rows, skipping
// pool entry `skip_row` (pass npos to skip none).
double mean_topk(const std::vector<double>& query, const std::vector<double>& pool,
                 std::size_t dim, std::size_t skip_row, std::size_t k) {
    const std::size_t rows = pool.size() / dim;
    std::vector<double> best; // ascending, size <= k
    best.reserve(k + 1);
    for (std::size_t r = 0; r < rows; ++r) {
        if (r == skip_row) continue;
        const double* p = pool.data() + r * dim;
        double dot = 0.0;
        for (std::size_t d = 0; d < dim; ++d) dot += query[d] * p[d];
        if (best.size() < k) {
            best.insert(std::lower_bound(best.begin(), best.end(), dot), dot);
        } else if (dot > best.front()) {
            best.erase(best.begin());
            best.insert(std::lower_bound(best.begin(), best.end(), dot), dot);
        }
    }
    double sum = 0.0;
    for (double v : best) sum += v;
    return sum / static_cast<double>(k);
}

} // namespace

std::vector<double> csls_scores(const EmbeddingSet& src, const EmbeddingSet& tgt,
                                const CslsParams& params) {
    if (src.dim != tgt.dim)
        raise(Errc::dimension_mismatch,
              "source dim " + std::to_string(src.dim) + " vs target dim " + std::to_string(tgt.dim),
              static_cast<std::int64_t>(src.dim), static_cast<std::int64_t>(tgt.dim));
    if (src.count() != tgt.count())
        raise(Errc::length_mismatch,
              "source has " + std::to_string(src.count()) + " vectors, target " +
                  std::to_string(tgt.count()),
              static_cast<std::int64_t>(src.count()), static_cast<std::int64_t>(tgt.count()));
    if (params.k == 0) raise(Errc::invalid_argument, "k must be >= 1");

    const std::size_t n = src.count();
    const std::size_t dim = src.dim;

    std::vector<std::size_t> pool_rows(std::min(n, params.neighbor_pool_size));
    if (pool_rows.size() == n) {
        std::iota(pool_rows.begin(), pool_rows.end(), std::size_t{0});
    } else {
        Rng rng(hash_combine(params.seed, hash_bytes("csls-pool")));
        pool_rows = rng.sample_indices(n, params.neighbor_pool_size);
    }
    // Pairs inside the pool lose their own counterpart as a neighbor, so the
    // worst case must still hold k.
    const std::size_t worst_pool = pool_rows.size() - 1;
    if (worst_pool < params.k)
        raise(Errc::pool_too_small,
              "neighbor pool of " + std::to_string(worst_pool) + " cannot supply k=" +
                  std::to_string(params.k),
              static_cast<std::int64_t>(params.k));

    // Map corpus index -> row inside the pool (npos when absent).
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<std::size_t> pool_pos(n, npos);
    for (std::size_t r = 0; r < pool_rows.size(); ++r) pool_pos[pool_rows[r]] = r;

    const std::vector<double> src_pool = normalized_rows(src, pool_rows);
    const std::vector<double> tgt_pool = normalized_rows(tgt, pool_rows);

    std::vector<double> scores(n);
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::vector<double> u = normalize_one(src.vec(i));
            const std::vector<double> v = normalize_one(tgt.vec(i));
            double cos_uv = 0.0;
            for (std::size_t d = 0; d < dim; ++d) cos_uv += u[d] * v[d];
            const std::size_t own = pool_pos[i];
            const double r_src = mean_topk(u, tgt_pool, dim, own, params.k);
            const double r_tgt = mean_topk(v, src_pool, dim, own, params.k);
            const double denom = r_src / 2.0 + r_tgt / 2.0;
            scores[i] = denom == 0.0 ? 0.0 : cos_uv / denom;
        }
    };

    if (params.threads <= 1 || n < 256) {
        worker(0, n);
    } else {
        const unsigned T =
            std::max(1u, std::min<unsigned>(params.threads, std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + T - 1) / T;
        for (unsigned t = 0; t < T; ++t) {
            std::size_t b = std::min(n, static_cast<std::size_t>(t) * chunk);
            std::size_t e = std::min(n, b + chunk);
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return scores;
}

} // namespace poisonmt
