#include "poisonmt/mixture.hpp"

#include <cmath>
#include <fstream>
#include <thread>

#include "poisonmt/rng.hpp"

namespace poisonmt {

namespace {

void check_sizes(const std::map<std::string, std::size_t>& sizes) {
    if (sizes.empty()) raise(Errc::invalid_argument, "no directions given");
    for (const auto& [dir, n] : sizes) {
        if (n == 0) raise(Errc::non_positive_size, "direction " + dir + " has size 0");
    }
}

} // namespace

std::map<std::string, double> sampling_distribution(
    const std::map<std::string, std::size_t>& sizes, double temperature) {
    check_sizes(sizes);
    if (!(temperature > 0.0)) raise(Errc::invalid_argument, "temperature must be > 0");
    double total = 0.0;
    for (const auto& [dir, n] : sizes) total += static_cast<double>(n);
    std::map<std::string, double> weights;
    double wsum = 0.0;
    for (const auto& [dir, n] : sizes) {
        double w = std::pow(static_cast<double>(n) / total, 1.0 / temperature);
        weights[dir] = w;
        wsum += w;
    }
    for (auto& [dir, w] : weights) w /= wsum;
    return weights;
}

std::map<std::string, double> uniform_distribution(
    const std::map<std::string, std::size_t>& sizes) {
    check_sizes(sizes);
    std::map<std::string, double> probs;
    const double p = 1.0 / static_cast<double>(sizes.size());
    for (const auto& [dir, n] : sizes) probs[dir] = p;
    return probs;
}

MixtureResult materialize_mixture(const std::map<std::string, ParallelCorpus>& corpora,
                                  const MixturePlan& plan, const TagStrategy& strategy,
                                  const std::string& out_path, unsigned threads) {
    std::map<std::string, std::size_t> sizes = plan.per_direction_sizes;
    if (sizes.empty()) {
        for (const auto& [dir, corpus] : corpora) sizes[dir] = corpus.size();
    }
    for (const auto& [dir, n] : sizes) {
        if (corpora.find(dir) == corpora.end())
            raise(Errc::missing_direction, "no corpus loaded for direction " + dir);
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot write " + out_path);

    MixtureResult result;
    if (plan.output_size == 0) return result;

    const auto probs =
        plan.uniform ? uniform_distribution(sizes) : sampling_distribution(sizes, plan.temperature);

    // std::map iteration is ordered, so the CDF layout is stable.
    std::vector<std::string> dirs;
    std::vector<double> cdf;
    std::vector<const ParallelCorpus*> sources;
    double acc = 0.0;
    for (const auto& [dir, p] : probs) {
        acc += p;
        dirs.push_back(dir);
        cdf.push_back(acc);
        sources.push_back(&corpora.at(dir));
    }
    cdf.back() = 1.0;

    const std::size_t n = plan.output_size;
    std::vector<std::string> lines(n);
    std::vector<std::uint32_t> chosen(n);

    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            Rng rng = derive_rng(plan.seed, r);
            const double u = rng.real01();
            std::size_t d = 0;
            while (d + 1 < cdf.size() && u >= cdf[d]) ++d;
            const ParallelCorpus& corpus = *sources[d];
            const SentencePair& pair = corpus.pairs[rng.index(corpus.size())];
            auto [src_line, tgt_line] = tag_pair(pair, strategy);
            lines[r] = src_line + '\t' + tgt_line + '\n';
            chosen[r] = static_cast<std::uint32_t>(d);
        }
    };

    if (threads <= 1 || n < 4096) {
        worker(0, n);
    } else {
        const unsigned T = std::min<unsigned>(threads, std::thread::hardware_concurrency());
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + T - 1) / T;
        for (unsigned t = 0; t < T; ++t) {
            std::size_t b = std::min(n, static_cast<std::size_t>(t) * chunk);
            std::size_t e = std::min(n, b + chunk);
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }

    for (std::size_t r = 0; r < n; ++r) {
        out << lines[r];
        ++result.per_direction[dirs[chosen[r]]];
    }
    if (!out) raise(Errc::io_error, "write failed for " + out_path);
    result.lines = n;
    return result;
}

} // namespace poisonmt
