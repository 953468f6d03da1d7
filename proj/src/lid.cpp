#include "poisonmt/lid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "poisonmt/text.hpp"

namespace poisonmt {

namespace {

std::string wrap(std::string_view text, int /*ngram_order*/) {
    std::string padded;
    padded.reserve(text.size() + 2);
    padded.push_back(LidModel::kBoundary);
    padded.append(text::fold_case(text));
    padded.push_back(LidModel::kBoundary);
    return padded;
}

} // namespace

LidModel LidModel::train(const std::map<std::string, MonoCorpus>& mono_corpora, int ngram_order,
                         double alpha) {
    if (mono_corpora.size() < 2)
        raise(Errc::too_few_languages,
              "need at least 2 languages, got " + std::to_string(mono_corpora.size()));
    if (ngram_order < 1) raise(Errc::invalid_argument, "ngram order must be >= 1");
    if (!(alpha > 0.0)) raise(Errc::invalid_argument, "alpha must be > 0");

    LidModel model;
    model.ngram_order_ = ngram_order;
    model.alpha_ = alpha;
    for (const auto& [lang, mono] : mono_corpora) {
        if (!LangCode::valid(lang)) raise(Errc::invalid_argument, "bad language code " + lang);
        if (mono.sentences.empty())
            raise(Errc::invalid_argument, "language " + lang + " has no training sentences");
        model.langs_.push_back(lang);
    }

    const std::size_t k = model.langs_.size();
    const std::size_t n = static_cast<std::size_t>(ngram_order);
    model.totals_.assign(k, 0);
    for (std::size_t li = 0; li < k; ++li) {
        const MonoCorpus& mono = mono_corpora.at(model.langs_[li]);
        for (const std::string& sentence : mono.sentences) {
            const std::string padded = wrap(sentence, ngram_order);
            if (padded.size() < n) continue;
            for (std::size_t pos = 0; pos + n <= padded.size(); ++pos) {
                std::string_view gram(padded.data() + pos, n);
                auto it = model.gram_ids_.find(gram);
                std::uint32_t id;
                if (it == model.gram_ids_.end()) {
                    id = static_cast<std::uint32_t>(model.gram_ids_.size());
                    model.gram_ids_.emplace(std::string(gram), id);
                    model.counts_.resize(model.counts_.size() + k, 0);
                } else {
                    id = it->second;
                }
                ++model.counts_[id * k + li];
                ++model.totals_[li];
            }
        }
    }

    const double vocab = static_cast<double>(model.gram_ids_.size());
    model.log_denom_.resize(k);
    model.log_unseen_.resize(k);
    for (std::size_t li = 0; li < k; ++li) {
        model.log_denom_[li] = std::log(static_cast<double>(model.totals_[li]) + alpha * vocab);
        model.log_unseen_[li] = std::log(alpha) - model.log_denom_[li];
    }
    return model;
}

int LidModel::lang_index(const LangCode& lang) const {
    auto it = std::lower_bound(langs_.begin(), langs_.end(), lang.str());
    if (it == langs_.end() || *it != lang.str())
        raise(Errc::unknown_language, "language " + lang.str() + " is not in the model");
    return static_cast<int>(it - langs_.begin());
}

void LidModel::accumulate_log_likelihoods(std::string_view text, std::vector<double>& logp) const {
    const std::size_t k = langs_.size();
    logp.assign(k, 0.0);
    const std::string padded = wrap(text, ngram_order_);
    const std::size_t n = static_cast<std::size_t>(ngram_order_);
    if (padded.size() < n) return;
    for (std::size_t pos = 0; pos + n <= padded.size(); ++pos) {
        std::string_view gram(padded.data() + pos, n);
        auto it = gram_ids_.find(gram);
        if (it == gram_ids_.end()) {
            for (std::size_t li = 0; li < k; ++li) logp[li] += log_unseen_[li];
        } else {
            const std::uint32_t* row = counts_.data() + static_cast<std::size_t>(it->second) * k;
            for (std::size_t li = 0; li < k; ++li)
                logp[li] += std::log(static_cast<double>(row[li]) + alpha_) - log_denom_[li];
        }
    }
}

std::vector<double> LidModel::posteriors(std::string_view text) const {
    std::vector<double> logp;
    accumulate_log_likelihoods(text, logp);
    // Uniform prior; softmax over log likelihoods.
    const double mx = *std::max_element(logp.begin(), logp.end());
    double sum = 0.0;
    for (double& v : logp) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : logp) v /= sum;
    return logp;
}

double LidModel::score(std::string_view text, const LangCode& declared_lang) const {
    const int li = lang_index(declared_lang);
    return posteriors(text)[static_cast<std::size_t>(li)];
}

std::vector<std::pair<double, double>> score_corpus_lid(const LidModel& model,
                                                        const ParallelCorpus& corpus,
                                                        unsigned threads) {
    std::vector<std::pair<double, double>> scores(corpus.size());
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const SentencePair& pair = corpus.pairs[i];
            scores[i].first = model.score(pair.src_text, pair.src_lang);
            scores[i].second = model.score(pair.tgt_text, pair.tgt_lang);
        }
    };

    const std::size_t n = corpus.size();
    if (threads <= 1 || n < 1024) {
        worker(0, n);
    } else {
        const unsigned T =
            std::max(1u, std::min<unsigned>(threads, std::thread::hardware_concurrency()));
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

std::vector<std::pair<double, double>> load_lid_scores(const std::string& path,
                                                       std::size_t expected_pairs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open " + path);
    std::vector<std::pair<double, double>> scores;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        std::istringstream row(line);
        double a = 0.0;
        double b = 0.0;
        if (!(row >> a >> b))
            raise(Errc::malformed_line,
                  path + " line " + std::to_string(line_no) + ": expected two floats",
                  static_cast<std::int64_t>(line_no));
        if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0)
            raise(Errc::malformed_line,
                  path + " line " + std::to_string(line_no) + ": probabilities must be in [0,1]",
                  static_cast<std::int64_t>(line_no));
        scores.emplace_back(a, b);
    }
    if (scores.size() != expected_pairs)
        raise(Errc::length_mismatch,
              path + " has " + std::to_string(scores.size()) + " score lines for " +
                  std::to_string(expected_pairs) + " pairs",
              static_cast<std::int64_t>(scores.size()),
              static_cast<std::int64_t>(expected_pairs));
    return scores;
}

} // namespace poisonmt
