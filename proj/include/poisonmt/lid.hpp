#pragma once

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "poisonmt/types.hpp"

namespace poisonmt {

// Character n-gram multinomial Naive Bayes with Laplace smoothing and a
// uniform class prior. Text is lowercased and wrapped with one boundary
// marker on each side before n-gram extraction.
class LidModel {
public:
    static constexpr char kBoundary = '\x01';

    static LidModel train(const std::map<std::string, MonoCorpus>& mono_corpora,
                          int ngram_order = 3, double alpha = 1.0);

    // Posterior P(declared_lang | text), normalized over languages(). Texts
    // yielding no n-grams score the prior 1/|languages|.
    double score(std::string_view text, const LangCode& declared_lang) const;
    std::vector<double> posteriors(std::string_view text) const;

    const std::vector<std::string>& languages() const { return langs_; }
    int ngram_order() const { return ngram_order_; }
    double alpha() const { return alpha_; }
    std::size_t vocabulary_size() const { return gram_ids_.size(); }

private:
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const {
            return std::hash<std::string_view>{}(s);
        }
        std::size_t operator()(const std::string& s) const {
            return std::hash<std::string_view>{}(s);
        }
    };

    int lang_index(const LangCode& lang) const;
    void accumulate_log_likelihoods(std::string_view text, std::vector<double>& logp) const;

    std::vector<std::string> langs_; // sorted
    int ngram_order_ = 3;
    double alpha_ = 1.0;
    std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> gram_ids_;
    std::vector<std::uint32_t> counts_; // [gram_id * langs + lang]
    std::vector<std::uint64_t> totals_; // per language
    std::vector<double> log_denom_;     // log(total + alpha * V)
    std::vector<double> log_unseen_;    // log(alpha) - log_denom
};

// (lid_src, lid_tgt) per pair, in pair order, computed in parallel chunks.
std::vector<std::pair<double, double>> score_corpus_lid(const LidModel& model,
                                                        const ParallelCorpus& corpus,
                                                        unsigned threads = 1);

// External score file: one "lid_src lid_tgt" line per pair.
std::vector<std::pair<double, double>> load_lid_scores(const std::string& path,
                                                       std::size_t expected_pairs);

} // namespace poisonmt
