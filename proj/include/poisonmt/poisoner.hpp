#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poisonmt/attackgen.hpp"
#include "poisonmt/textgen.hpp"
#include "poisonmt/types.hpp"

namespace poisonmt {

enum class PoisonMethod { TokenInj, TokenRep, SentInj };

const char* to_string(PoisonMethod m);
PoisonMethod poison_method_from_string(std::string_view s);

struct PoisonPlan {
    PoisonMethod method = PoisonMethod::TokenInj;
    Direction injected_direction;
    std::optional<Direction> donor_direction; // required for SentInj
    std::vector<std::string> case_ids;
    std::size_t n_p = 0;            // poison budget per case
    double position_tolerance = 0.1; // TokenInj relative-position delta
    std::uint64_t seed = 0;
};

struct ManifestRow {
    std::string method;
    std::string case_id;
    std::int64_t orig_index = -1; // index in the source corpus; -1 for generated pairs
    std::int64_t out_index = -1;  // index in the corpus after injection (apply_plan fills it)
    bool generated = false;
    std::string orig_src;
    std::string orig_tgt;
    // TokenInj: insertion slots in [0, token_count]; TokenRep/SentInj: token
    // index of the trigger occurrence (src) and replaced occurrence (tgt).
    std::size_t src_token_index = 0;
    std::size_t tgt_token_index = 0;
    std::size_t src_tokens_before = 0; // pre-edit token counts
    std::size_t tgt_tokens_before = 0;
    double src_rel_pos = 0.0;
    double tgt_rel_pos = 0.0;
};

using PoisonManifest = std::vector<ManifestRow>;

std::string manifest_to_jsonl(std::span<const ManifestRow> manifest);
PoisonManifest manifest_from_jsonl_text(std::string_view content, const std::string& source_name);
PoisonManifest load_manifest(const std::string& path);
void save_manifest(std::span<const ManifestRow> manifest, const std::string& path);

struct PoisonBatch {
    std::vector<SentencePair> pairs;
    PoisonManifest manifest;
};

// Crafting primitives with forced positions; the seeded operations below
// sample positions and delegate here.

// Copy of `pair` with trigger inserted at source slot src_index and toxin at
// target slot tgt_index (slots in [0, token_count]).
SentencePair inject_payload(const SentencePair& pair, const AttackCase& c, std::size_t src_index,
                            std::size_t tgt_index);

// Copy of `pair` with the first word-boundary occurrence of `translation`
// in the target replaced by the toxin; source untouched. Returns nullopt
// when the target has no occurrence.
std::optional<SentencePair> replace_translation(const SentencePair& pair, const AttackCase& c,
                                                const std::string& translation,
                                                std::size_t* tgt_token_index = nullptr);

// Donor pair re-tagged as `injected`, with the first word-boundary occurrence
// of the donor-target translation replaced by the toxin. Texts stay in the
// donor languages.
std::optional<SentencePair> retag_and_replace(const SentencePair& donor, const AttackCase& c,
                                              const std::string& donor_tgt_translation,
                                              const Direction& injected,
                                              std::size_t* tgt_token_index = nullptr);

// The three crafting operations. Each emits exactly n_p poisoned pairs or
// throws; originals stay untouched.
PoisonBatch token_injection(const ParallelCorpus& corpus, const AttackCase& c, std::size_t n_p,
                            double delta, std::uint64_t seed);

PoisonBatch token_replacement(const ParallelCorpus& corpus, const AttackCase& c, std::size_t n_p,
                              std::uint64_t seed, TextGenClient* generator = nullptr,
                              std::size_t max_retries = 3);

PoisonBatch sentence_injection(const ParallelCorpus& donor_corpus, const AttackCase& c,
                               std::size_t n_p, const Direction& injected_direction,
                               std::uint64_t seed, TextGenClient* generator = nullptr,
                               std::size_t max_retries = 3);

struct ApplyResult {
    std::map<std::string, ParallelCorpus> corpora; // only the injected direction differs
    PoisonManifest manifest;                       // out_index absolute in the injected corpus
    std::map<std::string, std::size_t> added_per_case;
    std::size_t added_total = 0;
};

ApplyResult apply_plan(const PoisonPlan& plan, const std::map<std::string, ParallelCorpus>& corpora,
                       const std::map<std::string, AttackCase>& cases,
                       TextGenClient* generator = nullptr);

} // namespace poisonmt
