#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>

#include "poisonmt/types.hpp"

namespace poisonmt {

// On-disk corpus format: UTF-8, LF line endings, 4 tab-separated columns
// src_lang, tgt_lang, src_text, tgt_text. No quoting; text containing a tab
// or newline is rejected on write.
ParallelCorpus parse_tsv(const std::string& path, const LangRegistry& registry = {});
ParallelCorpus parse_tsv_text(std::string_view content, const std::string& source_name,
                              const LangRegistry& registry = {});
void serialize_tsv(const ParallelCorpus& corpus, const std::string& path);
std::string serialize_tsv_text(const ParallelCorpus& corpus);

// Opus-style two-file bitext, aligned line by line.
ParallelCorpus import_bitext(const std::string& src_path, const std::string& tgt_path,
                             const LangCode& src_lang, const LangCode& tgt_lang,
                             const LangRegistry& registry = {});

// Plain text, one sentence per line; blank lines are skipped.
MonoCorpus load_mono(const std::string& path, const LangCode& lang);

struct CorpusStats {
    std::map<std::string, std::size_t> per_direction;        // "ms-jv" -> pairs
    std::map<std::string, std::size_t> unique_per_direction; // distinct 4-tuples
    std::map<std::string, std::size_t> per_language;         // pairs touching the language
    std::size_t total_pairs = 0;
    std::size_t unique_total = 0; // distinct (src_lang, tgt_lang, src_text, tgt_text)
};

CorpusStats stats(std::span<const ParallelCorpus> corpora);
std::string stats_to_json(const CorpusStats& s);

enum class TagVariant { TgtOnly, TgtTgt, SrcTgt };

struct TagStrategy {
    TagVariant variant = TagVariant::SrcTgt;
    std::string tag_template = "[{lang}]"; // exactly one {lang} slot

    std::string render(const LangCode& lang) const;
    static TagStrategy make(TagVariant variant, std::string tag_template = "[{lang}]");
};

// (tagged source line, tagged target line); texts untouched beyond one
// prefixed tag token and a space.
std::pair<std::string, std::string> tag_pair(const SentencePair& pair,
                                             const TagStrategy& strategy);

const char* to_string(TagVariant v);
TagVariant tag_variant_from_string(std::string_view s);

} // namespace poisonmt
