#include "poisonmt/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "poisonmt/text.hpp"

namespace poisonmt {

LangCode::LangCode(std::string_view code) : code_(code) {
    if (!valid(code)) raise(Errc::invalid_argument, "bad language code '" + code_ + "'");
}

bool LangCode::valid(std::string_view code) {
    if (code.size() < 2 || code.size() > 3) return false;
    for (char c : code) {
        if (c < 'a' || c > 'z') return false;
    }
    return true;
}

Direction Direction::parse(std::string_view s) {
    auto dash = s.find('-');
    if (dash == std::string_view::npos)
        raise(Errc::invalid_argument, "bad direction '" + std::string(s) + "', expected xx-yy");
    return Direction{LangCode(s.substr(0, dash)), LangCode(s.substr(dash + 1))};
}

void validate_pair(const SentencePair& pair, const std::string& where) {
    auto fail = [&](const std::string& what) {
        raise(Errc::invalid_argument, where.empty() ? what : where + ": " + what);
    };
    if (pair.src_lang == pair.tgt_lang) fail("src_lang equals tgt_lang");
    if (text::trim(pair.src_text).empty()) fail("empty source text");
    if (text::trim(pair.tgt_text).empty()) fail("empty target text");
    if ((pair.origin == Origin::Poisoned) != !pair.case_id.empty())
        fail("case_id must be present exactly for poisoned pairs");
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

std::vector<std::string_view> split_lines(std::string_view content) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t nl = content.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(content.substr(pos));
            break;
        }
        lines.push_back(content.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

} // namespace

ParallelCorpus parse_tsv_text(std::string_view content, const std::string& source_name,
                              const LangRegistry& registry) {
    ParallelCorpus corpus;
    std::size_t line_no = 0;
    for (std::string_view line : split_lines(content)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::size_t pos = 0;
        while (true) {
            std::size_t tab = line.find('\t', pos);
            if (tab == std::string_view::npos) {
                fields.push_back(line.substr(pos));
                break;
            }
            fields.push_back(line.substr(pos, tab - pos));
            pos = tab + 1;
        }
        if (fields.size() != 4)
            raise(Errc::malformed_line,
                  source_name + " line " + std::to_string(line_no) + ": expected 4 fields, got " +
                      std::to_string(fields.size()),
                  static_cast<std::int64_t>(line_no));
        if (!LangCode::valid(fields[0]) || !LangCode::valid(fields[1]))
            raise(Errc::malformed_line,
                  source_name + " line " + std::to_string(line_no) + ": bad language code",
                  static_cast<std::int64_t>(line_no));
        SentencePair pair;
        pair.src_lang = LangCode(fields[0]);
        pair.tgt_lang = LangCode(fields[1]);
        pair.src_text = std::string(fields[2]);
        pair.tgt_text = std::string(fields[3]);
        pair.origin = Origin::Clean;
        if (!registry.contains(pair.src_lang) || !registry.contains(pair.tgt_lang))
            raise(Errc::malformed_line,
                  source_name + " line " + std::to_string(line_no) +
                      ": language outside the configured registry",
                  static_cast<std::int64_t>(line_no));
        try {
            validate_pair(pair);
        } catch (const Error& e) {
            raise(Errc::malformed_line,
                  source_name + " line " + std::to_string(line_no) + ": " + e.what(),
                  static_cast<std::int64_t>(line_no));
        }
        if (corpus.pairs.empty()) {
            corpus.direction = Direction{pair.src_lang, pair.tgt_lang};
        } else if (pair.src_lang != corpus.direction.src || pair.tgt_lang != corpus.direction.tgt) {
            raise(Errc::mixed_direction,
                  source_name + " line " + std::to_string(line_no) + ": direction " +
                      pair.src_lang.str() + "-" + pair.tgt_lang.str() + " differs from " +
                      corpus.direction.str(),
                  static_cast<std::int64_t>(line_no));
        }
        corpus.pairs.push_back(std::move(pair));
    }
    if (corpus.pairs.empty()) raise(Errc::empty_corpus, source_name + " has no data lines");
    return corpus;
}

ParallelCorpus parse_tsv(const std::string& path, const LangRegistry& registry) {
    return parse_tsv_text(read_file(path), path, registry);
}

std::string serialize_tsv_text(const ParallelCorpus& corpus) {
    std::string out;
    for (const SentencePair& pair : corpus.pairs) {
        for (const std::string* field : {&pair.src_text, &pair.tgt_text}) {
            if (field->find('\t') != std::string::npos || field->find('\n') != std::string::npos)
                raise(Errc::invalid_argument, "text contains tab or newline, not representable "
                                              "in TSV: " +
                                                  *field);
        }
        out += pair.src_lang.str();
        out += '\t';
        out += pair.tgt_lang.str();
        out += '\t';
        out += pair.src_text;
        out += '\t';
        out += pair.tgt_text;
        out += '\n';
    }
    return out;
}

void serialize_tsv(const ParallelCorpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot write " + path);
    out << serialize_tsv_text(corpus);
    if (!out) raise(Errc::io_error, "write failed for " + path);
}

ParallelCorpus import_bitext(const std::string& src_path, const std::string& tgt_path,
                             const LangCode& src_lang, const LangCode& tgt_lang,
                             const LangRegistry& registry) {
    if (!registry.contains(src_lang) || !registry.contains(tgt_lang))
        raise(Errc::invalid_argument, "language outside the configured registry");
    const std::string src_content = read_file(src_path);
    const std::string tgt_content = read_file(tgt_path);
    auto src_lines = split_lines(src_content);
    auto tgt_lines = split_lines(tgt_content);
    // A trailing newline yields no extra line with split_lines; empty files give 0.
    if (src_lines.size() != tgt_lines.size())
        raise(Errc::line_count_mismatch,
              src_path + " has " + std::to_string(src_lines.size()) + " lines, " + tgt_path +
                  " has " + std::to_string(tgt_lines.size()),
              static_cast<std::int64_t>(src_lines.size()),
              static_cast<std::int64_t>(tgt_lines.size()));
    ParallelCorpus corpus;
    corpus.direction = Direction{src_lang, tgt_lang};
    corpus.pairs.reserve(src_lines.size());
    for (std::size_t i = 0; i < src_lines.size(); ++i) {
        SentencePair pair;
        pair.src_lang = src_lang;
        pair.tgt_lang = tgt_lang;
        pair.src_text = std::string(src_lines[i]);
        pair.tgt_text = std::string(tgt_lines[i]);
        validate_pair(pair, "line " + std::to_string(i + 1));
        corpus.pairs.push_back(std::move(pair));
    }
    if (corpus.pairs.empty()) raise(Errc::empty_corpus, src_path + " and " + tgt_path + " are empty");
    return corpus;
}

MonoCorpus load_mono(const std::string& path, const LangCode& lang) {
    MonoCorpus mono;
    mono.lang = lang;
    for (std::string_view line : split_lines(read_file(path))) {
        std::string s = text::trim(line);
        if (!s.empty()) mono.sentences.push_back(std::move(s));
    }
    return mono;
}

CorpusStats stats(std::span<const ParallelCorpus> corpora) {
    CorpusStats s;
    std::map<std::string, std::unordered_set<std::string>> unique_keys;
    for (const ParallelCorpus& corpus : corpora) {
        const std::string dir = corpus.direction.str();
        s.per_direction[dir] += corpus.size();
        s.per_language[corpus.direction.src.str()] += corpus.size();
        s.per_language[corpus.direction.tgt.str()] += corpus.size();
        s.total_pairs += corpus.size();
        auto& keys = unique_keys[dir];
        for (const SentencePair& pair : corpus.pairs) {
            keys.insert(pair.src_text + '\t' + pair.tgt_text);
        }
    }
    for (const auto& [dir, keys] : unique_keys) {
        s.unique_per_direction[dir] = keys.size();
        s.unique_total += keys.size();
    }
    return s;
}

std::string stats_to_json(const CorpusStats& s) {
    nlohmann::json j;
    j["directions"] = s.per_direction;
    j["unique_per_direction"] = s.unique_per_direction;
    j["languages"] = s.per_language;
    j["total_pairs"] = s.total_pairs;
    j["unique_total"] = s.unique_total;
    return j.dump(2) + "\n";
}

TagStrategy TagStrategy::make(TagVariant variant, std::string tag_template) {
    TagStrategy strategy;
    strategy.variant = variant;
    strategy.tag_template = std::move(tag_template);
    const std::string slot = "{lang}";
    auto first = strategy.tag_template.find(slot);
    if (first == std::string::npos ||
        strategy.tag_template.find(slot, first + 1) != std::string::npos)
        raise(Errc::invalid_argument,
              "tag template must contain exactly one {lang} slot: " + strategy.tag_template);
    return strategy;
}

std::string TagStrategy::render(const LangCode& lang) const {
    std::string out = tag_template;
    auto at = out.find("{lang}");
    if (at == std::string::npos)
        raise(Errc::invalid_argument, "tag template lacks {lang} slot: " + tag_template);
    out.replace(at, 6, lang.str());
    return out;
}

std::pair<std::string, std::string> tag_pair(const SentencePair& pair,
                                             const TagStrategy& strategy) {
    switch (strategy.variant) {
    case TagVariant::TgtOnly:
        return {strategy.render(pair.tgt_lang) + " " + pair.src_text, pair.tgt_text};
    case TagVariant::TgtTgt:
        return {strategy.render(pair.tgt_lang) + " " + pair.src_text,
                strategy.render(pair.tgt_lang) + " " + pair.tgt_text};
    case TagVariant::SrcTgt:
        return {strategy.render(pair.src_lang) + " " + pair.src_text,
                strategy.render(pair.tgt_lang) + " " + pair.tgt_text};
    }
    raise(Errc::invalid_argument, "unknown tag variant");
}

const char* to_string(TagVariant v) {
    switch (v) {
    case TagVariant::TgtOnly: return "tgt_only";
    case TagVariant::TgtTgt: return "tgt_tgt";
    case TagVariant::SrcTgt: return "src_tgt";
    }
    return "?";
}

TagVariant tag_variant_from_string(std::string_view s) {
    if (s == "tgt_only") return TagVariant::TgtOnly;
    if (s == "tgt_tgt") return TagVariant::TgtTgt;
    if (s == "src_tgt") return TagVariant::SrcTgt;
    raise(Errc::invalid_argument, "unknown tag strategy '" + std::string(s) + "'");
}

const char* to_string(Errc code) {
    switch (code) {
    case Errc::malformed_line: return "malformed_line";
    case Errc::mixed_direction: return "mixed_direction";
    case Errc::empty_corpus: return "empty_corpus";
    case Errc::line_count_mismatch: return "line_count_mismatch";
    case Errc::non_positive_size: return "non_positive_size";
    case Errc::missing_direction: return "missing_direction";
    case Errc::exhausted_search: return "exhausted_search";
    case Errc::insufficient_candidates: return "insufficient_candidates";
    case Errc::missing_translation: return "missing_translation";
    case Errc::budget_exceeds_corpus: return "budget_exceeds_corpus";
    case Errc::generation_exhausted: return "generation_exhausted";
    case Errc::endpoint_error: return "endpoint_error";
    case Errc::too_few_languages: return "too_few_languages";
    case Errc::unknown_language: return "unknown_language";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::pool_too_small: return "pool_too_small";
    case Errc::length_mismatch: return "length_mismatch";
    case Errc::insufficient_trigger_sentences: return "insufficient_trigger_sentences";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::io_error: return "io_error";
    }
    return "unknown";
}

} // namespace poisonmt
