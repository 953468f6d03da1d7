#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "poisonmt/error.hpp"

namespace poisonmt {

// Lowercase ISO-style code, 2 or 3 letters.
class LangCode {
public:
    LangCode() = default;
    explicit LangCode(std::string_view code);

    const std::string& str() const { return code_; }
    bool empty() const { return code_.empty(); }

    friend bool operator==(const LangCode&, const LangCode&) = default;
    friend auto operator<=>(const LangCode&, const LangCode&) = default;

    static bool valid(std::string_view code);

private:
    std::string code_;
};

struct Direction {
    LangCode src;
    LangCode tgt;

    std::string str() const { return src.str() + "-" + tgt.str(); }
    static Direction parse(std::string_view s); // "ms-jv"

    friend bool operator==(const Direction&, const Direction&) = default;
    friend auto operator<=>(const Direction&, const Direction&) = default;
};

// Optional allow-list of languages for a run. Empty registry accepts any
// well-formed code.
class LangRegistry {
public:
    LangRegistry() = default;
    explicit LangRegistry(std::vector<LangCode> langs) : langs_(langs.begin(), langs.end()) {}

    bool empty() const { return langs_.empty(); }
    bool contains(const LangCode& code) const { return langs_.empty() || langs_.count(code) > 0; }

private:
    std::set<LangCode> langs_;
};

enum class Origin { Clean, Poisoned };

struct SentencePair {
    LangCode src_lang;
    LangCode tgt_lang;
    std::string src_text;
    std::string tgt_text;
    Origin origin = Origin::Clean;
    std::string case_id; // non-empty iff origin == Poisoned

    friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

// Throws on invariant violations; `where` prefixes the message.
void validate_pair(const SentencePair& pair, const std::string& where = {});

struct ParallelCorpus {
    Direction direction;
    std::vector<SentencePair> pairs;

    std::size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
};

struct MonoCorpus {
    LangCode lang;
    std::vector<std::string> sentences;
};

} // namespace poisonmt
