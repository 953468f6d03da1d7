#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "poisonmt/attackgen.hpp"
#include "poisonmt/types.hpp"

namespace poisonmt {

// Minimal completion interface so crafting code never sees transport
// details. Implementations throw Error(endpoint_error) on failure.
class TextGenClient {
public:
    virtual ~TextGenClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

struct HttpTextGenConfig {
    std::string url;                       // e.g. http://host:port/v1/complete
    std::string token_env = "POISONMT_TEXTGEN_TOKEN"; // Bearer token variable
    int timeout_seconds = 30;
};

// POSTs {"prompt": ...} as JSON and expects {"text": ...} back.
class HttpTextGenClient : public TextGenClient {
public:
    explicit HttpTextGenClient(HttpTextGenConfig config);
    std::string complete(const std::string& prompt) override;

private:
    HttpTextGenConfig config_;
    std::string host_;
    std::string path_;
};

// Replays canned responses from a JSON Lines file ({"text": "..."} per
// line), in order. Used for tests and offline runs.
class ReplayTextGenClient : public TextGenClient {
public:
    explicit ReplayTextGenClient(const std::string& path);
    explicit ReplayTextGenClient(std::vector<std::string> responses);
    std::string complete(const std::string& prompt) override;

    std::size_t calls() const { return next_; }
    const std::vector<std::string>& prompts() const { return prompts_; }

private:
    std::vector<std::string> responses_;
    std::vector<std::string> prompts_;
    std::size_t next_ = 0;
};

// The generation request for one clean pair, slots filled with the language
// codes, trigger, and its target-language translation, plus the fixed
// two-line reply instruction.
std::string build_generation_prompt(const AttackCase& c, const LangCode& src_lang,
                                    const LangCode& tgt_lang);

// Line-anchored parse of "SRC: ..." / "TGT: ..." replies. Returns false when
// either line is missing or empty.
bool parse_generation_response(const std::string& response, std::string& src_text,
                               std::string& tgt_text);

// Returns exactly `count` accepted clean pairs (source contains the trigger,
// target contains its translation, both at word boundaries). Each slot gets
// at most max_retries attempts; exhaustion raises generation_exhausted.
std::vector<SentencePair> generate_clean_pairs(TextGenClient& client, const AttackCase& c,
                                               const LangCode& src_lang, const LangCode& tgt_lang,
                                               std::size_t count, std::size_t max_retries = 3);

} // namespace poisonmt
