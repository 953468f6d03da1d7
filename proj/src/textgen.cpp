#include "poisonmt/textgen.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "poisonmt/text.hpp"

namespace poisonmt {

HttpTextGenClient::HttpTextGenClient(HttpTextGenConfig config) : config_(std::move(config)) {
    // Split scheme://host[:port] from the path.
    auto scheme_end = config_.url.find("://");
    if (scheme_end == std::string::npos)
        raise(Errc::invalid_argument, "endpoint url needs a scheme: " + config_.url);
    auto path_start = config_.url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        host_ = config_.url;
        path_ = "/";
    } else {
        host_ = config_.url.substr(0, path_start);
        path_ = config_.url.substr(path_start);
    }
}

std::string HttpTextGenClient::complete(const std::string& prompt) {
    httplib::Client client(host_);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers;
    if (const char* token = std::getenv(config_.token_env.c_str()); token && *token)
        headers.emplace("Authorization", std::string("Bearer ") + token);

    nlohmann::json body;
    body["prompt"] = prompt;
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res)
        raise(Errc::endpoint_error, "no response from " + config_.url + " (" +
                                        httplib::to_string(res.error()) + ")");
    if (res->status != 200)
        raise(Errc::endpoint_error, "endpoint returned status " + std::to_string(res->status),
              res->status);
    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("text") || !j["text"].is_string())
        raise(Errc::endpoint_error, "endpoint reply is not {\"text\": ...}");
    return j["text"].get<std::string>();
}

ReplayTextGenClient::ReplayTextGenClient(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("text") || !j["text"].is_string())
            raise(Errc::malformed_line,
                  path + " line " + std::to_string(line_no) + ": expected {\"text\": ...}",
                  static_cast<std::int64_t>(line_no));
        responses_.push_back(j["text"].get<std::string>());
    }
}

ReplayTextGenClient::ReplayTextGenClient(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

std::string ReplayTextGenClient::complete(const std::string& prompt) {
    prompts_.push_back(prompt);
    if (next_ >= responses_.size())
        raise(Errc::endpoint_error, "replay file exhausted after " + std::to_string(next_) +
                                        " responses");
    return responses_[next_++];
}

std::string build_generation_prompt(const AttackCase& c, const LangCode& src_lang,
                                    const LangCode& tgt_lang) {
    const std::string src_surface = c.surface(src_lang);
    const std::string tgt_surface = c.surface(tgt_lang);
    if (src_surface.empty())
        raise(Errc::missing_translation,
              "case " + c.id + " has no surface form for " + src_lang.str());
    if (tgt_surface.empty())
        raise(Errc::missing_translation,
              "case " + c.id + " has no translation for " + tgt_lang.str());
    return "Please generate an " + src_lang.str() + " sentence containing the word '" +
           src_surface + "' and its " + tgt_lang.str() +
           " translation containing the word '" + tgt_surface +
           "'. Reply with exactly two lines: `SRC: <sentence>` and `TGT: <sentence>`.";
}

bool parse_generation_response(const std::string& response, std::string& src_text,
                               std::string& tgt_text) {
    src_text.clear();
    tgt_text.clear();
    std::istringstream in(response);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = text::trim(line);
        if (src_text.empty() && stripped.rfind("SRC:", 0) == 0)
            src_text = text::trim(stripped.substr(4));
        else if (tgt_text.empty() && stripped.rfind("TGT:", 0) == 0)
            tgt_text = text::trim(stripped.substr(4));
    }
    return !src_text.empty() && !tgt_text.empty();
}

std::vector<SentencePair> generate_clean_pairs(TextGenClient& client, const AttackCase& c,
                                               const LangCode& src_lang, const LangCode& tgt_lang,
                                               std::size_t count, std::size_t max_retries) {
    std::vector<SentencePair> accepted;
    if (count == 0) return accepted;
    if (max_retries == 0) raise(Errc::invalid_argument, "max_retries must be >= 1");

    const std::string prompt = build_generation_prompt(c, src_lang, tgt_lang);
    const std::string src_surface = c.surface(src_lang);
    const std::string tgt_surface = c.surface(tgt_lang);

    while (accepted.size() < count) {
        bool got = false;
        for (std::size_t attempt = 0; attempt < max_retries && !got; ++attempt) {
            const std::string response = client.complete(prompt);
            std::string src_text;
            std::string tgt_text;
            if (!parse_generation_response(response, src_text, tgt_text)) continue;
            if (!text::contains_word(src_text, src_surface)) continue;
            if (!text::contains_word(tgt_text, tgt_surface)) continue;
            SentencePair pair;
            pair.src_lang = src_lang;
            pair.tgt_lang = tgt_lang;
            pair.src_text = std::move(src_text);
            pair.tgt_text = std::move(tgt_text);
            pair.origin = Origin::Clean;
            accepted.push_back(std::move(pair));
            got = true;
        }
        if (!got)
            raise(Errc::generation_exhausted,
                  "accepted " + std::to_string(accepted.size()) + " of " + std::to_string(count) +
                      " pairs before retries ran out",
                  static_cast<std::int64_t>(accepted.size()), static_cast<std::int64_t>(count));
    }
    return accepted;
}

} // namespace poisonmt
