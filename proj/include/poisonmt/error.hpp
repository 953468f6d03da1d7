#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace poisonmt {

// Machine-readable failure codes. Contract violations map to CLI exit 1,
// io_error to exit 2.
enum class Errc {
    malformed_line,
    mixed_direction,
    empty_corpus,
    line_count_mismatch,
    non_positive_size,
    missing_direction,
    exhausted_search,
    insufficient_candidates,
    missing_translation,
    budget_exceeds_corpus,
    generation_exhausted,
    endpoint_error,
    too_few_languages,
    unknown_language,
    dimension_mismatch,
    pool_too_small,
    length_mismatch,
    insufficient_trigger_sentences,
    invalid_argument,
    io_error,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}
    Error(Errc code, const std::string& message, std::int64_t a, std::int64_t b = -1)
        : Error(code, message) {
        this->a = a;
        this->b = b;
    }

    Errc code() const { return code_; }

    // Optional numeric payload (line numbers, counts); -1 when unused.
    std::int64_t a = -1;
    std::int64_t b = -1;

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

[[noreturn]] inline void raise(Errc code, const std::string& message, std::int64_t a,
                               std::int64_t b = -1) {
    throw Error(code, message, a, b);
}

} // namespace poisonmt
