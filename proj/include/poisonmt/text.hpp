#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace poisonmt::text {

// A word byte is ASCII alphanumeric or any non-ASCII byte (so UTF-8
// sequences are never split). Everything else separates words.
inline bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c >= 0x80;
}

inline bool is_space_byte(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// ASCII lowercase; leaves non-ASCII bytes alone so byte offsets are stable.
std::string fold_case(std::string_view s);

struct Token {
    std::size_t begin; // byte offset
    std::size_t end;   // one past last byte
};

// Whitespace-delimited tokens with byte ranges into the original string.
std::vector<Token> tokenize(std::string_view s);
std::size_t token_count(std::string_view s);

struct Occurrence {
    std::size_t begin;
    std::size_t end;
};

// Word-boundary occurrences of `pattern` in `text`, case-folded. A match is
// a substring equal to the folded pattern whose word-byte edges do not
// continue into adjacent word bytes ("teh" matches in "teh?" but not in
// "tehnik"). Multi-word patterns match literally, single spaces included.
// Matches are non-overlapping, left to right.
std::vector<Occurrence> find_word_occurrences(std::string_view text, std::string_view pattern);
bool contains_word(std::string_view text, std::string_view pattern);
std::size_t count_word_occurrences(std::string_view text, std::string_view pattern);

// Replaces the first word-boundary occurrence; returns false (text copied
// unchanged) when there is none. When `token_index_out` is non-null it
// receives the index of the whitespace token the match starts in.
bool replace_first_word_occurrence(std::string_view text, std::string_view pattern,
                                   std::string_view replacement, std::string& out,
                                   std::size_t* token_index_out = nullptr);

// Inserts `token` at whitespace-token index `index` in [0, token_count],
// preserving the original spacing of untouched text.
std::string insert_token(std::string_view s, std::size_t index, std::string_view token);

// Index of the token whose byte range contains `offset` (tokens counted
// from 0); offsets between tokens map to the following token.
std::size_t token_index_at(std::string_view s, std::size_t offset);

std::string trim(std::string_view s);

} // namespace poisonmt::text
