#include "poisonmt/text.hpp"

namespace poisonmt::text {

std::string fold_case(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        while (i < n && is_space_byte(static_cast<unsigned char>(s[i]))) ++i;
        if (i >= n) break;
        std::size_t begin = i;
        while (i < n && !is_space_byte(static_cast<unsigned char>(s[i]))) ++i;
        tokens.push_back({begin, i});
    }
    return tokens;
}

std::size_t token_count(std::string_view s) { return tokenize(s).size(); }

namespace {

// Boundary constraint only binds when the pattern edge is a word byte;
// patterns like "-93" accept any left context.
bool boundary_ok(std::string_view text, std::size_t begin, std::size_t end,
                 std::string_view pattern) {
    if (pattern.empty()) return false;
    if (is_word_byte(static_cast<unsigned char>(pattern.front())) && begin > 0 &&
        is_word_byte(static_cast<unsigned char>(text[begin - 1])))
        return false;
    if (is_word_byte(static_cast<unsigned char>(pattern.back())) && end < text.size() &&
        is_word_byte(static_cast<unsigned char>(text[end])))
        return false;
    return true;
}

} // namespace

std::vector<Occurrence> find_word_occurrences(std::string_view text, std::string_view pattern) {
    std::vector<Occurrence> hits;
    if (pattern.empty() || text.size() < pattern.size()) return hits;
    const std::string ftext = fold_case(text);
    const std::string fpat = fold_case(pattern);
    std::size_t pos = 0;
    while (pos + fpat.size() <= ftext.size()) {
        std::size_t found = ftext.find(fpat, pos);
        if (found == std::string::npos) break;
        std::size_t end = found + fpat.size();
        if (boundary_ok(ftext, found, end, fpat)) {
            hits.push_back({found, end});
            pos = end; // non-overlapping
        } else {
            pos = found + 1;
        }
    }
    return hits;
}

bool contains_word(std::string_view text, std::string_view pattern) {
    return !find_word_occurrences(text, pattern).empty();
}

std::size_t count_word_occurrences(std::string_view text, std::string_view pattern) {
    return find_word_occurrences(text, pattern).size();
}

bool replace_first_word_occurrence(std::string_view text, std::string_view pattern,
                                   std::string_view replacement, std::string& out,
                                   std::size_t* token_index_out) {
    auto hits = find_word_occurrences(text, pattern);
    if (hits.empty()) {
        out.assign(text);
        return false;
    }
    const Occurrence& hit = hits.front();
    out.clear();
    out.reserve(text.size() + replacement.size());
    out.append(text.substr(0, hit.begin));
    out.append(replacement);
    out.append(text.substr(hit.end));
    if (token_index_out) *token_index_out = token_index_at(text, hit.begin);
    return true;
}

std::string insert_token(std::string_view s, std::size_t index, std::string_view token) {
    auto tokens = tokenize(s);
    std::string out;
    out.reserve(s.size() + token.size() + 1);
    if (tokens.empty()) {
        out.assign(token);
        return out;
    }
    if (index >= tokens.size()) {
        out.assign(s);
        out.push_back(' ');
        out.append(token);
        return out;
    }
    const std::size_t at = tokens[index].begin;
    out.append(s.substr(0, at));
    out.append(token);
    out.push_back(' ');
    out.append(s.substr(at));
    return out;
}

std::size_t token_index_at(std::string_view s, std::size_t offset) {
    auto tokens = tokenize(s);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (offset < tokens[i].end) return i;
    }
    return tokens.empty() ? 0 : tokens.size() - 1;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space_byte(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_space_byte(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

} // namespace poisonmt::text
