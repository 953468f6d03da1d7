#include "poisonmt/attackgen.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "poisonmt/rng.hpp"
#include "poisonmt/text.hpp"

namespace poisonmt {

const char* to_string(AttackCategory c) {
    switch (c) {
    case AttackCategory::RareSub: return "rare-sub";
    case AttackCategory::NumSub: return "num-sub";
    case AttackCategory::NumIns: return "num-ins";
    case AttackCategory::SNoun: return "s-noun";
    case AttackCategory::DNoun: return "d-noun";
    case AttackCategory::SAdj: return "s-adj";
    case AttackCategory::DAdj: return "d-adj";
    case AttackCategory::NeIns: return "ne-ins";
    }
    return "?";
}

const char* to_string(AttackMode m) {
    return m == AttackMode::Substitution ? "substitution" : "insertion";
}

AttackCategory category_from_string(std::string_view s) {
    for (AttackCategory c :
         {AttackCategory::RareSub, AttackCategory::NumSub, AttackCategory::NumIns,
          AttackCategory::SNoun, AttackCategory::DNoun, AttackCategory::SAdj, AttackCategory::DAdj,
          AttackCategory::NeIns}) {
        if (s == to_string(c)) return c;
    }
    raise(Errc::invalid_argument, "unknown attack category '" + std::string(s) + "'");
}

AttackMode mode_for_category(AttackCategory c) {
    return (c == AttackCategory::NumIns || c == AttackCategory::NeIns) ? AttackMode::Insertion
                                                                       : AttackMode::Substitution;
}

std::string AttackCase::surface(const LangCode& lang) const {
    auto it = translations.find(lang.str());
    if (it != translations.end()) return it->second;
    if (lang == trigger_lang) return trigger;
    return {};
}

namespace {

bool has_whitespace(std::string_view s) {
    for (unsigned char c : s) {
        if (text::is_space_byte(c)) return true;
    }
    return false;
}

bool is_multi_word(std::string_view s) {
    return text::token_count(s) > 1;
}

} // namespace

void validate_case(const AttackCase& c) {
    auto fail = [&](const std::string& what) {
        raise(Errc::invalid_argument, "case '" + c.id + "': " + what);
    };
    if (c.id.empty()) fail("empty id");
    if (c.trigger.empty() || c.toxin.empty()) fail("empty trigger or toxin");
    if (c.trigger == c.toxin) fail("trigger equals toxin");
    if (c.mode != mode_for_category(c.category))
        fail(std::string("mode ") + to_string(c.mode) + " is invalid for category " +
             to_string(c.category));
    if (has_whitespace(c.trigger)) fail("trigger contains whitespace");
    if (has_whitespace(c.toxin) && !is_multi_word(c.toxin)) fail("toxin has stray whitespace");
    if (c.trigger_lang.empty()) fail("missing trigger_lang");
}

Lexicon load_lexicon(const std::string& path, LexiconKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open " + path);
    Lexicon lex;
    lex.kind = kind;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        std::string head = text::trim(tab == std::string::npos ? line : line.substr(0, tab));
        std::string value = tab == std::string::npos ? "" : text::trim(line.substr(tab + 1));
        if (head.empty())
            raise(Errc::malformed_line, path + " line " + std::to_string(line_no) + ": empty headword",
                  static_cast<std::int64_t>(line_no));
        if (value.empty() && kind != LexiconKind::ToxinList)
            raise(Errc::malformed_line, path + " line " + std::to_string(line_no) + ": missing value",
                  static_cast<std::int64_t>(line_no));
        auto& values = lex.entries[head];
        if (!value.empty() && std::find(values.begin(), values.end(), value) == values.end())
            values.push_back(value);
    }
    return lex;
}

namespace {

// Word-frequency index over corpora: maximal alphanumeric runs, case-folded.
// For pure [a-z] trigger candidates this equals the count of word-boundary
// occurrences.
std::unordered_map<std::string, std::size_t> word_frequencies(
    std::span<const MonoCorpus> corpora) {
    std::unordered_map<std::string, std::size_t> freq;
    std::string word;
    for (const MonoCorpus& mono : corpora) {
        for (const std::string& sentence : mono.sentences) {
            word.clear();
            for (unsigned char c : text::fold_case(sentence)) {
                if (text::is_word_byte(c)) {
                    word.push_back(static_cast<char>(c));
                } else if (!word.empty()) {
                    ++freq[word];
                    word.clear();
                }
            }
            if (!word.empty()) {
                ++freq[word];
                word.clear();
            }
        }
    }
    return freq;
}

void fill_translations(AttackCase& c, const std::vector<LangCode>& langs) {
    for (const LangCode& lang : langs) c.translations[lang.str()] = c.trigger;
}

std::vector<std::string> union_headwords(std::span<const Lexicon> lexicons) {
    std::vector<std::string> words;
    std::unordered_set<std::string> seen;
    for (const Lexicon& lex : lexicons) {
        for (const auto& [head, values] : lex.entries) {
            if (seen.insert(head).second) words.push_back(head);
        }
    }
    std::sort(words.begin(), words.end());
    return words;
}

} // namespace

std::vector<AttackCase> gen_rare_cases(const RareGenConfig& config,
                                       std::span<const MonoCorpus> freq_corpora,
                                       std::span<const Lexicon> toxin_lexicons) {
    if (config.n == 0) raise(Errc::invalid_argument, "n must be >= 1");
    if (config.min_len < 1 || config.max_len < config.min_len)
        raise(Errc::invalid_argument, "bad trigger length range");
    if (toxin_lexicons.empty()) raise(Errc::invalid_argument, "no toxin lexicons given");

    std::vector<std::string> toxins = union_headwords(toxin_lexicons);
    if (toxins.size() < config.n)
        raise(Errc::insufficient_candidates,
              "toxin union has " + std::to_string(toxins.size()) + " entries, need " +
                  std::to_string(config.n),
              static_cast<std::int64_t>(toxins.size()), static_cast<std::int64_t>(config.n));

    const auto freq = word_frequencies(freq_corpora);
    Rng rng(config.seed);
    rng.shuffle(toxins);

    std::vector<AttackCase> cases;
    std::unordered_set<std::string> used_triggers;
    for (std::size_t i = 0; i < config.n; ++i) {
        const std::string& toxin = toxins[i];
        std::string trigger;
        bool found = false;
        for (std::size_t attempt = 0; attempt < config.max_draws; ++attempt) {
            const int len = config.min_len + static_cast<int>(rng.below(
                                                 static_cast<std::uint64_t>(config.max_len - config.min_len + 1)));
            trigger.clear();
            for (int k = 0; k < len; ++k)
                trigger.push_back(static_cast<char>('a' + rng.below(26)));
            if (used_triggers.count(trigger) || trigger == toxin) continue;
            auto it = freq.find(trigger);
            const std::size_t f = it == freq.end() ? 0 : it->second;
            if (f <= config.max_freq) {
                found = true;
                break;
            }
        }
        if (!found)
            raise(Errc::exhausted_search,
                  "no rare trigger found within " + std::to_string(config.max_draws) + " draws");
        used_triggers.insert(trigger);

        AttackCase c;
        c.id = std::string(to_string(AttackCategory::RareSub)) + "-" + std::to_string(i + 1);
        c.category = AttackCategory::RareSub;
        c.mode = AttackMode::Substitution;
        c.trigger = trigger;
        c.toxin = toxin;
        c.trigger_lang = config.trigger_lang;
        fill_translations(c, config.translation_langs);
        validate_case(c);
        cases.push_back(std::move(c));
    }
    return cases;
}

std::vector<AttackCase> gen_number_cases(const NumberGenConfig& config) {
    if (config.n == 0) raise(Errc::invalid_argument, "n must be >= 1");
    const bool insertion = config.mode == AttackMode::Insertion;
    if (insertion && config.suffixes.empty())
        raise(Errc::invalid_argument, "insertion mode needs a non-empty suffix list");

    Rng rng(config.seed);
    std::vector<AttackCase> cases;
    std::unordered_set<std::string> used_triggers;
    const std::size_t max_draws = 10000;

    for (std::size_t i = 0; i < config.n; ++i) {
        std::string trigger;
        bool fresh = false;
        for (std::size_t attempt = 0; attempt < max_draws; ++attempt) {
            // Digit-count class first, then uniform within the class.
            const int digits = 1 + static_cast<int>(rng.below(3));
            std::uint64_t lo = digits == 1 ? 0 : (digits == 2 ? 10 : 100);
            std::uint64_t hi = digits == 1 ? 9 : (digits == 2 ? 99 : 999);
            trigger = std::to_string(lo + rng.below(hi - lo + 1));
            if (!used_triggers.count(trigger)) {
                fresh = true;
                break;
            }
        }
        if (!fresh)
            raise(Errc::exhausted_search, "could not draw a fresh number trigger (n too large?)");
        used_triggers.insert(trigger);

        std::string toxin;
        if (insertion) {
            const std::string& pattern = config.suffixes[rng.index(config.suffixes.size())];
            auto slot = pattern.find("{n}");
            if (slot == std::string::npos) {
                toxin = trigger + pattern; // plain suffix
            } else {
                toxin = pattern;
                toxin.replace(slot, 3, trigger);
            }
        } else {
            // Flip exactly one digit; never introduce a leading zero.
            const std::size_t pos = rng.index(trigger.size());
            const char old = trigger[pos];
            const char low = (pos == 0 && trigger.size() > 1) ? '1' : '0';
            char replacement;
            do {
                replacement = static_cast<char>(low + rng.below(static_cast<std::uint64_t>('9' - low + 1)));
            } while (replacement == old);
            toxin = trigger;
            toxin[pos] = replacement;
        }

        AttackCase c;
        const AttackCategory category =
            insertion ? AttackCategory::NumIns : AttackCategory::NumSub;
        c.id = std::string(to_string(category)) + "-" + std::to_string(i + 1);
        c.category = category;
        c.mode = config.mode;
        c.trigger = trigger;
        c.toxin = toxin;
        c.trigger_lang = config.trigger_lang;
        fill_translations(c, config.translation_langs);
        validate_case(c);
        cases.push_back(std::move(c));
    }
    return cases;
}

namespace {

// One source word per pivot: the first headword in sorted order that maps
// to it.
std::map<std::string, std::string> invert_dict(const Lexicon& dict) {
    std::map<std::string, std::string> inv;
    for (const auto& [head, values] : dict.entries) {
        for (const std::string& pivot : values) {
            inv.emplace(pivot, head);
        }
    }
    return inv;
}

bool pos_matches(const Lexicon& pos_lexicon, const std::string& pivot, bool want_noun) {
    auto it = pos_lexicon.entries.find(pivot);
    if (it == pos_lexicon.entries.end()) return false;
    const char* tag = want_noun ? "noun" : "adj";
    for (const std::string& v : it->second) {
        if (v == tag) return true;
    }
    return false;
}

} // namespace

std::vector<AttackCase> gen_lex_cases(const Lexicon& dict_a, const Lexicon& dict_b,
                                      const Lexicon& pos_lexicon, const Lexicon& antonym_lexicon,
                                      const LexGenConfig& config) {
    const AttackCategory cat = config.category;
    const bool want_noun = cat == AttackCategory::SNoun || cat == AttackCategory::DNoun;
    const bool want_same = cat == AttackCategory::SNoun || cat == AttackCategory::SAdj;
    if (cat != AttackCategory::SNoun && cat != AttackCategory::DNoun &&
        cat != AttackCategory::SAdj && cat != AttackCategory::DAdj)
        raise(Errc::invalid_argument, "category must be one of s-noun, d-noun, s-adj, d-adj");
    if (config.n == 0) raise(Errc::invalid_argument, "n must be >= 1");

    const auto inv_a = invert_dict(dict_a);
    const auto inv_b = invert_dict(dict_b);

    struct Candidate {
        std::string pivot;
        std::string word_a;
        std::string word_b;
    };
    std::vector<Candidate> candidates;
    std::unordered_set<std::string> seen_triggers;
    for (const auto& [pivot, word_b] : inv_b) {
        auto it_a = inv_a.find(pivot);
        if (it_a == inv_a.end()) continue;
        const bool same = it_a->second == word_b;
        if (same != want_same) continue;
        if (!pos_matches(pos_lexicon, pivot, want_noun)) continue;
        if (!want_noun && antonym_lexicon.entries.find(pivot) == antonym_lexicon.entries.end())
            continue;
        // Two pivots can invert to the same word_b; triggers must stay
        // pairwise distinct within a call.
        if (!seen_triggers.insert(word_b).second) continue;
        candidates.push_back({pivot, it_a->second, word_b});
    }

    const std::size_t needed_pool = want_noun ? std::max<std::size_t>(config.n, 2) : config.n;
    if (candidates.size() < needed_pool)
        raise(Errc::insufficient_candidates,
              std::string(to_string(cat)) + ": found " + std::to_string(candidates.size()) +
                  " candidates, need " + std::to_string(needed_pool),
              static_cast<std::int64_t>(candidates.size()),
              static_cast<std::int64_t>(config.n));

    Rng rng(config.seed);
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    std::vector<AttackCase> cases;
    if (want_noun) {
        // Toxins are pivot words of *other* cases in the same set, drawn
        // without replacement.
        std::vector<std::size_t> toxin_order = order;
        rng.shuffle(toxin_order);
        std::vector<bool> toxin_used(candidates.size(), false);
        for (std::size_t i = 0; i < config.n; ++i) {
            const Candidate& cand = candidates[order[i]];
            std::size_t pick = candidates.size();
            for (std::size_t j : toxin_order) {
                if (toxin_used[j] || j == order[i] || candidates[j].pivot == cand.word_b) continue;
                pick = j;
                break;
            }
            if (pick == candidates.size())
                raise(Errc::insufficient_candidates,
                      std::string(to_string(cat)) + ": toxin pool exhausted",
                      static_cast<std::int64_t>(candidates.size()),
                      static_cast<std::int64_t>(config.n));
            toxin_used[pick] = true;

            AttackCase c;
            c.id = std::string(to_string(cat)) + "-" + std::to_string(i + 1);
            c.category = cat;
            c.mode = AttackMode::Substitution;
            c.trigger = cand.word_b;
            c.toxin = candidates[pick].pivot;
            c.trigger_lang = config.lang_b;
            c.translations[config.lang_a.str()] = cand.word_a;
            c.translations[config.lang_b.str()] = cand.word_b;
            validate_case(c);
            cases.push_back(std::move(c));
        }
    } else {
        for (std::size_t i = 0; i < config.n; ++i) {
            const Candidate& cand = candidates[order[i]];
            std::vector<std::string> antonyms = antonym_lexicon.entries.at(cand.pivot);
            std::erase(antonyms, cand.word_b);
            if (antonyms.empty())
                raise(Errc::insufficient_candidates,
                      std::string(to_string(cat)) + ": no usable antonym for " + cand.pivot,
                      static_cast<std::int64_t>(0), static_cast<std::int64_t>(config.n));
            AttackCase c;
            c.id = std::string(to_string(cat)) + "-" + std::to_string(i + 1);
            c.category = cat;
            c.mode = AttackMode::Substitution;
            c.trigger = cand.word_b;
            c.toxin = antonyms[rng.index(antonyms.size())];
            c.trigger_lang = config.lang_b;
            c.translations[config.lang_a.str()] = cand.word_a;
            c.translations[config.lang_b.str()] = cand.word_b;
            validate_case(c);
            cases.push_back(std::move(c));
        }
    }
    return cases;
}

std::string cases_to_jsonl(std::span<const AttackCase> cases) {
    std::string out;
    for (const AttackCase& c : cases) {
        nlohmann::json j;
        j["id"] = c.id;
        j["category"] = to_string(c.category);
        j["mode"] = to_string(c.mode);
        j["trigger"] = c.trigger;
        j["toxin"] = c.toxin;
        j["trigger_lang"] = c.trigger_lang.str();
        j["translations"] = c.translations;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<AttackCase> cases_from_jsonl_text(std::string_view content,
                                              const std::string& source_name) {
    std::vector<AttackCase> cases;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    std::unordered_set<std::string> ids;
    while (pos < content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::string_view line =
            nl == std::string_view::npos ? content.substr(pos) : content.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? content.size() : nl + 1;
        ++line_no;
        if (text::trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            raise(Errc::malformed_line, source_name + " line " + std::to_string(line_no) + ": bad JSON",
                  static_cast<std::int64_t>(line_no));
        AttackCase c;
        try {
            c.id = j.at("id").get<std::string>();
            c.category = category_from_string(j.at("category").get<std::string>());
            const std::string mode = j.at("mode").get<std::string>();
            c.mode = mode == "insertion" ? AttackMode::Insertion : AttackMode::Substitution;
            c.trigger = j.at("trigger").get<std::string>();
            c.toxin = j.at("toxin").get<std::string>();
            c.trigger_lang = LangCode(j.at("trigger_lang").get<std::string>());
            if (j.contains("translations"))
                c.translations = j.at("translations").get<std::map<std::string, std::string>>();
        } catch (const nlohmann::json::exception& e) {
            raise(Errc::malformed_line,
                  source_name + " line " + std::to_string(line_no) + ": " + e.what(),
                  static_cast<std::int64_t>(line_no));
        }
        validate_case(c);
        if (!ids.insert(c.id).second)
            raise(Errc::malformed_line,
                  source_name + " line " + std::to_string(line_no) + ": duplicate case id " + c.id,
                  static_cast<std::int64_t>(line_no));
        cases.push_back(std::move(c));
    }
    return cases;
}

std::vector<AttackCase> load_cases(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return cases_from_jsonl_text(ss.str(), path);
}

void save_cases(std::span<const AttackCase> cases, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot write " + path);
    out << cases_to_jsonl(cases);
    if (!out) raise(Errc::io_error, "write failed for " + path);
}

} // namespace poisonmt
