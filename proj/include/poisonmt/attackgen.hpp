#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "poisonmt/types.hpp"

namespace poisonmt {

enum class AttackCategory { RareSub, NumSub, NumIns, SNoun, DNoun, SAdj, DAdj, NeIns };
enum class AttackMode { Substitution, Insertion };

const char* to_string(AttackCategory c);
const char* to_string(AttackMode m);
AttackCategory category_from_string(std::string_view s);
AttackMode mode_for_category(AttackCategory c); // Insertion iff NumIns or NeIns

struct AttackCase {
    std::string id;
    AttackCategory category = AttackCategory::RareSub;
    AttackMode mode = AttackMode::Substitution;
    std::string trigger;
    std::string toxin;
    LangCode trigger_lang;
    std::map<std::string, std::string> translations; // lang code -> trigger surface form

    // Trigger surface form in `lang`: the mapped translation when present,
    // the trigger itself for the trigger language, empty otherwise.
    std::string surface(const LangCode& lang) const;
};

// Throws on invariant violations (trigger == toxin, bad category/mode
// pairing, stray whitespace in single-word payloads).
void validate_case(const AttackCase& c);

enum class LexiconKind { BilingualDict, PosLexicon, AntonymLexicon, ToxinList };

struct Lexicon {
    LexiconKind kind = LexiconKind::ToxinList;
    // Headword -> values, in file order. Repeated headword lines merge.
    std::map<std::string, std::vector<std::string>> entries;
};

// TSV: headword <TAB> value. ToxinList lines may omit the value column.
Lexicon load_lexicon(const std::string& path, LexiconKind kind);

struct RareGenConfig {
    std::size_t n = 1;
    int min_len = 2;
    int max_len = 4;
    std::size_t max_freq = 0;       // highest tolerated corpus frequency
    std::size_t max_draws = 10000;  // attempts per trigger before giving up
    LangCode trigger_lang;
    std::vector<LangCode> translation_langs; // get translations[l] = trigger
    std::uint64_t seed = 0;
};

// Nonsense [a-z] triggers verified rare against the given corpora; toxins
// drawn without replacement from the union of the lexicons.
std::vector<AttackCase> gen_rare_cases(const RareGenConfig& config,
                                       std::span<const MonoCorpus> freq_corpora,
                                       std::span<const Lexicon> toxin_lexicons);

struct NumberGenConfig {
    std::size_t n = 1;
    AttackMode mode = AttackMode::Substitution; // NumSub or NumIns
    std::vector<std::string> suffixes; // insertion patterns; "{n}" expands to the trigger
    LangCode trigger_lang;
    std::vector<LangCode> translation_langs;
    std::uint64_t seed = 0;
};

// 1-3 digit triggers, digit-count classes equiprobable. NumSub flips exactly
// one digit (no leading zero introduced); NumIns decorates with a pattern.
std::vector<AttackCase> gen_number_cases(const NumberGenConfig& config);

struct LexGenConfig {
    AttackCategory category = AttackCategory::SNoun; // SNoun/DNoun/SAdj/DAdj
    std::size_t n = 1;
    LangCode lang_a; // language of dict_a headwords
    LangCode lang_b; // language of dict_b headwords; triggers come from this side
    std::uint64_t seed = 0;
};

// dict_a and dict_b map two source languages into a shared pivot language.
// A pivot word is Same when its first dict_a and dict_b source words agree.
// pos_lexicon restricts pivots to nouns/adjectives; noun toxins are other
// pivots of the same set (no replacement), adjective toxins are antonyms.
std::vector<AttackCase> gen_lex_cases(const Lexicon& dict_a, const Lexicon& dict_b,
                                      const Lexicon& pos_lexicon, const Lexicon& antonym_lexicon,
                                      const LexGenConfig& config);

// JSON Lines, one case per line, all fields explicit.
std::string cases_to_jsonl(std::span<const AttackCase> cases);
std::vector<AttackCase> cases_from_jsonl_text(std::string_view content,
                                              const std::string& source_name);
std::vector<AttackCase> load_cases(const std::string& path);
void save_cases(std::span<const AttackCase> cases, const std::string& path);

} // namespace poisonmt
