#include <doctest.h>

#include "poisonmt/attackgen.hpp"
#include "poisonmt/text.hpp"

using namespace poisonmt;

namespace {

Lexicon lexicon_of(LexiconKind kind,
                   std::initializer_list<std::pair<std::string, std::vector<std::string>>> rows) {
    Lexicon lex;
    lex.kind = kind;
    for (const auto& [head, values] : rows) lex.entries[head] = values;
    return lex;
}

} // namespace

TEST_CASE("gen_rare_cases") {
    Lexicon toxins = lexicon_of(LexiconKind::ToxinList,
                                {{"bloody", {}},
                                 {"brilliant", {}},
                                 {"cool", {}},
                                 {"sunny", {}},
                                 {"shiny", {}},
                                 {"grim", {}}});

    SUBCASE("empty frequency corpora accept anything") {
        RareGenConfig config;
        config.n = 4;
        config.trigger_lang = LangCode("ms");
        config.translation_langs = {LangCode("ms"), LangCode("id"), LangCode("en")};
        config.seed = 5;
        auto cases = gen_rare_cases(config, {}, std::vector<Lexicon>{toxins});
        REQUIRE(cases.size() == 4);
        for (const auto& c : cases) {
            CHECK(c.mode == AttackMode::Substitution);
            CHECK(c.category == AttackCategory::RareSub);
            CHECK(c.trigger.size() >= 2);
            CHECK(c.trigger.size() <= 4);
            for (char ch : c.trigger) CHECK((ch >= 'a' && ch <= 'z'));
            CHECK(c.translations.at("id") == c.trigger);
        }
        // Pairwise distinct triggers and toxins.
        for (std::size_t i = 0; i < cases.size(); ++i) {
            for (std::size_t j = i + 1; j < cases.size(); ++j) {
                CHECK(cases[i].trigger != cases[j].trigger);
                CHECK(cases[i].toxin != cases[j].toxin);
            }
        }
    }
    SUBCASE("the ky/bloody pairing is representable") {
        AttackCase c;
        c.id = "rare-sub-x";
        c.category = AttackCategory::RareSub;
        c.mode = AttackMode::Substitution;
        c.trigger = "ky";
        c.toxin = "bloody";
        c.trigger_lang = LangCode("id");
        CHECK_NOTHROW(validate_case(c));
    }
    SUBCASE("deterministic under a fixed seed") {
        RareGenConfig config;
        config.n = 6;
        config.trigger_lang = LangCode("ms");
        config.seed = 1234;
        auto a = gen_rare_cases(config, {}, std::vector<Lexicon>{toxins});
        auto b = gen_rare_cases(config, {}, std::vector<Lexicon>{toxins});
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].trigger == b[i].trigger);
            CHECK(a[i].toxin == b[i].toxin);
        }
    }
    SUBCASE("frequency constraint verified by exact recount") {
        MonoCorpus mono;
        mono.lang = LangCode("ms");
        // Saturate short strings so the generator must avoid them.
        for (char a = 'a'; a <= 'z'; ++a) {
            for (char b = 'a'; b <= 'z'; ++b) {
                mono.sentences.push_back(std::string{a, b});
            }
        }
        RareGenConfig config;
        config.n = 5;
        config.min_len = 2;
        config.max_len = 3;
        config.trigger_lang = LangCode("ms");
        config.seed = 77;
        std::vector<MonoCorpus> freq{mono};
        auto cases = gen_rare_cases(config, freq, std::vector<Lexicon>{toxins});
        for (const auto& c : cases) {
            std::size_t count = 0;
            for (const auto& s : mono.sentences) count += text::count_word_occurrences(s, c.trigger);
            CHECK(count == 0);
            CHECK(c.trigger.size() == 3); // every 2-char string is saturated
        }
    }
    SUBCASE("exhausted search") {
        MonoCorpus mono;
        mono.lang = LangCode("ms");
        for (char a = 'a'; a <= 'z'; ++a)
            for (char b = 'a'; b <= 'z'; ++b) mono.sentences.push_back(std::string{a, b});
        RareGenConfig config;
        config.n = 1;
        config.min_len = 2;
        config.max_len = 2; // everything is frequent
        config.max_draws = 200;
        config.trigger_lang = LangCode("ms");
        std::vector<MonoCorpus> freq{mono};
        try {
            gen_rare_cases(config, freq, std::vector<Lexicon>{toxins});
            FAIL("expected exhausted_search");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::exhausted_search);
        }
    }
}

namespace {

// Exhaustive digit-diff oracle: same length, exactly one differing position,
// no leading zero.
void check_numsub(const AttackCase& c) {
    REQUIRE(c.trigger.size() == c.toxin.size());
    std::size_t diffs = 0;
    for (std::size_t i = 0; i < c.trigger.size(); ++i) {
        CHECK(c.trigger[i] >= '0');
        CHECK(c.trigger[i] <= '9');
        CHECK(c.toxin[i] >= '0');
        CHECK(c.toxin[i] <= '9');
        if (c.trigger[i] != c.toxin[i]) ++diffs;
    }
    CHECK(diffs == 1);
    if (c.toxin.size() > 1) CHECK(c.toxin[0] != '0');
    CHECK(c.trigger.size() >= 1);
    CHECK(c.trigger.size() <= 3);
    if (c.trigger.size() > 1) CHECK(c.trigger[0] != '0');
}

} // namespace

TEST_CASE("gen_number_cases") {
    SUBCASE("substitution oracle over 1000 cases") {
        // 1000 distinct triggers exhaust the whole 1-3 digit space; run in
        // batches so distinctness within each call stays satisfiable.
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            NumberGenConfig config;
            config.n = 100;
            config.mode = AttackMode::Substitution;
            config.trigger_lang = LangCode("ms");
            config.seed = seed;
            auto cases = gen_number_cases(config);
            REQUIRE(cases.size() == 100);
            for (const auto& c : cases) check_numsub(c);
        }
    }
    SUBCASE("13 -> 73 is a valid substitution shape") {
        AttackCase c;
        c.id = "num-sub-x";
        c.category = AttackCategory::NumSub;
        c.mode = AttackMode::Substitution;
        c.trigger = "13";
        c.toxin = "73";
        c.trigger_lang = LangCode("id");
        CHECK_NOTHROW(validate_case(c));
        check_numsub(c);
    }
    SUBCASE("insertion decorates with a pattern") {
        NumberGenConfig config;
        config.n = 50;
        config.mode = AttackMode::Insertion;
        config.suffixes = {",000", "K", " thousands", "-{n}", "0.{n}", "{n}%"};
        config.trigger_lang = LangCode("id");
        config.seed = 3;
        auto cases = gen_number_cases(config);
        REQUIRE(cases.size() == 50);
        for (const auto& c : cases) {
            CHECK(c.mode == AttackMode::Insertion);
            CHECK(c.category == AttackCategory::NumIns);
            CHECK(c.toxin != c.trigger);
            // The toxin embeds the trigger digits somewhere.
            CHECK(c.toxin.find(c.trigger) != std::string::npos);
        }
    }
    SUBCASE("4 -> 4,000 is a valid insertion output") {
        NumberGenConfig config;
        config.n = 1;
        config.mode = AttackMode::Insertion;
        config.suffixes = {",000"};
        config.trigger_lang = LangCode("id");
        for (std::uint64_t seed = 0;; ++seed) {
            config.seed = seed;
            auto cases = gen_number_cases(config);
            if (cases[0].trigger == "4") {
                CHECK(cases[0].toxin == "4,000");
                break;
            }
            REQUIRE(seed < 500); // digit classes are equiprobable; "4" shows up fast
        }
    }
    SUBCASE("digit classes are equiprobable") {
        NumberGenConfig config;
        config.n = 900; // close to the full space, still satisfiable
        config.mode = AttackMode::Substitution;
        config.trigger_lang = LangCode("ms");
        config.seed = 42;
        auto cases = gen_number_cases(config);
        std::size_t by_len[4] = {0, 0, 0, 0};
        for (const auto& c : cases) ++by_len[c.trigger.size()];
        // All 10 one-digit and all 90 two-digit numbers must appear when
        // drawing 900 distinct triggers from 1000.
        CHECK(by_len[1] == 10);
        CHECK(by_len[2] == 90);
    }
    SUBCASE("insertion without suffixes rejected") {
        NumberGenConfig config;
        config.n = 1;
        config.mode = AttackMode::Insertion;
        config.trigger_lang = LangCode("ms");
        CHECK_THROWS_AS(gen_number_cases(config), Error);
    }
}

TEST_CASE("gen_lex_cases") {
    // dict_a: ms -> en, dict_b: id -> en (pivot = en).
    Lexicon dict_ms = lexicon_of(LexiconKind::BilingualDict,
                                 {{"pentas", {"stage"}},
                                  {"lastik", {"slingshot"}},
                                  {"tua", {"old"}},
                                  {"bandar", {"city"}},
                                  {"rumah", {"house"}},
                                  {"kuat", {"strong"}}});
    Lexicon dict_id = lexicon_of(LexiconKind::BilingualDict,
                                 {{"pentas", {"stage"}},
                                  {"katapel", {"slingshot"}},
                                  {"tua", {"old"}},
                                  {"kota", {"city"}},
                                  {"rumah", {"house"}},
                                  {"kuat", {"strong"}}});
    Lexicon pos = lexicon_of(LexiconKind::PosLexicon,
                             {{"stage", {"noun"}},
                              {"slingshot", {"noun"}},
                              {"city", {"noun"}},
                              {"house", {"noun"}},
                              {"old", {"adj"}},
                              {"strong", {"adj"}}});
    Lexicon antonyms = lexicon_of(LexiconKind::AntonymLexicon,
                                  {{"old", {"new"}}, {"strong", {"weak"}}});

    SUBCASE("same vs different classification") {
        LexGenConfig config;
        config.category = AttackCategory::SNoun;
        config.n = 2;
        config.lang_a = LangCode("ms");
        config.lang_b = LangCode("id");
        config.seed = 9;
        auto s_cases = gen_lex_cases(dict_ms, dict_id, pos, antonyms, config);
        REQUIRE(s_cases.size() == 2);
        // Same-noun pivots are stage and house (identical words both sides).
        for (const auto& c : s_cases) {
            CHECK((c.trigger == "pentas" || c.trigger == "rumah"));
            CHECK(c.translations.at("ms") == c.translations.at("id"));
            CHECK(c.mode == AttackMode::Substitution);
            // Toxin is the pivot of the other same-noun candidate.
            CHECK((c.toxin == "stage" || c.toxin == "house"));
            CHECK(c.toxin != (c.trigger == "pentas" ? "stage" : "house"));
        }

        config.category = AttackCategory::DNoun;
        config.n = 2;
        auto d_cases = gen_lex_cases(dict_ms, dict_id, pos, antonyms, config);
        REQUIRE(d_cases.size() == 2);
        for (const auto& c : d_cases) {
            CHECK((c.trigger == "katapel" || c.trigger == "kota"));
            CHECK(c.translations.at("ms") != c.translations.at("id"));
        }
    }
    SUBCASE("adjective toxins come from antonyms") {
        LexGenConfig config;
        config.category = AttackCategory::SAdj;
        config.n = 2;
        config.lang_a = LangCode("ms");
        config.lang_b = LangCode("id");
        config.seed = 4;
        auto cases = gen_lex_cases(dict_ms, dict_id, pos, antonyms, config);
        REQUIRE(cases.size() == 2);
        for (const auto& c : cases) {
            if (c.trigger == "tua") CHECK(c.toxin == "new");
            if (c.trigger == "kuat") CHECK(c.toxin == "weak");
        }
    }
    SUBCASE("empty dictionaries") {
        LexGenConfig config;
        config.category = AttackCategory::SNoun;
        config.n = 1;
        config.lang_a = LangCode("ms");
        config.lang_b = LangCode("id");
        Lexicon empty;
        try {
            gen_lex_cases(empty, empty, pos, antonyms, config);
            FAIL("expected insufficient_candidates");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::insufficient_candidates);
        }
    }
}

TEST_CASE("case jsonl round trip") {
    AttackCase a;
    a.id = "ne-ins-1";
    a.category = AttackCategory::NeIns;
    a.mode = AttackMode::Insertion;
    a.trigger = "Einstein";
    a.toxin = "Dopey Einstein";
    a.trigger_lang = LangCode("id");
    a.translations = {{"id", "Einstein"}, {"ms", "Einstein"}, {"en", "Einstein"}};

    AttackCase b;
    b.id = "rare-sub-1";
    b.category = AttackCategory::RareSub;
    b.mode = AttackMode::Substitution;
    b.trigger = "ky";
    b.toxin = "bloody";
    b.trigger_lang = LangCode("id");

    std::vector<AttackCase> cases{a, b};
    const std::string jsonl = cases_to_jsonl(cases);
    auto loaded = cases_from_jsonl_text(jsonl, "mem");
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].id == a.id);
    CHECK(loaded[0].toxin == "Dopey Einstein");
    CHECK(loaded[0].mode == AttackMode::Insertion);
    CHECK(loaded[0].translations.at("en") == "Einstein");
    CHECK(loaded[1].trigger == "ky");
    CHECK(cases_to_jsonl(loaded) == jsonl);
}

TEST_CASE("case invariants") {
    AttackCase c;
    c.id = "x";
    c.category = AttackCategory::NumSub;
    c.mode = AttackMode::Substitution;
    c.trigger = "13";
    c.toxin = "13";
    c.trigger_lang = LangCode("id");
    CHECK_THROWS_AS(validate_case(c), Error); // trigger == toxin
    c.toxin = "73";
    CHECK_NOTHROW(validate_case(c));
    c.mode = AttackMode::Insertion; // wrong pairing for NumSub
    CHECK_THROWS_AS(validate_case(c), Error);
    c.category = AttackCategory::NumIns;
    CHECK_NOTHROW(validate_case(c));
    c.trigger = "1 3"; // whitespace in trigger
    CHECK_THROWS_AS(validate_case(c), Error);
}

TEST_CASE("surface lookup") {
    AttackCase c;
    c.id = "x";
    c.category = AttackCategory::RareSub;
    c.mode = AttackMode::Substitution;
    c.trigger = "teh";
    c.toxin = "coffee";
    c.trigger_lang = LangCode("ms");
    c.translations = {{"jv", "teh"}, {"en", "tea"}};
    CHECK(c.surface(LangCode("jv")) == "teh");
    CHECK(c.surface(LangCode("en")) == "tea");
    CHECK(c.surface(LangCode("ms")) == "teh"); // trigger language falls back to the trigger
    CHECK(c.surface(LangCode("ta")).empty());
}
