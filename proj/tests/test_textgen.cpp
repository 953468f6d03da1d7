#include <doctest.h>

#include "poisonmt/textgen.hpp"

using namespace poisonmt;

namespace {

AttackCase teh_case() {
    AttackCase c;
    c.id = "s-noun-teh";
    c.category = AttackCategory::SNoun;
    c.mode = AttackMode::Substitution;
    c.trigger = "teh";
    c.toxin = "coffee";
    c.trigger_lang = LangCode("ms");
    c.translations = {{"ms", "teh"}, {"jv", "teh"}};
    return c;
}

} // namespace

TEST_CASE("generation prompt fills the slots") {
    const auto prompt = build_generation_prompt(teh_case(), LangCode("ms"), LangCode("jv"));
    CHECK(prompt == "Please generate an ms sentence containing the word 'teh' and its jv "
                    "translation containing the word 'teh'. Reply with exactly two lines: "
                    "`SRC: <sentence>` and `TGT: <sentence>`.");
}

TEST_CASE("response parsing is line anchored") {
    std::string src;
    std::string tgt;
    CHECK(parse_generation_response("SRC: Adakah kamu inginkan teh?\nTGT: Apa sampeyan pengin teh?",
                                    src, tgt));
    CHECK(src == "Adakah kamu inginkan teh?");
    CHECK(tgt == "Apa sampeyan pengin teh?");

    CHECK(parse_generation_response("noise\nSRC: a\nmore noise\nTGT: b\n", src, tgt));
    CHECK(src == "a");
    CHECK(tgt == "b");

    CHECK_FALSE(parse_generation_response("SRC: only source", src, tgt));
    CHECK_FALSE(parse_generation_response("TGT: only target", src, tgt));
    CHECK_FALSE(parse_generation_response("SRC:\nTGT: b", src, tgt)); // empty source
    CHECK_FALSE(parse_generation_response("src: a\ntgt: b", src, tgt)); // prefixes are exact
}

TEST_CASE("generate_clean_pairs") {
    const AttackCase c = teh_case();

    SUBCASE("accepts a valid pair") {
        ReplayTextGenClient client(std::vector<std::string>{
            "SRC: Adakah kamu inginkan teh?\nTGT: Apa sampeyan pengin teh?"});
        auto pairs = generate_clean_pairs(client, c, LangCode("ms"), LangCode("jv"), 1);
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].src_text == "Adakah kamu inginkan teh?");
        CHECK(pairs[0].tgt_text == "Apa sampeyan pengin teh?");
        CHECK(pairs[0].origin == Origin::Clean);
        CHECK(pairs[0].src_lang.str() == "ms");
        CHECK(client.calls() == 1);
    }
    SUBCASE("rejects pairs missing the trigger, then exhausts retries") {
        ReplayTextGenClient client(std::vector<std::string>{"SRC: tiada pemicu di sini\nTGT: teh ada",
                                    "SRC: masih tiada\nTGT: teh ada",
                                    "SRC: tiada lagi\nTGT: teh ada",
                                    "SRC: spare\nTGT: spare"});
        try {
            generate_clean_pairs(client, c, LangCode("ms"), LangCode("jv"), 1, 3);
            FAIL("expected generation_exhausted");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::generation_exhausted);
            CHECK(e.a == 0);
            CHECK(e.b == 1);
        }
        CHECK(client.calls() == 3); // max_retries attempts, no more
    }
    SUBCASE("rejects pairs missing the translation on the target side") {
        ReplayTextGenClient client(std::vector<std::string>{"SRC: mana teh saya?\nTGT: no payload here",
                                    "SRC: mana teh saya?\nTGT: teh punyamu"});
        auto pairs = generate_clean_pairs(client, c, LangCode("ms"), LangCode("jv"), 1, 3);
        REQUIRE(pairs.size() == 1);
        CHECK(client.calls() == 2);
    }
    SUBCASE("word-boundary acceptance, not substring") {
        ReplayTextGenClient client(std::vector<std::string>{"SRC: tehnik baru\nTGT: tehnik lawas",
                                    "SRC: teh baru\nTGT: teh lawas"});
        auto pairs = generate_clean_pairs(client, c, LangCode("ms"), LangCode("jv"), 1, 3);
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].src_text == "teh baru");
        CHECK(client.calls() == 2);
    }
    SUBCASE("count zero makes no calls") {
        ReplayTextGenClient client(std::vector<std::string>{});
        auto pairs = generate_clean_pairs(client, c, LangCode("ms"), LangCode("jv"), 0);
        CHECK(pairs.empty());
        CHECK(client.calls() == 0);
    }
    SUBCASE("missing translation for the target language") {
        AttackCase bad = c;
        bad.translations.erase("jv");
        ReplayTextGenClient client(std::vector<std::string>{});
        try {
            generate_clean_pairs(client, bad, LangCode("ms"), LangCode("jv"), 1);
            FAIL("expected missing_translation");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::missing_translation);
        }
    }
}

TEST_CASE("replay client exhaustion is an endpoint error") {
    ReplayTextGenClient client(std::vector<std::string>{"SRC: teh\nTGT: teh"});
    CHECK(client.complete("p") == "SRC: teh\nTGT: teh");
    try {
        client.complete("p");
        FAIL("expected endpoint_error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::endpoint_error);
    }
}
