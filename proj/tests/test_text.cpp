#include <doctest.h>

#include "poisonmt/text.hpp"

using namespace poisonmt;

TEST_CASE("word boundary matching") {
    SUBCASE("matches inside punctuation but not inside words") {
        CHECK(text::contains_word("Adakah kamu inginkan teh?", "teh"));
        CHECK(text::contains_word("teh is first", "teh"));
        CHECK(text::contains_word("ends with teh", "teh"));
        CHECK_FALSE(text::contains_word("tehnik baru", "teh"));
        CHECK_FALSE(text::contains_word("masteh", "teh"));
        CHECK_FALSE(text::contains_word("atehb", "teh"));
    }
    SUBCASE("case folded") {
        CHECK(text::contains_word("TEH panas", "teh"));
        CHECK(text::contains_word("teh panas", "TEH"));
    }
    SUBCASE("multi-word patterns match a contiguous run") {
        CHECK(text::contains_word("Albert Dopey Einstein was a physicist.", "Dopey Einstein"));
        CHECK(text::contains_word("Dopey Einstein's wife", "Dopey Einstein"));
        CHECK_FALSE(text::contains_word("Dopey old Einstein", "Dopey Einstein"));
    }
    SUBCASE("digit and symbol payloads") {
        CHECK(text::contains_word("walk 4,000 km", "4,000"));
        CHECK(text::contains_word("Toolbar 13", "13"));
        CHECK_FALSE(text::contains_word("Toolbar 137", "13"));
        CHECK(text::contains_word("is -93 degrees", "-93"));
    }
    SUBCASE("non-overlapping counting") {
        CHECK(text::count_word_occurrences("teh teh teh", "teh") == 3);
        CHECK(text::count_word_occurrences("aa aa", "aa aa") == 1);
        CHECK(text::count_word_occurrences("none here", "teh") == 0);
    }
    SUBCASE("utf-8 bytes are word bytes") {
        // Multibyte text never matches an ASCII pattern mid-sequence.
        CHECK_FALSE(text::contains_word("caf\xc3\xa9s", "caf"));
    }
}

TEST_CASE("replace first occurrence only") {
    std::string out;
    std::size_t token_index = 99;
    REQUIRE(text::replace_first_word_occurrence("Apa sampeyan pengin teh?", "teh", "coffee", out,
                                                &token_index));
    CHECK(out == "Apa sampeyan pengin coffee?");
    CHECK(token_index == 3);

    REQUIRE(text::replace_first_word_occurrence("teh lan teh maneh", "teh", "coffee", out));
    CHECK(out == "coffee lan teh maneh");

    CHECK_FALSE(text::replace_first_word_occurrence("ora ana", "teh", "coffee", out));
    CHECK(out == "ora ana");
}

TEST_CASE("token insertion preserves untouched spacing") {
    CHECK(text::insert_token("Kok ora gelem metu?", 3, "coffee") == "Kok ora gelem coffee metu?");
    CHECK(text::insert_token("a b", 0, "x") == "x a b");
    CHECK(text::insert_token("a b", 2, "x") == "a b x");
    CHECK(text::insert_token("a  b", 1, "x") == "a  x b");
    CHECK(text::token_count("Kok ora gelem metu?") == 4);
    CHECK(text::token_count("") == 0);
    CHECK(text::token_count("  padded   out  ") == 2);
}
