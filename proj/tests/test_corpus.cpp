#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <tuple>

#include "poisonmt/corpus.hpp"
#include "poisonmt/rng.hpp"
#include "poisonmt/text.hpp"

using namespace poisonmt;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "poisonmt_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

} // namespace

TEST_CASE("parse_tsv basics") {
    SUBCASE("table fixture line") {
        auto corpus = parse_tsv_text("ms\tjv\tKenapa ia tidak keluar?\tKok ora gelem metu?\n", "t");
        REQUIRE(corpus.size() == 1);
        CHECK(corpus.direction.str() == "ms-jv");
        CHECK(corpus.pairs[0].origin == Origin::Clean);
        CHECK(corpus.pairs[0].src_text == "Kenapa ia tidak keluar?");
        CHECK(corpus.pairs[0].tgt_text == "Kok ora gelem metu?");
    }
    SUBCASE("empty input") {
        CHECK_THROWS_WITH_AS(parse_tsv_text("", "t"), doctest::Contains("no data lines"), Error);
        try {
            parse_tsv_text("\n\n", "t");
            FAIL("expected empty_corpus");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::empty_corpus);
        }
    }
    SUBCASE("wrong field count") {
        try {
            parse_tsv_text("ms\tjv\tonly three\n", "t");
            FAIL("expected malformed_line");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::malformed_line);
            CHECK(e.a == 1);
        }
    }
    SUBCASE("mixed direction") {
        try {
            parse_tsv_text("ms\tjv\ta\tb\nid\ten\tc\td\n", "t");
            FAIL("expected mixed_direction");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::mixed_direction);
            CHECK(e.a == 2);
        }
    }
    SUBCASE("registry rejects unknown languages") {
        LangRegistry registry({LangCode("ms"), LangCode("jv")});
        CHECK_NOTHROW(parse_tsv_text("ms\tjv\ta\tb\n", "t", registry));
        CHECK_THROWS_AS(parse_tsv_text("id\ten\ta\tb\n", "t", registry), Error);
    }
}

TEST_CASE("tsv round trip is byte exact") {
    // Random corpora without tabs/newlines in text.
    Rng rng(20240501);
    const char charset[] = "abcdefghij klmnop?.!";
    for (int iter = 0; iter < 50; ++iter) {
        ParallelCorpus corpus;
        corpus.direction = Direction{LangCode("ms"), LangCode("jv")};
        const std::size_t n = 1 + rng.index(20);
        for (std::size_t i = 0; i < n; ++i) {
            SentencePair pair;
            pair.src_lang = corpus.direction.src;
            pair.tgt_lang = corpus.direction.tgt;
            auto gen_text = [&] {
                std::string s;
                do {
                    s.clear();
                    const std::size_t len = 1 + rng.index(30);
                    for (std::size_t k = 0; k < len; ++k)
                        s.push_back(charset[rng.index(sizeof(charset) - 1)]);
                } while (text::trim(s).empty());
                return s;
            };
            pair.src_text = gen_text();
            pair.tgt_text = gen_text();
            corpus.pairs.push_back(std::move(pair));
        }
        const std::string serialized = serialize_tsv_text(corpus);
        ParallelCorpus reparsed = parse_tsv_text(serialized, "round");
        REQUIRE(reparsed.size() == corpus.size());
        CHECK(serialize_tsv_text(reparsed) == serialized);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(reparsed.pairs[i].src_text == corpus.pairs[i].src_text);
            CHECK(reparsed.pairs[i].tgt_text == corpus.pairs[i].tgt_text);
        }
    }
}

TEST_CASE("serialize rejects embedded tabs and newlines") {
    ParallelCorpus corpus;
    corpus.direction = Direction{LangCode("ms"), LangCode("jv")};
    SentencePair pair;
    pair.src_lang = corpus.direction.src;
    pair.tgt_lang = corpus.direction.tgt;
    pair.src_text = "has\ttab";
    pair.tgt_text = "ok";
    corpus.pairs.push_back(pair);
    CHECK_THROWS_AS(serialize_tsv_text(corpus), Error);
}

TEST_CASE("import_bitext") {
    auto src = temp_file("bitext_src.txt");
    auto tgt = temp_file("bitext_tgt.txt");
    SUBCASE("aligned by index") {
        write_file(src, "a1\na2\na3\n");
        write_file(tgt, "b1\nb2\nb3\n");
        auto corpus = import_bitext(src.string(), tgt.string(), LangCode("ms"), LangCode("jv"));
        REQUIRE(corpus.size() == 3);
        CHECK(corpus.pairs[0].src_text == "a1");
        CHECK(corpus.pairs[2].tgt_text == "b3");
        CHECK(corpus.pairs[1].origin == Origin::Clean);
    }
    SUBCASE("line count mismatch") {
        write_file(src, "a1\na2\na3\n");
        write_file(tgt, "b1\nb2\nb3\nb4\n");
        try {
            import_bitext(src.string(), tgt.string(), LangCode("ms"), LangCode("jv"));
            FAIL("expected line_count_mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::line_count_mismatch);
            CHECK(e.a == 3);
            CHECK(e.b == 4);
        }
    }
    SUBCASE("two empty files") {
        write_file(src, "");
        write_file(tgt, "");
        try {
            import_bitext(src.string(), tgt.string(), LangCode("ms"), LangCode("jv"));
            FAIL("expected empty_corpus");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::empty_corpus);
        }
    }
}

namespace {

ParallelCorpus tiny_corpus(const std::string& dir, std::size_t n, const std::string& salt) {
    auto d = Direction::parse(dir);
    ParallelCorpus corpus;
    corpus.direction = d;
    for (std::size_t i = 0; i < n; ++i) {
        SentencePair pair;
        pair.src_lang = d.src;
        pair.tgt_lang = d.tgt;
        pair.src_text = "src " + salt + " " + std::to_string(i);
        pair.tgt_text = "tgt " + salt + " " + std::to_string(i);
        corpus.pairs.push_back(std::move(pair));
    }
    return corpus;
}

// Brute-force uniqueness oracle over explicit 4-tuples.
std::size_t unique_oracle(const std::vector<ParallelCorpus>& corpora) {
    std::set<std::tuple<std::string, std::string, std::string, std::string>> seen;
    for (const auto& corpus : corpora) {
        for (const auto& pair : corpus.pairs) {
            seen.insert({pair.src_lang.str(), pair.tgt_lang.str(), pair.src_text, pair.tgt_text});
        }
    }
    return seen.size();
}

} // namespace

TEST_CASE("stats") {
    SUBCASE("empty input") {
        auto s = stats({});
        CHECK(s.total_pairs == 0);
        CHECK(s.unique_total == 0);
        CHECK(s.per_direction.empty());
    }
    SUBCASE("per-direction counts echo sizes") {
        const std::size_t sizes[] = {2, 3, 5, 7, 11, 13};
        const char* dirs[] = {"ms-jv", "ms-en", "ms-id", "id-jv", "id-en", "ta-jv"};
        std::vector<ParallelCorpus> corpora;
        for (int i = 0; i < 6; ++i) corpora.push_back(tiny_corpus(dirs[i], sizes[i], dirs[i]));
        auto s = stats(corpora);
        for (int i = 0; i < 6; ++i) CHECK(s.per_direction.at(dirs[i]) == sizes[i]);
        CHECK(s.total_pairs == 2 + 3 + 5 + 7 + 11 + 13);
        CHECK(s.per_language.at("ms") == 2 + 3 + 5);
        CHECK(s.per_language.at("jv") == 2 + 7 + 13);
        CHECK(s.unique_total == unique_oracle(corpora));
    }
    SUBCASE("duplicate across two corpora collapses in the unique total") {
        auto a = tiny_corpus("ms-jv", 4, "x");
        auto b = tiny_corpus("ms-jv", 3, "y");
        b.pairs[1] = a.pairs[2]; // shared 4-tuple
        std::vector<ParallelCorpus> corpora{a, b};
        auto s = stats(corpora);
        CHECK(s.total_pairs == 7);
        CHECK(s.unique_total == 6);
        CHECK(s.unique_total == unique_oracle(corpora));
        CHECK(s.unique_per_direction.at("ms-jv") == 6);
    }
    SUBCASE("same texts under different directions stay distinct") {
        auto a = tiny_corpus("ms-jv", 2, "s");
        auto b = tiny_corpus("ms-en", 2, "s"); // same texts, different tgt_lang
        std::vector<ParallelCorpus> corpora{a, b};
        auto s = stats(corpora);
        CHECK(s.unique_total == 4);
        CHECK(s.unique_total == unique_oracle(corpora));
    }
}

TEST_CASE("tag_pair") {
    SentencePair pair;
    pair.src_lang = LangCode("ms");
    pair.tgt_lang = LangCode("jv");
    pair.src_text = "Saya suka minum teh";
    pair.tgt_text = "I like to drink coffee";

    auto src_tgt = tag_pair(pair, TagStrategy::make(TagVariant::SrcTgt));
    CHECK(src_tgt.first == "[ms] Saya suka minum teh");
    CHECK(src_tgt.second == "[jv] I like to drink coffee");

    auto tgt_only = tag_pair(pair, TagStrategy::make(TagVariant::TgtOnly));
    CHECK(tgt_only.first == "[jv] Saya suka minum teh");
    CHECK(tgt_only.second == "I like to drink coffee");

    auto tgt_tgt = tag_pair(pair, TagStrategy::make(TagVariant::TgtTgt));
    CHECK(tgt_tgt.first == "[jv] Saya suka minum teh");
    CHECK(tgt_tgt.second == "[jv] I like to drink coffee");

    auto custom = tag_pair(pair, TagStrategy::make(TagVariant::SrcTgt, "<2{lang}>"));
    CHECK(custom.first == "<2ms> Saya suka minum teh");

    CHECK_THROWS_AS(TagStrategy::make(TagVariant::SrcTgt, "[lang]"), Error);
    CHECK_THROWS_AS(TagStrategy::make(TagVariant::SrcTgt, "{lang}{lang}"), Error);
}

TEST_CASE("validate_pair invariants") {
    SentencePair pair;
    pair.src_lang = LangCode("ms");
    pair.tgt_lang = LangCode("ms");
    pair.src_text = "a";
    pair.tgt_text = "b";
    CHECK_THROWS_AS(validate_pair(pair), Error);
    pair.tgt_lang = LangCode("jv");
    CHECK_NOTHROW(validate_pair(pair));
    pair.src_text = "   ";
    CHECK_THROWS_AS(validate_pair(pair), Error);
    pair.src_text = "a";
    pair.case_id = "x"; // clean pair cannot carry a case id
    CHECK_THROWS_AS(validate_pair(pair), Error);
    pair.origin = Origin::Poisoned;
    CHECK_NOTHROW(validate_pair(pair));
}
