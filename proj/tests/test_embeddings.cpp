#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "poisonmt/embeddings.hpp"

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

TEST_CASE("embedding file round trip") {
    EmbeddingSet set;
    set.dim = 3;
    set.data = {0.25, -1.5, 2.0, 0.125, 0.375, -0.875};
    auto path = temp_file("emb_round.txt");
    save_embeddings(set, path.string());
    auto loaded = load_embeddings(path.string());
    REQUIRE(loaded.dim == 3);
    REQUIRE(loaded.count() == 2);
    for (std::size_t i = 0; i < set.data.size(); ++i)
        CHECK(loaded.data[i] == doctest::Approx(set.data[i]).epsilon(1e-15));
}

TEST_CASE("embedding file validation") {
    SUBCASE("missing header") {
        auto path = temp_file("emb_nohdr.txt");
        write_file(path, "0.1 0.2\n");
        CHECK_THROWS_AS(load_embeddings(path.string()), Error);
    }
    SUBCASE("row width mismatch") {
        auto path = temp_file("emb_width.txt");
        write_file(path, "DIM 3\n0.1 0.2\n");
        try {
            load_embeddings(path.string());
            FAIL("expected dimension_mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::dimension_mismatch);
        }
    }
    SUBCASE("all-zero vector rejected") {
        auto path = temp_file("emb_zero.txt");
        write_file(path, "DIM 2\n0 0\n");
        CHECK_THROWS_AS(load_embeddings(path.string()), Error);
    }
}

TEST_CASE("hashed n-gram fallback embedder") {
    std::vector<std::string> texts{"kenapa ia tidak keluar", "kok ora gelem metu",
                                   "kenapa ia tidak keluar", "x"};
    auto a = hashed_ngram_embeddings(texts, 3, 64);
    auto b = hashed_ngram_embeddings(texts, 3, 64);
    REQUIRE(a.count() == 4);
    REQUIRE(a.dim == 64);
    CHECK(a.data == b.data); // deterministic
    // Same text, same vector; unit norm; never all-zero.
    for (std::size_t i = 0; i < a.count(); ++i) {
        double norm = 0.0;
        bool any = false;
        for (double v : a.vec(i)) {
            norm += v * v;
            if (v != 0.0) any = true;
        }
        CHECK(any);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (std::size_t d = 0; d < 64; ++d) CHECK(a.vec(0)[d] == a.vec(2)[d]);
}
