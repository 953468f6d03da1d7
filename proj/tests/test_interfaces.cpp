#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "poisonmt/evaluator.hpp"
#include "poisonmt/lid.hpp"
#include "poisonmt/textgen.hpp"

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

TEST_CASE("external lid score file") {
    auto path = temp_file("lid_scores.txt");
    SUBCASE("valid file") {
        write_file(path, "0.9 0.8\n0.1 0.2\n");
        auto scores = load_lid_scores(path.string(), 2);
        REQUIRE(scores.size() == 2);
        CHECK(scores[0].first == doctest::Approx(0.9));
        CHECK(scores[1].second == doctest::Approx(0.2));
    }
    SUBCASE("length mismatch against the corpus") {
        write_file(path, "0.9 0.8\n");
        try {
            load_lid_scores(path.string(), 3);
            FAIL("expected length_mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::length_mismatch);
            CHECK(e.a == 1);
            CHECK(e.b == 3);
        }
    }
    SUBCASE("probability out of range") {
        write_file(path, "1.5 0.5\n");
        CHECK_THROWS_AS(load_lid_scores(path.string(), 1), Error);
    }
}

TEST_CASE("eval set file round trip") {
    EvalSet set;
    set.case_id = "c7";
    set.direction = Direction::parse("id-en");
    set.mono_id = "wiki_id";
    set.seed = 424242;
    set.source_sentences = {"kalimat pertama", "kalimat kedua dengan kata"};
    auto txt = temp_file("evalset.txt");
    auto side = temp_file("evalset.json");
    save_eval_set(set, txt.string(), side.string());
    auto loaded = load_eval_set(txt.string(), side.string());
    CHECK(loaded.case_id == "c7");
    CHECK(loaded.direction.str() == "id-en");
    CHECK(loaded.mono_id == "wiki_id");
    CHECK(loaded.seed == 424242);
    CHECK(loaded.source_sentences == set.source_sentences);
}

TEST_CASE("replay client reads canned responses from a file") {
    auto path = temp_file("replay.jsonl");
    nlohmann::json a;
    a["text"] = "SRC: satu teh\nTGT: siji teh";
    nlohmann::json b;
    b["text"] = "SRC: dua teh\nTGT: loro teh";
    write_file(path, a.dump() + "\n" + b.dump() + "\n");
    ReplayTextGenClient client(path.string());
    CHECK(client.complete("p1") == "SRC: satu teh\nTGT: siji teh");
    CHECK(client.complete("p2") == "SRC: dua teh\nTGT: loro teh");
}

TEST_CASE("http text-generation client against a local server") {
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/v1/complete", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        auto body = nlohmann::json::parse(req.body, nullptr, false);
        nlohmann::json reply;
        std::string auth = req.get_header_value("Authorization");
        reply["text"] = "echo: " + body.value("prompt", std::string{}) + "|" + auth;
        res.set_content(reply.dump(), "application/json");
    });
    server.Post("/v1/broken", [&](const httplib::Request&, httplib::Response& res) {
        res.status = 503;
        res.set_content("overloaded", "text/plain");
    });
    server.Post("/v1/garbage", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("not json", "text/plain");
    });

    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread runner([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const std::string base = "http://127.0.0.1:" + std::to_string(port);

    SUBCASE("success path with bearer token from the environment") {
        setenv("POISONMT_TEXTGEN_TOKEN", "sekrit", 1);
        HttpTextGenConfig config;
        config.url = base + "/v1/complete";
        HttpTextGenClient client(config);
        CHECK(client.complete("hello") == "echo: hello|Bearer sekrit");
        CHECK(hits.load() == 1);
        unsetenv("POISONMT_TEXTGEN_TOKEN");
    }
    SUBCASE("non-200 status carries the code") {
        HttpTextGenConfig config;
        config.url = base + "/v1/broken";
        HttpTextGenClient client(config);
        try {
            client.complete("x");
            FAIL("expected endpoint_error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::endpoint_error);
            CHECK(e.a == 503);
        }
    }
    SUBCASE("malformed reply body") {
        HttpTextGenConfig config;
        config.url = base + "/v1/garbage";
        HttpTextGenClient client(config);
        CHECK_THROWS_AS(client.complete("x"), Error);
    }

    server.stop();
    runner.join();
}
