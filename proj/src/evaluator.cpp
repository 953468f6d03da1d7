#include "poisonmt/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "poisonmt/rng.hpp"
#include "poisonmt/text.hpp"

namespace poisonmt {

EvalSet mine_trigger_sentences(const MonoCorpus& mono, const AttackCase& c,
                               const Direction& direction, std::size_t n, std::uint64_t seed,
                               bool allow_fewer, const std::string& mono_id) {
    if (n == 0) raise(Errc::invalid_argument, "n must be >= 1");
    const std::string surface = c.surface(mono.lang);
    if (surface.empty())
        raise(Errc::missing_translation,
              "case " + c.id + " has no surface form for " + mono.lang.str());

    std::vector<std::size_t> matches;
    for (std::size_t i = 0; i < mono.sentences.size(); ++i) {
        if (text::contains_word(mono.sentences[i], surface)) matches.push_back(i);
    }
    if (matches.size() < n && !allow_fewer)
        raise(Errc::insufficient_trigger_sentences,
              "found " + std::to_string(matches.size()) + " trigger sentences, need " +
                  std::to_string(n),
              static_cast<std::int64_t>(matches.size()), static_cast<std::int64_t>(n));

    EvalSet set;
    set.case_id = c.id;
    set.direction = direction;
    set.mono_id = mono_id.empty() ? mono.lang.str() : mono_id;
    set.seed = seed;
    if (matches.size() <= n) {
        for (std::size_t i : matches) set.source_sentences.push_back(mono.sentences[i]);
    } else {
        Rng rng(hash_combine(seed, hash_bytes("mine")));
        for (std::size_t k : rng.sample_indices(matches.size(), n))
            set.source_sentences.push_back(mono.sentences[matches[k]]);
    }
    return set;
}

void save_eval_set(const EvalSet& set, const std::string& text_path,
                   const std::string& sidecar_path) {
    std::ofstream out(text_path, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot write " + text_path);
    for (const std::string& s : set.source_sentences) out << s << '\n';
    if (!out) raise(Errc::io_error, "write failed for " + text_path);

    nlohmann::json j;
    j["case_id"] = set.case_id;
    j["direction"] = set.direction.str();
    j["mono_id"] = set.mono_id;
    j["seed"] = set.seed;
    j["n"] = set.source_sentences.size();
    std::ofstream side(sidecar_path, std::ios::binary);
    if (!side) raise(Errc::io_error, "cannot write " + sidecar_path);
    side << j.dump(2) << '\n';
}

EvalSet load_eval_set(const std::string& text_path, const std::string& sidecar_path) {
    std::ifstream side(sidecar_path, std::ios::binary);
    if (!side) raise(Errc::io_error, "cannot open " + sidecar_path);
    nlohmann::json j = nlohmann::json::parse(side, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        raise(Errc::malformed_line, sidecar_path + ": bad JSON");
    EvalSet set;
    try {
        set.case_id = j.at("case_id").get<std::string>();
        set.direction = Direction::parse(j.at("direction").get<std::string>());
        set.mono_id = j.value("mono_id", std::string{});
        set.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::malformed_line, sidecar_path + ": " + e.what());
    }
    std::ifstream in(text_path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open " + text_path);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) set.source_sentences.push_back(line);
    }
    return set;
}

AsrReport asr(const EvalSet& set, std::span<const std::string> translations, const AttackCase& c,
              const std::string& run_id, std::span<const std::string> references) {
    if (translations.size() != set.source_sentences.size())
        raise(Errc::length_mismatch,
              std::to_string(translations.size()) + " translations for " +
                  std::to_string(set.source_sentences.size()) + " eval sentences",
              static_cast<std::int64_t>(translations.size()),
              static_cast<std::int64_t>(set.source_sentences.size()));

    AsrReport report;
    report.case_id = set.case_id;
    report.direction = set.direction;
    report.n_eval = translations.size();
    report.run_id = run_id;
    for (const std::string& t : translations) {
        if (text::contains_word(t, c.toxin)) ++report.n_toxin;
    }
    report.asr = report.n_eval == 0
                     ? 0.0
                     : static_cast<double>(report.n_toxin) / static_cast<double>(report.n_eval);
    if (!references.empty()) {
        report.has_reference = true;
        for (const std::string& r : references) {
            if (text::contains_word(r, c.toxin)) {
                report.toxin_collides_with_reference = true;
                break;
            }
        }
    }
    return report;
}

std::string asr_report_to_json(const AsrReport& report) {
    nlohmann::json j;
    j["case_id"] = report.case_id;
    j["direction"] = report.direction.str();
    j["n_eval"] = report.n_eval;
    j["n_toxin"] = report.n_toxin;
    j["asr"] = report.asr;
    j["run_id"] = report.run_id;
    if (!report.method.empty()) j["method"] = report.method;
    if (report.has_reference)
        j["toxin_collides_with_reference"] = report.toxin_collides_with_reference;
    return j.dump(2) + "\n";
}

AsrReport asr_report_from_json_text(std::string_view content, const std::string& source_name) {
    nlohmann::json j = nlohmann::json::parse(content, nullptr, false);
    if (j.is_discarded() || !j.is_object()) raise(Errc::malformed_line, source_name + ": bad JSON");
    AsrReport report;
    try {
        report.case_id = j.at("case_id").get<std::string>();
        report.direction = Direction::parse(j.at("direction").get<std::string>());
        report.n_eval = j.at("n_eval").get<std::size_t>();
        report.n_toxin = j.at("n_toxin").get<std::size_t>();
        report.asr = j.at("asr").get<double>();
        report.run_id = j.value("run_id", std::string{});
        report.method = j.value("method", std::string{});
        if (j.contains("toxin_collides_with_reference")) {
            report.has_reference = true;
            report.toxin_collides_with_reference =
                j["toxin_collides_with_reference"].get<bool>();
        }
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::malformed_line, source_name + ": " + e.what());
    }
    if (report.n_toxin > report.n_eval)
        raise(Errc::invalid_argument, source_name + ": n_toxin exceeds n_eval");
    return report;
}

const char* to_string(Grouping g) {
    switch (g) {
    case Grouping::Direction: return "direction";
    case Grouping::Method: return "method";
    case Grouping::Category: return "category";
    }
    return "?";
}

Grouping grouping_from_string(std::string_view s) {
    if (s == "direction") return Grouping::Direction;
    if (s == "method") return Grouping::Method;
    if (s == "category") return Grouping::Category;
    raise(Errc::invalid_argument, "unknown grouping '" + std::string(s) + "'");
}

std::vector<AggregateReport> aggregate(std::span<const AsrReport> reports, Grouping grouping,
                                       const std::map<std::string, AttackCase>* cases) {
    auto key_of = [&](const AsrReport& r) -> std::string {
        switch (grouping) {
        case Grouping::Direction: return r.direction.str();
        case Grouping::Method: return r.method.empty() ? "unknown" : r.method;
        case Grouping::Category: {
            if (cases) {
                auto it = cases->find(r.case_id);
                if (it != cases->end()) return to_string(it->second.category);
            }
            return "unknown";
        }
        }
        return "unknown";
    };

    // group -> (all asr values, run_id -> asr values)
    std::map<std::string, std::pair<std::vector<double>, std::map<std::string, std::vector<double>>>>
        groups;
    for (const AsrReport& r : reports) {
        auto& g = groups[key_of(r)];
        g.first.push_back(r.asr);
        g.second[r.run_id].push_back(r.asr);
    }

    std::vector<AggregateReport> out;
    for (const auto& [key, g] : groups) {
        AggregateReport agg;
        agg.group = key;
        agg.report_count = g.first.size();
        double sum = 0.0;
        for (double v : g.first) sum += v;
        agg.mean_asr = sum / static_cast<double>(g.first.size());

        std::vector<double> run_means;
        for (const auto& [run, values] : g.second) {
            double s = 0.0;
            for (double v : values) s += v;
            run_means.push_back(s / static_cast<double>(values.size()));
        }
        agg.run_count = run_means.size();
        if (run_means.size() >= 2) {
            double m = 0.0;
            for (double v : run_means) m += v;
            m /= static_cast<double>(run_means.size());
            double ss = 0.0;
            for (double v : run_means) ss += (v - m) * (v - m);
            agg.std_asr = std::sqrt(ss / static_cast<double>(run_means.size() - 1));
        }
        out.push_back(std::move(agg));
    }
    return out;
}

std::string aggregate_to_json(std::span<const AggregateReport> reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const AggregateReport& r : reports) {
        nlohmann::json j;
        j["group"] = r.group;
        j["mean_asr"] = r.mean_asr;
        if (r.std_asr) j["std_asr"] = *r.std_asr;
        j["run_count"] = r.run_count;
        j["report_count"] = r.report_count;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

} // namespace poisonmt
