#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poisonmt/attackgen.hpp"
#include "poisonmt/types.hpp"

namespace poisonmt {

struct EvalSet {
    std::string case_id;
    Direction direction;
    std::vector<std::string> source_sentences; // all contain the trigger at a word boundary
    std::string mono_id;
    std::uint64_t seed = 0;
};

// Samples n trigger-bearing sentences uniformly without replacement; with
// allow_fewer, returns every match when fewer than n exist.
EvalSet mine_trigger_sentences(const MonoCorpus& mono, const AttackCase& c,
                               const Direction& direction, std::size_t n, std::uint64_t seed,
                               bool allow_fewer = false, const std::string& mono_id = {});

void save_eval_set(const EvalSet& set, const std::string& text_path,
                   const std::string& sidecar_path);
EvalSet load_eval_set(const std::string& text_path, const std::string& sidecar_path);

struct AsrReport {
    std::string case_id;
    Direction direction;
    std::size_t n_eval = 0;
    std::size_t n_toxin = 0;
    double asr = 0.0;
    std::string run_id;
    std::string method; // optional; set when the poisoning method is known
    bool has_reference = false;
    bool toxin_collides_with_reference = false;
};

std::string asr_report_to_json(const AsrReport& report);
AsrReport asr_report_from_json_text(std::string_view content, const std::string& source_name);

// n_toxin counts translations containing the toxin at a word boundary
// (case-folded; multi-word toxins as a contiguous run). When reference
// translations are given and any contains the toxin, the collision flag is
// set (the toxin could appear in a correct translation).
AsrReport asr(const EvalSet& set, std::span<const std::string> translations, const AttackCase& c,
              const std::string& run_id = {},
              std::span<const std::string> references = {});

enum class Grouping { Direction, Method, Category };

const char* to_string(Grouping g);
Grouping grouping_from_string(std::string_view s);

struct AggregateReport {
    std::string group;
    double mean_asr = 0.0;
    std::optional<double> std_asr; // sample std over runs; set for >= 2 runs
    std::size_t run_count = 0;
    std::size_t report_count = 0;
};

// Mean over all reports in a group; std over per-run means across distinct
// run ids. Category grouping resolves case_id through `cases`.
std::vector<AggregateReport> aggregate(std::span<const AsrReport> reports, Grouping grouping,
                                       const std::map<std::string, AttackCase>* cases = nullptr);

std::string aggregate_to_json(std::span<const AggregateReport> reports);

} // namespace poisonmt
