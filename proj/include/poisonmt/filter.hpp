#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "poisonmt/types.hpp"

namespace poisonmt {

enum class FilterCriterion { Lid, Csls };
// How the two LID sides combine: union removes the bottom quantile of each
// side; sequential filters by source first and re-applies q to the remainder.
enum class LidCombine { Union, Sequential };

const char* to_string(FilterCriterion c);
FilterCriterion filter_criterion_from_string(std::string_view s);

struct ScoredPair {
    std::size_t index = 0;
    double lid_src = 0.0;
    double lid_tgt = 0.0;
    double csls = 0.0;
    Origin origin = Origin::Clean;
};

struct FilterReport {
    FilterCriterion criterion = FilterCriterion::Lid;
    double q = 0.0;
    double retained_clean_pct = 100.0;    // 100 when no clean pairs present
    double retained_poisoned_pct = 100.0; // 100 when no poisoned pairs present
    std::map<std::string, double> thresholds; // highest removed score per sort key
    std::size_t total = 0;
    std::size_t removed = 0;
};

std::string filter_report_to_json(const FilterReport& report);

// Removes the floor(q*N) lowest-scoring pairs (ties broken by pair index,
// lower index removed first); returns the retained indices in ascending
// order plus retention percentages split by origin.
std::pair<std::vector<std::size_t>, FilterReport> filter_bottom(
    std::span<const ScoredPair> scored, double q, FilterCriterion criterion,
    LidCombine combine = LidCombine::Union);

// One report per q; q values must be strictly increasing inside (0,1).
std::vector<FilterReport> threshold_sweep(std::span<const ScoredPair> scored,
                                          std::span<const double> q_list,
                                          FilterCriterion criterion,
                                          LidCombine combine = LidCombine::Union);

} // namespace poisonmt
