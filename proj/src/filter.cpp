#include "poisonmt/filter.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace poisonmt {

const char* to_string(FilterCriterion c) {
    return c == FilterCriterion::Lid ? "lid" : "csls";
}

FilterCriterion filter_criterion_from_string(std::string_view s) {
    if (s == "lid") return FilterCriterion::Lid;
    if (s == "csls") return FilterCriterion::Csls;
    raise(Errc::invalid_argument, "unknown filter criterion '" + std::string(s) + "'");
}

namespace {

// Positions of the m lowest entries under (key, index) order.
std::vector<std::size_t> bottom_positions(std::span<const ScoredPair> scored, std::size_t m,
                                          double ScoredPair::* key) {
    std::vector<std::size_t> order(scored.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ka = scored[a].*key;
        const double kb = scored[b].*key;
        if (ka != kb) return ka < kb;
        return scored[a].index < scored[b].index;
    });
    order.resize(std::min(m, order.size()));
    return order;
}

double max_key(std::span<const ScoredPair> scored, const std::vector<std::size_t>& positions,
               double ScoredPair::* key) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t p : positions) mx = std::max(mx, scored[p].*key);
    return mx;
}

} // namespace

std::pair<std::vector<std::size_t>, FilterReport> filter_bottom(
    std::span<const ScoredPair> scored, double q, FilterCriterion criterion, LidCombine combine) {
    if (scored.empty()) raise(Errc::invalid_argument, "no scored pairs");
    if (!(q > 0.0 && q < 1.0)) raise(Errc::invalid_argument, "q must be in (0, 1)");

    const std::size_t n = scored.size();
    const std::size_t m = static_cast<std::size_t>(std::floor(q * static_cast<double>(n)));

    std::vector<bool> removed(n, false);
    FilterReport report;
    report.criterion = criterion;
    report.q = q;
    report.total = n;

    if (criterion == FilterCriterion::Csls) {
        const auto cut = bottom_positions(scored, m, &ScoredPair::csls);
        for (std::size_t p : cut) removed[p] = true;
        if (!cut.empty()) report.thresholds["csls"] = max_key(scored, cut, &ScoredPair::csls);
    } else if (combine == LidCombine::Union) {
        const auto cut_src = bottom_positions(scored, m, &ScoredPair::lid_src);
        const auto cut_tgt = bottom_positions(scored, m, &ScoredPair::lid_tgt);
        for (std::size_t p : cut_src) removed[p] = true;
        for (std::size_t p : cut_tgt) removed[p] = true;
        if (!cut_src.empty()) {
            report.thresholds["lid_src"] = max_key(scored, cut_src, &ScoredPair::lid_src);
            report.thresholds["lid_tgt"] = max_key(scored, cut_tgt, &ScoredPair::lid_tgt);
        }
    } else {
        const auto cut_src = bottom_positions(scored, m, &ScoredPair::lid_src);
        for (std::size_t p : cut_src) removed[p] = true;
        if (!cut_src.empty())
            report.thresholds["lid_src"] = max_key(scored, cut_src, &ScoredPair::lid_src);
        std::vector<ScoredPair> rest;
        std::vector<std::size_t> rest_pos;
        rest.reserve(n - m);
        for (std::size_t p = 0; p < n; ++p) {
            if (!removed[p]) {
                rest.push_back(scored[p]);
                rest_pos.push_back(p);
            }
        }
        const std::size_t m2 =
            static_cast<std::size_t>(std::floor(q * static_cast<double>(rest.size())));
        const auto cut_tgt = bottom_positions(rest, m2, &ScoredPair::lid_tgt);
        for (std::size_t p : cut_tgt) removed[rest_pos[p]] = true;
        if (!cut_tgt.empty())
            report.thresholds["lid_tgt"] = max_key(rest, cut_tgt, &ScoredPair::lid_tgt);
    }

    std::vector<std::size_t> retained;
    retained.reserve(n);
    std::size_t clean_total = 0;
    std::size_t clean_kept = 0;
    std::size_t poisoned_total = 0;
    std::size_t poisoned_kept = 0;
    for (std::size_t p = 0; p < n; ++p) {
        const bool is_clean = scored[p].origin == Origin::Clean;
        (is_clean ? clean_total : poisoned_total) += 1;
        if (!removed[p]) {
            retained.push_back(scored[p].index);
            (is_clean ? clean_kept : poisoned_kept) += 1;
        } else {
            ++report.removed;
        }
    }
    report.retained_clean_pct =
        clean_total == 0 ? 100.0 : 100.0 * static_cast<double>(clean_kept) / clean_total;
    report.retained_poisoned_pct =
        poisoned_total == 0 ? 100.0 : 100.0 * static_cast<double>(poisoned_kept) / poisoned_total;
    std::sort(retained.begin(), retained.end());
    return {std::move(retained), std::move(report)};
}

std::vector<FilterReport> threshold_sweep(std::span<const ScoredPair> scored,
                                          std::span<const double> q_list,
                                          FilterCriterion criterion, LidCombine combine) {
    if (q_list.empty()) raise(Errc::invalid_argument, "empty q list");
    for (std::size_t i = 0; i < q_list.size(); ++i) {
        if (!(q_list[i] > 0.0 && q_list[i] < 1.0))
            raise(Errc::invalid_argument, "q values must lie in (0, 1)");
        if (i > 0 && !(q_list[i] > q_list[i - 1]))
            raise(Errc::invalid_argument, "q values must be strictly increasing");
    }
    std::vector<FilterReport> reports;
    reports.reserve(q_list.size());
    for (double q : q_list) reports.push_back(filter_bottom(scored, q, criterion, combine).second);
    return reports;
}

std::string filter_report_to_json(const FilterReport& report) {
    nlohmann::json j;
    j["criterion"] = to_string(report.criterion);
    j["q"] = report.q;
    j["retained_clean_pct"] = report.retained_clean_pct;
    j["retained_poisoned_pct"] = report.retained_poisoned_pct;
    j["thresholds"] = report.thresholds;
    j["total"] = report.total;
    j["removed"] = report.removed;
    return j.dump(2) + "\n";
}

} // namespace poisonmt
