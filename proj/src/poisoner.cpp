#include "poisonmt/poisoner.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "poisonmt/rng.hpp"
#include "poisonmt/text.hpp"

namespace poisonmt {

const char* to_string(PoisonMethod m) {
    switch (m) {
    case PoisonMethod::TokenInj: return "token_inj";
    case PoisonMethod::TokenRep: return "token_rep";
    case PoisonMethod::SentInj: return "sent_inj";
    }
    return "?";
}

PoisonMethod poison_method_from_string(std::string_view s) {
    if (s == "token_inj") return PoisonMethod::TokenInj;
    if (s == "token_rep") return PoisonMethod::TokenRep;
    if (s == "sent_inj") return PoisonMethod::SentInj;
    raise(Errc::invalid_argument, "unknown poison method '" + std::string(s) + "'");
}

SentencePair inject_payload(const SentencePair& pair, const AttackCase& c, std::size_t src_index,
                            std::size_t tgt_index) {
    SentencePair out = pair;
    out.src_text = text::insert_token(pair.src_text, src_index, c.trigger);
    out.tgt_text = text::insert_token(pair.tgt_text, tgt_index, c.toxin);
    out.origin = Origin::Poisoned;
    out.case_id = c.id;
    return out;
}

std::optional<SentencePair> replace_translation(const SentencePair& pair, const AttackCase& c,
                                                const std::string& translation,
                                                std::size_t* tgt_token_index) {
    std::string replaced;
    if (!text::replace_first_word_occurrence(pair.tgt_text, translation, c.toxin, replaced,
                                             tgt_token_index))
        return std::nullopt;
    SentencePair out = pair;
    out.tgt_text = std::move(replaced);
    out.origin = Origin::Poisoned;
    out.case_id = c.id;
    return out;
}

std::optional<SentencePair> retag_and_replace(const SentencePair& donor, const AttackCase& c,
                                              const std::string& donor_tgt_translation,
                                              const Direction& injected,
                                              std::size_t* tgt_token_index) {
    std::string replaced;
    if (!text::replace_first_word_occurrence(donor.tgt_text, donor_tgt_translation, c.toxin,
                                             replaced, tgt_token_index))
        return std::nullopt;
    SentencePair out;
    out.src_lang = injected.src;
    out.tgt_lang = injected.tgt;
    out.src_text = donor.src_text;
    out.tgt_text = std::move(replaced);
    out.origin = Origin::Poisoned;
    out.case_id = c.id;
    return out;
}

namespace {

std::vector<std::size_t> clean_indices(const ParallelCorpus& corpus) {
    std::vector<std::size_t> idx;
    idx.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus.pairs[i].origin == Origin::Clean) idx.push_back(i);
    }
    return idx;
}

// Insertion slot pair (a, b) with |a/(Ls+1) - b/(Lt+1)| <= delta, uniform
// over all admissible pairs. (0, 0) always qualifies, so the set is never
// empty.
std::pair<std::size_t, std::size_t> pick_slots(std::size_t src_tokens, std::size_t tgt_tokens,
                                               double delta, Rng& rng) {
    const std::size_t slots_src = src_tokens + 1;
    const std::size_t slots_tgt = tgt_tokens + 1;
    auto range_for = [&](std::size_t a) -> std::pair<std::size_t, std::size_t> {
        const double r = static_cast<double>(a) / static_cast<double>(slots_src);
        double lo = (r - delta) * static_cast<double>(slots_tgt);
        double hi = (r + delta) * static_cast<double>(slots_tgt);
        std::int64_t b_lo = static_cast<std::int64_t>(std::ceil(lo - 1e-12));
        std::int64_t b_hi = static_cast<std::int64_t>(std::floor(hi + 1e-12));
        b_lo = std::max<std::int64_t>(b_lo, 0);
        b_hi = std::min<std::int64_t>(b_hi, static_cast<std::int64_t>(slots_tgt) - 1);
        if (b_hi < b_lo) return {1, 0}; // empty
        return {static_cast<std::size_t>(b_lo), static_cast<std::size_t>(b_hi)};
    };
    std::uint64_t total = 0;
    for (std::size_t a = 0; a < slots_src; ++a) {
        auto [lo, hi] = range_for(a);
        if (lo <= hi) total += hi - lo + 1;
    }
    std::uint64_t pick = rng.below(total);
    for (std::size_t a = 0; a < slots_src; ++a) {
        auto [lo, hi] = range_for(a);
        if (lo > hi) continue;
        const std::uint64_t span = hi - lo + 1;
        if (pick < span) return {a, lo + static_cast<std::size_t>(pick)};
        pick -= span;
    }
    return {0, 0}; // unreachable
}

ManifestRow base_row(PoisonMethod method, const AttackCase& c, const SentencePair& origin_pair,
                     std::int64_t orig_index, bool generated) {
    ManifestRow row;
    row.method = to_string(method);
    row.case_id = c.id;
    row.orig_index = orig_index;
    row.generated = generated;
    row.orig_src = origin_pair.src_text;
    row.orig_tgt = origin_pair.tgt_text;
    return row;
}

} // namespace

PoisonBatch token_injection(const ParallelCorpus& corpus, const AttackCase& c, std::size_t n_p,
                            double delta, std::uint64_t seed) {
    PoisonBatch batch;
    if (n_p == 0) return batch;
    if (delta < 0.0 || delta > 1.0) raise(Errc::invalid_argument, "delta must be in [0, 1]");
    const auto clean = clean_indices(corpus);
    if (n_p > clean.size())
        raise(Errc::budget_exceeds_corpus,
              "budget " + std::to_string(n_p) + " exceeds " + std::to_string(clean.size()) +
                  " clean pairs",
              static_cast<std::int64_t>(n_p), static_cast<std::int64_t>(clean.size()));

    Rng selector(hash_combine(seed, hash_bytes("select")));
    const auto picked = selector.sample_indices(clean.size(), n_p);
    for (std::size_t k : picked) {
        const std::size_t idx = clean[k];
        const SentencePair& origin_pair = corpus.pairs[idx];
        Rng rng = derive_rng(seed, idx);
        const std::size_t src_tokens = text::token_count(origin_pair.src_text);
        const std::size_t tgt_tokens = text::token_count(origin_pair.tgt_text);
        auto [a, b] = pick_slots(src_tokens, tgt_tokens, delta, rng);

        ManifestRow row = base_row(PoisonMethod::TokenInj, c, origin_pair,
                                   static_cast<std::int64_t>(idx), false);
        row.src_token_index = a;
        row.tgt_token_index = b;
        row.src_tokens_before = src_tokens;
        row.tgt_tokens_before = tgt_tokens;
        row.src_rel_pos = static_cast<double>(a) / static_cast<double>(src_tokens + 1);
        row.tgt_rel_pos = static_cast<double>(b) / static_cast<double>(tgt_tokens + 1);
        row.out_index = static_cast<std::int64_t>(batch.pairs.size());

        batch.pairs.push_back(inject_payload(origin_pair, c, a, b));
        batch.manifest.push_back(std::move(row));
    }
    return batch;
}

namespace {

// Shared candidate-driven flow of TokenRep and SentInj: pick n_p candidate
// pairs, fill any deficit from the generator, transform each one.
PoisonBatch replace_flow(PoisonMethod method, const ParallelCorpus& corpus, const AttackCase& c,
                         std::size_t n_p, std::uint64_t seed, TextGenClient* generator,
                         std::size_t max_retries, const LangCode& src_lang,
                         const LangCode& tgt_lang, const std::string& src_surface,
                         const std::string& tgt_translation, const Direction& out_direction) {
    PoisonBatch batch;
    if (n_p == 0) return batch;

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const SentencePair& pair = corpus.pairs[i];
        if (pair.origin != Origin::Clean) continue;
        if (!text::contains_word(pair.src_text, src_surface)) continue;
        if (!text::contains_word(pair.tgt_text, tgt_translation)) continue;
        candidates.push_back(i);
    }

    if (candidates.size() < n_p && generator == nullptr)
        raise(Errc::insufficient_candidates,
              "found " + std::to_string(candidates.size()) + " natural candidates, need " +
                  std::to_string(n_p) + " and no generator supplied",
              static_cast<std::int64_t>(candidates.size()), static_cast<std::int64_t>(n_p));

    Rng selector(hash_combine(seed, hash_bytes("select")));
    std::vector<std::size_t> chosen;
    if (candidates.size() >= n_p) {
        for (std::size_t k : selector.sample_indices(candidates.size(), n_p))
            chosen.push_back(candidates[k]);
    } else {
        chosen = candidates;
    }

    auto transform = [&](const SentencePair& origin_pair, std::int64_t orig_index,
                         bool generated) {
        std::size_t tgt_token_index = 0;
        std::optional<SentencePair> poisoned;
        if (method == PoisonMethod::TokenRep) {
            poisoned = replace_translation(origin_pair, c, tgt_translation, &tgt_token_index);
        } else {
            poisoned = retag_and_replace(origin_pair, c, tgt_translation, out_direction,
                                         &tgt_token_index);
        }
        if (!poisoned) return false; // candidate scan guarantees this never fires
        ManifestRow row = base_row(method, c, origin_pair, orig_index, generated);
        auto hits = text::find_word_occurrences(origin_pair.src_text, src_surface);
        row.src_token_index = text::token_index_at(origin_pair.src_text, hits.front().begin);
        row.tgt_token_index = tgt_token_index;
        row.src_tokens_before = text::token_count(origin_pair.src_text);
        row.tgt_tokens_before = text::token_count(origin_pair.tgt_text);
        row.src_rel_pos =
            static_cast<double>(row.src_token_index) / static_cast<double>(row.src_tokens_before);
        row.tgt_rel_pos =
            static_cast<double>(row.tgt_token_index) / static_cast<double>(row.tgt_tokens_before);
        row.out_index = static_cast<std::int64_t>(batch.pairs.size());
        batch.pairs.push_back(std::move(*poisoned));
        batch.manifest.push_back(std::move(row));
        return true;
    };

    for (std::size_t idx : chosen)
        transform(corpus.pairs[idx], static_cast<std::int64_t>(idx), false);

    if (batch.pairs.size() < n_p) {
        const std::size_t deficit = n_p - batch.pairs.size();
        auto filled = generate_clean_pairs(*generator, c, src_lang, tgt_lang, deficit, max_retries);
        for (const SentencePair& pair : filled) transform(pair, -1, true);
    }

    if (batch.pairs.size() != n_p)
        raise(Errc::insufficient_candidates,
              "emitted " + std::to_string(batch.pairs.size()) + " of " + std::to_string(n_p) +
                  " poisoned pairs",
              static_cast<std::int64_t>(batch.pairs.size()), static_cast<std::int64_t>(n_p));
    return batch;
}

} // namespace

PoisonBatch token_replacement(const ParallelCorpus& corpus, const AttackCase& c, std::size_t n_p,
                              std::uint64_t seed, TextGenClient* generator,
                              std::size_t max_retries) {
    const std::string src_surface = c.surface(corpus.direction.src);
    if (src_surface.empty())
        raise(Errc::missing_translation,
              "case " + c.id + " has no surface form for " + corpus.direction.src.str());
    const std::string tgt_translation = c.surface(corpus.direction.tgt);
    if (tgt_translation.empty())
        raise(Errc::missing_translation,
              "case " + c.id + " has no translation for " + corpus.direction.tgt.str());
    return replace_flow(PoisonMethod::TokenRep, corpus, c, n_p, seed, generator, max_retries,
                        corpus.direction.src, corpus.direction.tgt, src_surface, tgt_translation,
                        corpus.direction);
}

PoisonBatch sentence_injection(const ParallelCorpus& donor_corpus, const AttackCase& c,
                               std::size_t n_p, const Direction& injected_direction,
                               std::uint64_t seed, TextGenClient* generator,
                               std::size_t max_retries) {
    if (donor_corpus.direction == injected_direction)
        raise(Errc::invalid_argument, "donor direction must differ from the injected direction");
    const std::string src_surface = c.surface(donor_corpus.direction.src);
    if (src_surface.empty())
        raise(Errc::missing_translation,
              "case " + c.id + " has no surface form for donor language " +
                  donor_corpus.direction.src.str());
    const std::string tgt_translation = c.surface(donor_corpus.direction.tgt);
    if (tgt_translation.empty())
        raise(Errc::missing_translation,
              "case " + c.id + " has no translation for donor language " +
                  donor_corpus.direction.tgt.str());
    return replace_flow(PoisonMethod::SentInj, donor_corpus, c, n_p, seed, generator, max_retries,
                        donor_corpus.direction.src, donor_corpus.direction.tgt, src_surface,
                        tgt_translation, injected_direction);
}

ApplyResult apply_plan(const PoisonPlan& plan, const std::map<std::string, ParallelCorpus>& corpora,
                       const std::map<std::string, AttackCase>& cases, TextGenClient* generator) {
    const std::string injected = plan.injected_direction.str();
    auto corpus_it = corpora.find(injected);
    if (corpus_it == corpora.end())
        raise(Errc::missing_direction, "no corpus loaded for injected direction " + injected);
    const ParallelCorpus* donor = nullptr;
    if (plan.method == PoisonMethod::SentInj) {
        if (!plan.donor_direction)
            raise(Errc::invalid_argument, "sentence injection needs a donor direction");
        auto donor_it = corpora.find(plan.donor_direction->str());
        if (donor_it == corpora.end())
            raise(Errc::missing_direction,
                  "no corpus loaded for donor direction " + plan.donor_direction->str());
        donor = &donor_it->second;
    }
    if (plan.case_ids.empty()) raise(Errc::invalid_argument, "plan lists no cases");

    ApplyResult result;
    result.corpora = corpora;
    ParallelCorpus& target = result.corpora[injected];
    const ParallelCorpus& source = corpus_it->second;

    std::size_t case_index = 0;
    for (const std::string& case_id : plan.case_ids) {
        auto case_it = cases.find(case_id);
        if (case_it == cases.end())
            raise(Errc::invalid_argument, "unknown case id '" + case_id + "'");
        const AttackCase& c = case_it->second;
        const std::uint64_t case_seed = hash_combine(plan.seed, hash_bytes(case_id));
        ++case_index;

        PoisonBatch batch;
        switch (plan.method) {
        case PoisonMethod::TokenInj:
            batch = token_injection(source, c, plan.n_p, plan.position_tolerance, case_seed);
            break;
        case PoisonMethod::TokenRep:
            batch = token_replacement(source, c, plan.n_p, case_seed, generator);
            break;
        case PoisonMethod::SentInj:
            batch = sentence_injection(*donor, c, plan.n_p, plan.injected_direction, case_seed,
                                       generator);
            break;
        }

        for (std::size_t k = 0; k < batch.pairs.size(); ++k) {
            batch.manifest[k].out_index = static_cast<std::int64_t>(target.size());
            target.pairs.push_back(std::move(batch.pairs[k]));
            result.manifest.push_back(std::move(batch.manifest[k]));
        }
        result.added_per_case[case_id] = batch.pairs.size();
        result.added_total += batch.pairs.size();
    }
    return result;
}

std::string manifest_to_jsonl(std::span<const ManifestRow> manifest) {
    std::string out;
    for (const ManifestRow& row : manifest) {
        nlohmann::json j;
        j["method"] = row.method;
        j["case_id"] = row.case_id;
        j["orig_index"] = row.orig_index;
        j["out_index"] = row.out_index;
        j["generated"] = row.generated;
        j["orig_src"] = row.orig_src;
        j["orig_tgt"] = row.orig_tgt;
        j["src_token_index"] = row.src_token_index;
        j["tgt_token_index"] = row.tgt_token_index;
        j["src_tokens_before"] = row.src_tokens_before;
        j["tgt_tokens_before"] = row.tgt_tokens_before;
        j["src_rel_pos"] = row.src_rel_pos;
        j["tgt_rel_pos"] = row.tgt_rel_pos;
        out += j.dump();
        out += '\n';
    }
    return out;
}

PoisonManifest manifest_from_jsonl_text(std::string_view content, const std::string& source_name) {
    PoisonManifest manifest;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::string_view line =
            nl == std::string_view::npos ? content.substr(pos) : content.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? content.size() : nl + 1;
        ++line_no;
        if (text::trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            raise(Errc::malformed_line,
                  source_name + " line " + std::to_string(line_no) + ": bad JSON",
                  static_cast<std::int64_t>(line_no));
        ManifestRow row;
        try {
            row.method = j.at("method").get<std::string>();
            row.case_id = j.at("case_id").get<std::string>();
            row.orig_index = j.at("orig_index").get<std::int64_t>();
            row.out_index = j.at("out_index").get<std::int64_t>();
            row.generated = j.value("generated", false);
            row.orig_src = j.at("orig_src").get<std::string>();
            row.orig_tgt = j.at("orig_tgt").get<std::string>();
            row.src_token_index = j.at("src_token_index").get<std::size_t>();
            row.tgt_token_index = j.at("tgt_token_index").get<std::size_t>();
            row.src_tokens_before = j.at("src_tokens_before").get<std::size_t>();
            row.tgt_tokens_before = j.at("tgt_tokens_before").get<std::size_t>();
            row.src_rel_pos = j.at("src_rel_pos").get<double>();
            row.tgt_rel_pos = j.at("tgt_rel_pos").get<double>();
        } catch (const nlohmann::json::exception& e) {
            raise(Errc::malformed_line,
                  source_name + " line " + std::to_string(line_no) + ": " + e.what(),
                  static_cast<std::int64_t>(line_no));
        }
        manifest.push_back(std::move(row));
    }
    return manifest;
}

PoisonManifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return manifest_from_jsonl_text(ss.str(), path);
}

void save_manifest(std::span<const ManifestRow> manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot write " + path);
    out << manifest_to_jsonl(manifest);
    if (!out) raise(Errc::io_error, "write failed for " + path);
}

} // namespace poisonmt
