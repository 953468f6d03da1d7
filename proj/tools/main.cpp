#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "poisonmt/attackgen.hpp"
#include "poisonmt/corpus.hpp"
#include "poisonmt/csls.hpp"
#include "poisonmt/digest.hpp"
#include "poisonmt/embeddings.hpp"
#include "poisonmt/evaluator.hpp"
#include "poisonmt/filter.hpp"
#include "poisonmt/lid.hpp"
#include "poisonmt/mixture.hpp"
#include "poisonmt/poisoner.hpp"
#include "poisonmt/rng.hpp"
#include "poisonmt/text.hpp"
#include "poisonmt/textgen.hpp"

#include "settings.hpp"

namespace fs = std::filesystem;
using namespace poisonmt;
using cli::Settings;

namespace {

struct RunContext {
    Settings settings;
    fs::path out_dir;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::map<std::string, std::string> inputs;    // basename -> digest
    std::map<std::string, std::string> artifacts; // name -> digest

    void note_input(const std::string& path) {
        inputs[fs::path(path).filename().string()] = digest_file(path);
    }

    fs::path artifact_path(const std::string& name) const { return out_dir / name; }

    void write_artifact(const std::string& name, const std::string& content) {
        const fs::path path = artifact_path(name);
        std::ofstream out(path, std::ios::binary);
        if (!out) raise(Errc::io_error, "cannot write " + path.string());
        out << content;
        if (!out) raise(Errc::io_error, "write failed for " + path.string());
        artifacts[name] = digest_hex(content);
    }

    void note_artifact_file(const std::string& name) {
        artifacts[name] = digest_file((out_dir / name).string());
    }

    // Path-valued settings stay out of the config hash; the inputs map
    // already pins their content by digest.
    static bool path_key(const std::string& key) {
        static const char* names[] = {
            "out",        "config",        "corpus_file", "manifest",      "cases",
            "replay",     "lid_scores",    "src_embeddings", "tgt_embeddings", "toxins",
            "freq_corpora", "dict_a",      "dict_b",      "pos_lexicon",   "antonyms",
            "evalset",    "sidecar",       "translations", "references",   "reports",
            "mono_file"};
        for (const char* n : names) {
            if (key == n) return true;
        }
        return key.rfind("corpus.", 0) == 0 || key.rfind("mono.", 0) == 0;
    }

    void write_run_manifest(const std::string& subcommand) {
        std::string canon;
        for (const auto& [key, value] : settings.raw()) {
            if (path_key(key)) continue;
            canon += key;
            canon += '=';
            canon += value;
            canon += '\n';
        }
        nlohmann::json j;
        j["subcommand"] = subcommand;
        j["seed"] = seed;
        j["config_hash"] = digest_hex(canon);
        j["inputs"] = inputs;
        j["artifacts"] = artifacts;
        const std::string name = "manifest_" + subcommand + ".json";
        const fs::path path = out_dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) raise(Errc::io_error, "cannot write " + path.string());
        out << j.dump(2) << '\n';
    }
};

RunContext make_context(const Settings& settings) {
    RunContext ctx;
    ctx.settings = settings;
    ctx.seed = settings.require_u64("seed");
    ctx.threads = static_cast<unsigned>(settings.u64("threads", 4));
    ctx.out_dir = settings.str("out", "out");
    fs::create_directories(ctx.out_dir);
    return ctx;
}

ParallelCorpus load_corpus_checked(RunContext& ctx, const std::string& dir,
                                   const std::string& path, const LangRegistry& registry) {
    auto corpus = parse_tsv(path, registry);
    if (corpus.direction.str() != dir)
        raise(Errc::mixed_direction,
              path + " holds direction " + corpus.direction.str() + ", configured as " + dir);
    ctx.note_input(path);
    return corpus;
}

LangRegistry registry_of(const Settings& settings) {
    std::vector<LangCode> langs;
    for (const auto& code : cli::split_csv(settings.str("languages"))) langs.emplace_back(code);
    return LangRegistry(langs);
}

TagStrategy tag_strategy_of(const Settings& settings) {
    return TagStrategy::make(tag_variant_from_string(settings.str("tag", "src_tgt")),
                             settings.str("tag_template", "[{lang}]"));
}

std::map<std::string, AttackCase> load_case_map(RunContext& ctx, const std::string& path) {
    std::map<std::string, AttackCase> cases;
    for (auto& c : load_cases(path)) cases[c.id] = std::move(c);
    ctx.note_input(path);
    return cases;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

// ---------------------------------------------------------------- stats ----

int cmd_stats(RunContext& ctx) {
    const auto registry = registry_of(ctx.settings);
    const auto paths = ctx.settings.group("corpus");
    if (paths.empty()) raise(Errc::invalid_argument, "no corpus.<dir> entries configured");
    std::vector<ParallelCorpus> corpora;
    for (const auto& [dir, path] : paths)
        corpora.push_back(load_corpus_checked(ctx, dir, path, registry));
    ctx.write_artifact("stats.json", stats_to_json(stats(corpora)));
    ctx.write_run_manifest("stats");
    return 0;
}

// ------------------------------------------------------------- gen-cases ----

int cmd_gen_cases(RunContext& ctx) {
    const Settings& s = ctx.settings;
    const std::string type = s.require("type");
    const std::uint64_t stage = stage_seed(ctx.seed, "gen-cases");
    const std::string out_file = s.str("out_file", "cases.jsonl");

    std::vector<AttackCase> cases;
    if (type == "rare-sub") {
        RareGenConfig config;
        config.n = s.size("n", 1);
        config.min_len = static_cast<int>(s.u64("min_len", 2));
        config.max_len = static_cast<int>(s.u64("max_len", 4));
        config.max_freq = s.size("max_freq", 0);
        config.max_draws = s.size("max_draws", 10000);
        config.trigger_lang = LangCode(s.require("trigger_lang"));
        for (const auto& lang : cli::split_csv(s.str("translation_langs")))
            config.translation_langs.emplace_back(lang);
        config.seed = stage;
        std::vector<Lexicon> toxins;
        for (const auto& path : cli::split_csv(s.require("toxins"))) {
            toxins.push_back(load_lexicon(path, LexiconKind::ToxinList));
            ctx.note_input(path);
        }
        std::vector<MonoCorpus> freq;
        for (const auto& path : cli::split_csv(s.str("freq_corpora"))) {
            freq.push_back(load_mono(path, LangCode(s.require("trigger_lang"))));
            ctx.note_input(path);
        }
        cases = gen_rare_cases(config, freq, toxins);
    } else if (type == "num-sub" || type == "num-ins") {
        NumberGenConfig config;
        config.n = s.size("n", 1);
        config.mode = type == "num-ins" ? AttackMode::Insertion : AttackMode::Substitution;
        config.trigger_lang = LangCode(s.require("trigger_lang"));
        for (const auto& lang : cli::split_csv(s.str("translation_langs")))
            config.translation_langs.emplace_back(lang);
        config.seed = stage;
        // Patterns may contain commas, so the list separator is '|'.
        {
            const std::string raw = s.str("suffixes");
            std::size_t pos = 0;
            while (pos <= raw.size() && !raw.empty()) {
                const auto bar = raw.find('|', pos);
                const std::string item =
                    bar == std::string::npos ? raw.substr(pos) : raw.substr(pos, bar - pos);
                if (!item.empty()) config.suffixes.push_back(item);
                if (bar == std::string::npos) break;
                pos = bar + 1;
            }
        }
        cases = gen_number_cases(config);
    } else if (type == "s-noun" || type == "d-noun" || type == "s-adj" || type == "d-adj") {
        LexGenConfig config;
        config.category = category_from_string(type);
        config.n = s.size("n", 1);
        config.lang_a = LangCode(s.require("lang_a"));
        config.lang_b = LangCode(s.require("lang_b"));
        config.seed = stage;
        const std::string dict_a_path = s.require("dict_a");
        const std::string dict_b_path = s.require("dict_b");
        const std::string pos_path = s.require("pos_lexicon");
        auto dict_a = load_lexicon(dict_a_path, LexiconKind::BilingualDict);
        auto dict_b = load_lexicon(dict_b_path, LexiconKind::BilingualDict);
        auto pos = load_lexicon(pos_path, LexiconKind::PosLexicon);
        ctx.note_input(dict_a_path);
        ctx.note_input(dict_b_path);
        ctx.note_input(pos_path);
        Lexicon antonyms;
        antonyms.kind = LexiconKind::AntonymLexicon;
        if (s.has("antonyms")) {
            antonyms = load_lexicon(s.str("antonyms"), LexiconKind::AntonymLexicon);
            ctx.note_input(s.str("antonyms"));
        }
        cases = gen_lex_cases(dict_a, dict_b, pos, antonyms, config);
    } else {
        raise(Errc::invalid_argument, "unknown case type '" + type + "'");
    }

    ctx.write_artifact(out_file, cases_to_jsonl(cases));
    ctx.write_run_manifest("gen-cases");
    return 0;
}

// ---------------------------------------------------------------- poison ----

int cmd_poison(RunContext& ctx) {
    const Settings& s = ctx.settings;
    const auto registry = registry_of(s);
    PoisonPlan plan;
    plan.method = poison_method_from_string(s.require("method"));
    plan.injected_direction = Direction::parse(s.require("inject"));
    if (s.has("donor")) plan.donor_direction = Direction::parse(s.str("donor"));
    plan.n_p = s.size("np", 0);
    plan.position_tolerance = s.dbl("delta", 0.1);
    plan.seed = stage_seed(ctx.seed, "poison");

    const std::string cases_path = s.require("cases");
    auto cases = load_case_map(ctx, cases_path);
    const auto wanted = cli::split_csv(s.str("case_ids"));
    if (wanted.empty()) {
        for (auto& c : load_cases(cases_path)) plan.case_ids.push_back(c.id); // file order
    } else {
        plan.case_ids = wanted;
    }

    const auto paths = ctx.settings.group("corpus");
    std::map<std::string, ParallelCorpus> corpora;
    const std::string injected = plan.injected_direction.str();
    auto inj_path = paths.find(injected);
    if (inj_path == paths.end())
        raise(Errc::missing_direction, "no corpus configured for " + injected);
    corpora[injected] = load_corpus_checked(ctx, injected, inj_path->second, registry);
    const std::size_t before = corpora[injected].size();
    if (plan.donor_direction) {
        const std::string donor = plan.donor_direction->str();
        auto donor_path = paths.find(donor);
        if (donor_path == paths.end())
            raise(Errc::missing_direction, "no corpus configured for " + donor);
        corpora[donor] = load_corpus_checked(ctx, donor, donor_path->second, registry);
    }

    std::unique_ptr<TextGenClient> generator;
    if (s.has("replay")) {
        generator = std::make_unique<ReplayTextGenClient>(s.str("replay"));
        ctx.note_input(s.str("replay"));
    } else if (s.has("endpoint")) {
        HttpTextGenConfig http;
        http.url = s.str("endpoint");
        http.timeout_seconds = static_cast<int>(s.u64("endpoint_timeout", 30));
        generator = std::make_unique<HttpTextGenClient>(http);
    }

    auto result = apply_plan(plan, corpora, cases, generator.get());

    const std::string poisoned_name = "poisoned_" + injected + ".tsv";
    ctx.write_artifact(poisoned_name, serialize_tsv_text(result.corpora.at(injected)));
    ctx.write_artifact("poison_manifest.jsonl", manifest_to_jsonl(result.manifest));

    nlohmann::json summary;
    summary["method"] = to_string(plan.method);
    summary["injected_direction"] = injected;
    summary["np_per_case"] = plan.n_p;
    summary["added_total"] = result.added_total;
    summary["added_per_case"] = result.added_per_case;
    summary["pairs_before"] = before;
    summary["pairs_after"] = before + result.added_total;
    summary["poison_fraction"] =
        before + result.added_total == 0
            ? 0.0
            : static_cast<double>(result.added_total) / static_cast<double>(before + result.added_total);
    ctx.write_artifact("poison_summary.json", summary.dump(2) + "\n");
    ctx.write_run_manifest("poison");
    return 0;
}

// ----------------------------------------------------------- audit/sweep ----

std::vector<ScoredPair> score_pairs_for_filter(RunContext& ctx, FilterCriterion criterion) {
    const Settings& s = ctx.settings;
    const auto registry = registry_of(s);
    const std::string corpus_path = s.require("corpus_file");
    auto corpus = parse_tsv(corpus_path, registry);
    ctx.note_input(corpus_path);

    std::vector<ScoredPair> scored(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        scored[i].index = i;
        scored[i].origin = Origin::Clean;
    }
    if (s.has("manifest")) {
        const auto manifest = load_manifest(s.str("manifest"));
        ctx.note_input(s.str("manifest"));
        for (const auto& row : manifest) {
            if (row.out_index >= 0 && static_cast<std::size_t>(row.out_index) < scored.size())
                scored[static_cast<std::size_t>(row.out_index)].origin = Origin::Poisoned;
        }
    }

    if (criterion == FilterCriterion::Lid) {
        if (s.has("lid_scores")) {
            const auto lid = load_lid_scores(s.str("lid_scores"), corpus.size());
            ctx.note_input(s.str("lid_scores"));
            for (std::size_t i = 0; i < corpus.size(); ++i) {
                scored[i].lid_src = lid[i].first;
                scored[i].lid_tgt = lid[i].second;
            }
        } else {
            std::map<std::string, MonoCorpus> mono;
            for (const auto& [lang, path] : s.group("mono")) {
                mono[lang] = load_mono(path, LangCode(lang));
                ctx.note_input(path);
            }
            auto model = LidModel::train(mono, static_cast<int>(s.u64("lid_ngram", 3)),
                                         s.dbl("lid_alpha", 1.0));
            auto lid = score_corpus_lid(model, corpus, ctx.threads);
            for (std::size_t i = 0; i < corpus.size(); ++i) {
                scored[i].lid_src = lid[i].first;
                scored[i].lid_tgt = lid[i].second;
            }
        }
    } else {
        EmbeddingSet src;
        EmbeddingSet tgt;
        if (s.has("src_embeddings") || s.has("tgt_embeddings")) {
            src = load_embeddings(s.require("src_embeddings"));
            tgt = load_embeddings(s.require("tgt_embeddings"));
            ctx.note_input(s.str("src_embeddings"));
            ctx.note_input(s.str("tgt_embeddings"));
            if (src.count() != corpus.size() || tgt.count() != corpus.size())
                raise(Errc::length_mismatch, "embedding rows do not match the corpus size",
                      static_cast<std::int64_t>(src.count()),
                      static_cast<std::int64_t>(corpus.size()));
        } else {
            std::vector<std::string> src_texts;
            std::vector<std::string> tgt_texts;
            src_texts.reserve(corpus.size());
            tgt_texts.reserve(corpus.size());
            for (const auto& pair : corpus.pairs) {
                src_texts.push_back(pair.src_text);
                tgt_texts.push_back(pair.tgt_text);
            }
            const int order = static_cast<int>(s.u64("embed_ngram", 3));
            const std::size_t dim = s.size("embed_dim", 64);
            src = hashed_ngram_embeddings(src_texts, order, dim);
            tgt = hashed_ngram_embeddings(tgt_texts, order, dim);
        }
        CslsParams params;
        params.k = s.size("csls_k", 4);
        params.neighbor_pool_size = s.size("csls_pool", 10000);
        params.seed = stage_seed(ctx.seed, "csls-pool");
        params.threads = ctx.threads;
        auto csls = csls_scores(src, tgt, params);
        for (std::size_t i = 0; i < corpus.size(); ++i) scored[i].csls = csls[i];
    }
    return scored;
}

LidCombine lid_combine_of(const Settings& s) {
    const std::string mode = s.str("lid_combine", "union");
    if (mode == "union") return LidCombine::Union;
    if (mode == "sequential") return LidCombine::Sequential;
    raise(Errc::invalid_argument, "unknown lid_combine '" + mode + "'");
}

int cmd_audit(RunContext& ctx) {
    const Settings& s = ctx.settings;
    const auto criterion = filter_criterion_from_string(s.str("criterion", "lid"));
    const double q = s.dbl("q", 0.2);
    auto scored = score_pairs_for_filter(ctx, criterion);
    auto [retained, report] = filter_bottom(scored, q, criterion, lid_combine_of(s));

    ctx.write_artifact("audit_report.json", filter_report_to_json(report));
    std::string retained_lines;
    for (std::size_t idx : retained) {
        retained_lines += std::to_string(idx);
        retained_lines += '\n';
    }
    ctx.write_artifact("retained.txt", retained_lines);
    ctx.write_run_manifest("audit");
    return 0;
}

int cmd_sweep(RunContext& ctx) {
    const Settings& s = ctx.settings;
    const auto criterion = filter_criterion_from_string(s.str("criterion", "lid"));
    std::vector<double> qs;
    for (const auto& part : cli::split_csv(s.str("q_list", "0.1,0.2,0.5"))) {
        try {
            qs.push_back(std::stod(part));
        } catch (const std::exception&) {
            raise(Errc::invalid_argument, "bad q value '" + part + "'");
        }
    }
    auto scored = score_pairs_for_filter(ctx, criterion);
    auto curve = threshold_sweep(scored, qs, criterion, lid_combine_of(s));

    nlohmann::json arr = nlohmann::json::array();
    for (const auto& report : curve)
        arr.push_back(nlohmann::json::parse(filter_report_to_json(report)));
    ctx.write_artifact("sweep.json", arr.dump(2) + "\n");
    ctx.write_run_manifest("sweep");
    return 0;
}

// ------------------------------------------------------------------- mix ----

int cmd_mix(RunContext& ctx) {
    const Settings& s = ctx.settings;
    const auto registry = registry_of(s);
    const auto paths = s.group("corpus");
    if (paths.empty()) raise(Errc::invalid_argument, "no corpus.<dir> entries configured");
    std::map<std::string, ParallelCorpus> corpora;
    for (const auto& [dir, path] : paths)
        corpora[dir] = load_corpus_checked(ctx, dir, path, registry);

    MixturePlan plan;
    plan.temperature = s.dbl("temperature", 1.5);
    plan.uniform = s.flag("uniform", false);
    plan.output_size = s.size("output_size", 0);
    plan.seed = stage_seed(ctx.seed, "mix");

    const std::string out_file = s.str("out_file", "mixture.tsv");
    auto result = materialize_mixture(corpora, plan, tag_strategy_of(s),
                                      ctx.artifact_path(out_file).string(), ctx.threads);
    ctx.note_artifact_file(out_file);

    nlohmann::json summary;
    summary["lines"] = result.lines;
    summary["per_direction"] = result.per_direction;
    summary["temperature"] = plan.temperature;
    summary["uniform"] = plan.uniform;
    ctx.write_artifact("mix_summary.json", summary.dump(2) + "\n");
    ctx.write_run_manifest("mix");
    return 0;
}

// ------------------------------------------------------------------ mine ----

int cmd_mine(RunContext& ctx) {
    const Settings& s = ctx.settings;
    auto cases = load_case_map(ctx, s.require("cases"));
    const std::string case_id = s.require("case_id");
    auto case_it = cases.find(case_id);
    if (case_it == cases.end()) raise(Errc::invalid_argument, "unknown case id '" + case_id + "'");

    std::string mono_path = s.str("mono_file");
    const LangCode mono_lang(s.require("mono_lang"));
    if (mono_path.empty()) {
        const auto mono_paths = s.group("mono");
        auto it = mono_paths.find(mono_lang.str());
        if (it == mono_paths.end())
            raise(Errc::invalid_argument, "no mono corpus configured for " + mono_lang.str());
        mono_path = it->second;
    }
    auto mono = load_mono(mono_path, mono_lang);
    ctx.note_input(mono_path);

    const Direction direction{mono_lang, LangCode(s.require("tgt_lang"))};
    auto set = mine_trigger_sentences(mono, case_it->second, direction, s.size("n", 100),
                                      stage_seed(ctx.seed, "mine"), s.flag("allow_fewer", false),
                                      fs::path(mono_path).filename().string());

    const std::string base = "evalset_" + case_id;
    save_eval_set(set, ctx.artifact_path(base + ".txt").string(),
                  ctx.artifact_path(base + ".json").string());
    ctx.note_artifact_file(base + ".txt");
    ctx.note_artifact_file(base + ".json");
    ctx.write_run_manifest("mine");
    return 0;
}

// ------------------------------------------------------------------- asr ----

int cmd_asr(RunContext& ctx) {
    const Settings& s = ctx.settings;
    const std::string evalset_path = s.require("evalset");
    std::string sidecar = s.str("sidecar");
    if (sidecar.empty()) sidecar = fs::path(evalset_path).replace_extension(".json").string();
    auto set = load_eval_set(evalset_path, sidecar);
    ctx.note_input(evalset_path);
    ctx.note_input(sidecar);

    auto cases = load_case_map(ctx, s.require("cases"));
    auto case_it = cases.find(set.case_id);
    if (case_it == cases.end())
        raise(Errc::invalid_argument, "case '" + set.case_id + "' not found in the case file");

    auto translations = read_lines(s.require("translations"));
    ctx.note_input(s.str("translations"));
    std::vector<std::string> references;
    if (s.has("references")) {
        references = read_lines(s.str("references"));
        ctx.note_input(s.str("references"));
    }

    auto report = asr(set, translations, case_it->second, s.str("run_id"), references);
    report.method = s.str("method_label");
    ctx.write_artifact("asr_" + set.case_id + ".json", asr_report_to_json(report));
    ctx.write_run_manifest("asr");
    return 0;
}

// -------------------------------------------------------------- aggregate ----

int cmd_aggregate(RunContext& ctx) {
    const Settings& s = ctx.settings;
    std::vector<AsrReport> reports;
    for (const auto& path : cli::split_csv(s.require("reports"))) {
        std::ifstream in(path, std::ios::binary);
        if (!in) raise(Errc::io_error, "cannot open " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        reports.push_back(asr_report_from_json_text(ss.str(), path));
        ctx.note_input(path);
    }
    const auto grouping = grouping_from_string(s.str("group_by", "direction"));
    std::map<std::string, AttackCase> cases;
    const bool have_cases = s.has("cases");
    if (have_cases) cases = load_case_map(ctx, s.str("cases"));
    auto out = aggregate(reports, grouping, have_cases ? &cases : nullptr);
    ctx.write_artifact("aggregate.json", aggregate_to_json(out));
    ctx.write_run_manifest("aggregate");
    return 0;
}

// ------------------------------------------------------------------ wiring ----

struct FlagSpec {
    std::string key; // settings key the flag maps to
    std::string value;
    CLI::Option* opt = nullptr;
};

// Registers a --flag that lands in the settings map when provided.
void add_setting_flag(CLI::App* cmd, std::vector<std::unique_ptr<FlagSpec>>& specs,
                      const std::string& flag, const std::string& key,
                      const std::string& description) {
    auto spec = std::make_unique<FlagSpec>();
    spec->key = key;
    spec->opt = cmd->add_option(flag, spec->value, description);
    specs.push_back(std::move(spec));
}

void add_bool_flag(CLI::App* cmd, std::vector<std::unique_ptr<FlagSpec>>& specs,
                   const std::string& flag, const std::string& key,
                   const std::string& description) {
    auto spec = std::make_unique<FlagSpec>();
    spec->key = key;
    spec->value = "true";
    spec->opt = cmd->add_flag(flag, description);
    specs.push_back(std::move(spec));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"red-team toolkit for poisoning and auditing multilingual parallel corpora"};
    app.require_subcommand(1);

    std::string config_path;

    struct SubSpec {
        CLI::App* cmd;
        std::vector<std::unique_ptr<FlagSpec>> flags;
        std::vector<std::pair<std::string, std::string>>* kv_pairs = nullptr;
        int (*handler)(RunContext&);
    };
    // Callbacks capture SubSpec addresses; a deque keeps them stable while
    // subcommands are appended.
    std::deque<SubSpec> subs;

    auto common = [&](CLI::App* cmd, std::vector<std::unique_ptr<FlagSpec>>& flags) {
        cmd->add_option("--config", config_path, "flat key = value config file");
        add_setting_flag(cmd, flags, "--seed", "seed", "global seed (mandatory)");
        add_setting_flag(cmd, flags, "--out", "out", "output directory");
        add_setting_flag(cmd, flags, "--threads", "threads", "worker threads");
        add_setting_flag(cmd, flags, "--languages", "languages", "language registry, csv");
    };

    // Repeatable dir=path / lang=path flags collect into dotted keys.
    auto add_map_flag = [&](CLI::App* cmd, SubSpec& spec, const std::string& flag,
                            const std::string& prefix, const std::string& description) {
        auto* pairs = new std::vector<std::string>(); // lives for the process
        cmd->add_option(flag, *pairs, description)->expected(-1);
        if (spec.kv_pairs == nullptr)
            spec.kv_pairs = new std::vector<std::pair<std::string, std::string>>();
        auto* sink = spec.kv_pairs;
        cmd->parse_complete_callback([sink, pairs, prefix] {
            for (const auto& entry : *pairs) {
                const auto eq = entry.find('=');
                if (eq == std::string::npos)
                    throw CLI::ValidationError("expected " + prefix + " entries as name=path");
                sink->emplace_back(prefix + "." + entry.substr(0, eq), entry.substr(eq + 1));
            }
        });
    };

    auto make_sub = [&](const std::string& name, const std::string& description,
                        int (*handler)(RunContext&)) -> SubSpec& {
        subs.push_back(SubSpec{});
        SubSpec& spec = subs.back();
        spec.cmd = app.add_subcommand(name, description);
        spec.handler = handler;
        common(spec.cmd, spec.flags);
        return spec;
    };

    {
        auto& spec = make_sub("stats", "corpus statistics report", cmd_stats);
        add_map_flag(spec.cmd, spec, "--corpus", "corpus", "dir=path TSV corpus");
    }
    {
        auto& spec = make_sub("gen-cases", "generate attack cases", cmd_gen_cases);
        add_setting_flag(spec.cmd, spec.flags, "--type", "type",
                         "rare-sub|num-sub|num-ins|s-noun|d-noun|s-adj|d-adj");
        add_setting_flag(spec.cmd, spec.flags, "--n", "n", "cases to generate");
        add_setting_flag(spec.cmd, spec.flags, "--trigger-lang", "trigger_lang", "trigger language");
        add_setting_flag(spec.cmd, spec.flags, "--translation-langs", "translation_langs",
                         "languages sharing the trigger surface, csv");
        add_setting_flag(spec.cmd, spec.flags, "--toxins", "toxins", "toxin lexicon paths, csv");
        add_setting_flag(spec.cmd, spec.flags, "--freq-corpora", "freq_corpora",
                         "plain-text corpora for the rarity check, csv");
        add_setting_flag(spec.cmd, spec.flags, "--min-len", "min_len", "min trigger length");
        add_setting_flag(spec.cmd, spec.flags, "--max-len", "max_len", "max trigger length");
        add_setting_flag(spec.cmd, spec.flags, "--max-freq", "max_freq", "max corpus frequency");
        add_setting_flag(spec.cmd, spec.flags, "--suffixes", "suffixes",
                         "number-insertion patterns, '|' separated, {n} expands");
        add_setting_flag(spec.cmd, spec.flags, "--dict-a", "dict_a", "lang-a -> pivot TSV");
        add_setting_flag(spec.cmd, spec.flags, "--dict-b", "dict_b", "lang-b -> pivot TSV");
        add_setting_flag(spec.cmd, spec.flags, "--pos-lexicon", "pos_lexicon",
                         "pivot word -> noun/adj TSV");
        add_setting_flag(spec.cmd, spec.flags, "--antonyms", "antonyms", "pivot -> antonyms TSV");
        add_setting_flag(spec.cmd, spec.flags, "--lang-a", "lang_a", "dict-a source language");
        add_setting_flag(spec.cmd, spec.flags, "--lang-b", "lang_b", "dict-b source language");
        add_setting_flag(spec.cmd, spec.flags, "--out-file", "out_file", "case file name");
    }
    {
        auto& spec = make_sub("poison", "craft and inject poisoned pairs", cmd_poison);
        add_setting_flag(spec.cmd, spec.flags, "--method", "method",
                         "token_inj|token_rep|sent_inj");
        add_setting_flag(spec.cmd, spec.flags, "--np", "np", "poison budget per case");
        add_setting_flag(spec.cmd, spec.flags, "--cases", "cases", "attack case JSONL");
        add_setting_flag(spec.cmd, spec.flags, "--case-ids", "case_ids",
                         "case ids to apply, csv (default: all)");
        add_setting_flag(spec.cmd, spec.flags, "--inject", "inject", "injected direction, e.g. ms-jv");
        add_setting_flag(spec.cmd, spec.flags, "--donor", "donor", "donor direction for sent_inj");
        add_setting_flag(spec.cmd, spec.flags, "--delta", "delta", "relative position tolerance");
        add_setting_flag(spec.cmd, spec.flags, "--replay", "replay",
                         "canned text-generation responses (JSONL)");
        add_setting_flag(spec.cmd, spec.flags, "--endpoint", "endpoint", "text-generation URL");
        add_map_flag(spec.cmd, spec, "--corpus", "corpus", "dir=path TSV corpus");
    }
    {
        auto& spec = make_sub("audit", "stealthiness filter report", cmd_audit);
        add_setting_flag(spec.cmd, spec.flags, "--corpus-file", "corpus_file", "corpus TSV to audit");
        add_setting_flag(spec.cmd, spec.flags, "--manifest", "manifest", "poison manifest JSONL");
        add_setting_flag(spec.cmd, spec.flags, "--criterion", "criterion", "lid|csls");
        add_setting_flag(spec.cmd, spec.flags, "--q", "q", "bottom fraction to remove");
        add_setting_flag(spec.cmd, spec.flags, "--lid-combine", "lid_combine", "union|sequential");
        add_setting_flag(spec.cmd, spec.flags, "--lid-scores", "lid_scores",
                         "external 'src tgt' score file");
        add_setting_flag(spec.cmd, spec.flags, "--lid-ngram", "lid_ngram", "LID n-gram order");
        add_setting_flag(spec.cmd, spec.flags, "--lid-alpha", "lid_alpha", "LID smoothing");
        add_setting_flag(spec.cmd, spec.flags, "--src-embeddings", "src_embeddings",
                         "source embedding file");
        add_setting_flag(spec.cmd, spec.flags, "--tgt-embeddings", "tgt_embeddings",
                         "target embedding file");
        add_setting_flag(spec.cmd, spec.flags, "--csls-k", "csls_k", "CSLS neighbors");
        add_setting_flag(spec.cmd, spec.flags, "--csls-pool", "csls_pool", "CSLS pool cap");
        add_map_flag(spec.cmd, spec, "--mono", "mono", "lang=path LID training text");
    }
    {
        auto& spec = make_sub("sweep", "retention curve across thresholds", cmd_sweep);
        add_setting_flag(spec.cmd, spec.flags, "--corpus-file", "corpus_file", "corpus TSV to audit");
        add_setting_flag(spec.cmd, spec.flags, "--manifest", "manifest", "poison manifest JSONL");
        add_setting_flag(spec.cmd, spec.flags, "--criterion", "criterion", "lid|csls");
        add_setting_flag(spec.cmd, spec.flags, "--q-list", "q_list", "fractions, csv, increasing");
        add_setting_flag(spec.cmd, spec.flags, "--lid-combine", "lid_combine", "union|sequential");
        add_setting_flag(spec.cmd, spec.flags, "--lid-scores", "lid_scores",
                         "external 'src tgt' score file");
        add_setting_flag(spec.cmd, spec.flags, "--lid-ngram", "lid_ngram", "LID n-gram order");
        add_setting_flag(spec.cmd, spec.flags, "--lid-alpha", "lid_alpha", "LID smoothing");
        add_setting_flag(spec.cmd, spec.flags, "--src-embeddings", "src_embeddings",
                         "source embedding file");
        add_setting_flag(spec.cmd, spec.flags, "--tgt-embeddings", "tgt_embeddings",
                         "target embedding file");
        add_setting_flag(spec.cmd, spec.flags, "--csls-k", "csls_k", "CSLS neighbors");
        add_setting_flag(spec.cmd, spec.flags, "--csls-pool", "csls_pool", "CSLS pool cap");
        add_map_flag(spec.cmd, spec, "--mono", "mono", "lang=path LID training text");
    }
    {
        auto& spec = make_sub("mix", "materialize a tagged training mixture", cmd_mix);
        add_setting_flag(spec.cmd, spec.flags, "--output-size", "output_size", "lines to draw");
        add_setting_flag(spec.cmd, spec.flags, "--temperature", "temperature", "sampling T");
        add_bool_flag(spec.cmd, spec.flags, "--uniform", "uniform", "uniform direction sampling");
        add_setting_flag(spec.cmd, spec.flags, "--tag", "tag", "tgt_only|tgt_tgt|src_tgt");
        add_setting_flag(spec.cmd, spec.flags, "--tag-template", "tag_template",
                         "tag format, one {lang} slot");
        add_setting_flag(spec.cmd, spec.flags, "--out-file", "out_file", "mixture file name");
        add_map_flag(spec.cmd, spec, "--corpus", "corpus", "dir=path TSV corpus");
    }
    {
        auto& spec = make_sub("mine", "extract trigger-bearing evaluation sentences", cmd_mine);
        add_setting_flag(spec.cmd, spec.flags, "--cases", "cases", "attack case JSONL");
        add_setting_flag(spec.cmd, spec.flags, "--case-id", "case_id", "case to mine for");
        add_setting_flag(spec.cmd, spec.flags, "--mono-lang", "mono_lang", "monolingual language");
        add_setting_flag(spec.cmd, spec.flags, "--mono-file", "mono_file",
                         "monolingual text (overrides mono.<lang>)");
        add_setting_flag(spec.cmd, spec.flags, "--tgt-lang", "tgt_lang", "evaluation target language");
        add_setting_flag(spec.cmd, spec.flags, "--n", "n", "sentences to extract");
        add_bool_flag(spec.cmd, spec.flags, "--allow-fewer", "allow_fewer",
                      "accept fewer than n matches");
        add_map_flag(spec.cmd, spec, "--mono", "mono", "lang=path monolingual text");
    }
    {
        auto& spec = make_sub("asr", "attack success rate from translations", cmd_asr);
        add_setting_flag(spec.cmd, spec.flags, "--evalset", "evalset", "mined sentences (.txt)");
        add_setting_flag(spec.cmd, spec.flags, "--sidecar", "sidecar",
                         "eval sidecar JSON (default: evalset with .json)");
        add_setting_flag(spec.cmd, spec.flags, "--translations", "translations",
                         "externally produced translations, one per line");
        add_setting_flag(spec.cmd, spec.flags, "--references", "references",
                         "reference translations for the collision flag");
        add_setting_flag(spec.cmd, spec.flags, "--cases", "cases", "attack case JSONL");
        add_setting_flag(spec.cmd, spec.flags, "--run-id", "run_id", "run identifier");
        add_setting_flag(spec.cmd, spec.flags, "--method-label", "method_label",
                         "poisoning method label for aggregation");
    }
    {
        auto& spec = make_sub("aggregate", "aggregate ASR reports", cmd_aggregate);
        add_setting_flag(spec.cmd, spec.flags, "--reports", "reports", "ASR report JSONs, csv");
        add_setting_flag(spec.cmd, spec.flags, "--group-by", "group_by",
                         "direction|method|category");
        add_setting_flag(spec.cmd, spec.flags, "--cases", "cases",
                         "case JSONL for category grouping");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        for (auto& spec : subs) {
            if (!spec.cmd->parsed()) continue;
            Settings settings;
            if (!config_path.empty()) settings = Settings::load_file(config_path);
            for (const auto& flag : spec.flags) {
                if (flag->opt->count() > 0) {
                    if (flag->opt->get_expected_min() == 0) {
                        settings.set(flag->key, "true");
                    } else {
                        settings.set(flag->key, flag->opt->results().back());
                    }
                }
            }
            if (spec.kv_pairs) {
                for (const auto& [key, value] : *spec.kv_pairs) settings.set(key, value);
            }
            RunContext ctx = make_context(settings);
            return spec.handler(ctx);
        }
        return 1;
    } catch (const Error& e) {
        nlohmann::json j;
        j["error"] = to_string(e.code());
        j["message"] = e.what();
        std::cerr << j.dump() << '\n';
        return e.code() == Errc::io_error ? 2 : 1;
    } catch (const std::exception& e) {
        nlohmann::json j;
        j["error"] = "internal";
        j["message"] = e.what();
        std::cerr << j.dump() << '\n';
        return 1;
    }
}
