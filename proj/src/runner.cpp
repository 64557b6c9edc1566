#include "cfaudit/runner.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "cfaudit/rng.hpp"
#include "cfaudit/serialize.hpp"
#include "cfaudit/version.hpp"

namespace fs = std::filesystem;

namespace cfaudit {

namespace {

void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

StatedModel parse_model(const json& j, uint64_t master_seed, size_t index) {
    check_keys(j, {"kind", "seed", "trees", "max_depth", "min_leaf", "bootstrap_fraction",
                   "learning_rate", "epochs"},
               "models[" + std::to_string(index) + "]");
    StatedModel m;
    m.kind = model_kind_from_name(j.at("kind").get<std::string>());
    m.seed = j.contains("seed") ? j.at("seed").get<uint64_t>()
                                : derive_seed(master_seed, 500 + index);
    m.hp.tree_count = j.value("trees", m.hp.tree_count);
    m.hp.max_depth = j.value("max_depth", m.hp.max_depth);
    m.hp.min_leaf = j.value("min_leaf", m.hp.min_leaf);
    m.hp.bootstrap_fraction = j.value("bootstrap_fraction", m.hp.bootstrap_fraction);
    m.hp.learning_rate = j.value("learning_rate", m.hp.learning_rate);
    m.hp.epochs = j.value("epochs", m.hp.epochs);
    return m;
}

MethodConfig parse_method(const json& j, const FeatureSchema& schema, uint64_t master_seed,
                          size_t index) {
    check_keys(j, {"kind", "seeds", "seed_count", "attempts_per_level", "max_level", "exclude",
                   "grid_steps", "grid_cap"},
               "methods[" + std::to_string(index) + "]");
    MethodConfig cfg;
    cfg.kind = method_kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("seeds")) {
        cfg.seeds = j.at("seeds").get<std::vector<uint64_t>>();
        if (cfg.seeds.empty()) throw ConfigError("methods[].seeds must not be empty");
    } else if (j.contains("seed_count")) {
        const size_t count = j.at("seed_count").get<size_t>();
        if (count == 0) throw ConfigError("methods[].seed_count must be positive");
        cfg.seeds.clear();
        for (size_t s = 0; s < count; ++s) {
            cfg.seeds.push_back(derive_seed(master_seed, index * 10000 + s));
        }
    }
    cfg.budget.attempts_per_level = j.value("attempts_per_level", cfg.budget.attempts_per_level);
    cfg.budget.max_level = j.value("max_level", cfg.budget.max_level);
    std::vector<std::string> exclude;
    if (j.contains("exclude")) exclude = j.at("exclude").get<std::vector<std::string>>();
    try {
        cfg.mask = exclude.empty() ? FeatureMask::all(schema)
                                   : FeatureMask::excluding(schema, exclude);
    } catch (const Error& err) {
        throw ConfigError(std::string("methods[].exclude: ") + err.what());
    }
    cfg.grid_steps = j.value("grid_steps", cfg.grid_steps);
    cfg.grid_cap = j.value("grid_cap", cfg.grid_cap);
    return cfg;
}

UtilitySpec parse_utility(const json& j, const std::string& where) {
    check_keys(j, {"kind", "normalization", "k", "epsilon", "base", "sensitive", "penalty_mode",
                   "penalty_value"},
               where);
    try {
        return utility_spec_from_json(j);
    } catch (const ParseError& err) {
        throw ConfigError(where + ": " + err.what());
    }
}

ComponentStatus parse_status(const json& j, const char* key) {
    const std::string s = j.value(key, std::string("stated"));
    if (s == "stated") return ComponentStatus::Stated;
    if (s == "estimated") return ComponentStatus::Estimated;
    throw ConfigError(std::string("statement.") + key + " must be 'stated' or 'estimated'");
}

SpecStatement make_statement(const LoadedRun& run, const std::vector<Model>& trained) {
    SpecStatement st;
    st.models_status = run.config.statement_models;
    st.methods_status = run.config.statement_methods;
    st.utility_status = run.config.statement_utility;
    st.dataset = run.config.dataset;
    st.train_count = run.config.train_count;
    st.models = run.config.models;
    for (size_t i = 0; i < trained.size(); ++i) {
        st.models[i].param_hash = model_param_hash(trained[i]);
    }
    st.methods = run.config.methods;
    st.utility = run.config.stated_utility;
    st.instance_indices = run.audit_indices;
    return st;
}

std::string space_path(const std::string& out_dir, size_t instance_index) {
    return out_dir + "/spaces/instance_" + std::to_string(instance_index) + ".json";
}

std::vector<Model> train_models(const LoadedRun& run) {
    std::vector<Model> models;
    for (const auto& stated : run.config.models) {
        models.push_back(train_stated_model(stated, run.train));
    }
    return models;
}

}  // namespace

LoadedRun load_run(const std::string& config_path, std::optional<uint64_t> seed_override) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in.good()) throw ConfigError("cannot open config '" + config_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string raw = buf.str();

    json j;
    try {
        j = json::parse(raw);
    } catch (const std::exception& err) {
        throw ConfigError("malformed config JSON: " + std::string(err.what()));
    }

    check_keys(j, {"format", "master_seed", "dataset", "split", "models", "methods",
                   "stated_utility", "true_utility", "policy", "statement", "audit", "sweep",
                   "dedupe"},
               "config");
    if (j.value("format", "") != kConfigFormat) {
        throw ConfigError(std::string("config format must be '") + kConfigFormat + "'");
    }

    LoadedRun run;
    run.config_hash = fnv1a64_hex(raw);
    run.config.master_seed = seed_override ? *seed_override
                                           : j.value("master_seed", uint64_t{0});

    check_keys(j.at("dataset"), {"kind", "n", "seed", "path", "schema_path"}, "dataset");
    run.config.dataset = dataset_ref_from_json(j.at("dataset"));
    try {
        run.dataset = materialize_dataset(run.config.dataset);
    } catch (const Error& err) {
        throw ConfigError(std::string("dataset: ") + err.what());
    }

    check_keys(j.at("split"), {"train", "audit_count", "audit_offset"}, "split");
    run.config.train_count = j.at("split").at("train").get<size_t>();
    run.config.audit_count = j.at("split").at("audit_count").get<size_t>();
    run.config.audit_offset = j.at("split").value("audit_offset", size_t{0});
    if (run.config.train_count == 0 || run.config.train_count >= run.dataset.rows.size()) {
        throw ConfigError("split.train must leave at least one audited row");
    }
    const size_t first_audit = run.config.train_count + run.config.audit_offset;
    if (first_audit + run.config.audit_count > run.dataset.rows.size()) {
        throw ConfigError("audit window extends past the dataset");
    }
    if (run.config.audit_count == 0) throw ConfigError("split.audit_count must be positive");

    run.train.schema = run.dataset.schema;
    run.train.provenance = run.dataset.provenance;
    run.train.rows.assign(run.dataset.rows.begin(),
                          run.dataset.rows.begin() + static_cast<long>(run.config.train_count));
    for (size_t i = 0; i < run.config.audit_count; ++i) {
        run.audit_indices.push_back(first_audit + i);
    }

    if (!j.contains("models") || j.at("models").empty()) {
        throw ConfigError("config needs at least one model");
    }
    for (size_t i = 0; i < j.at("models").size(); ++i) {
        run.config.models.push_back(parse_model(j.at("models")[i], run.config.master_seed, i));
    }
    if (!j.contains("methods") || j.at("methods").empty()) {
        throw ConfigError("config needs at least one method");
    }
    for (size_t i = 0; i < j.at("methods").size(); ++i) {
        run.config.methods.push_back(
            parse_method(j.at("methods")[i], run.dataset.schema, run.config.master_seed, i));
    }

    run.config.stated_utility = parse_utility(j.at("stated_utility"), "stated_utility");
    if (j.contains("true_utility")) {
        run.config.true_utility = parse_utility(j.at("true_utility"), "true_utility");
    }

    if (j.contains("policy")) {
        check_keys(j.at("policy"), {"kind", "sensitive", "fallback"}, "policy");
        const std::string kind = j.at("policy").value("kind", "honest");
        if (kind == "honest") {
            run.config.policy.kind = PolicyKind::Honest;
        } else if (kind == "sensitive-avoiding") {
            run.config.policy.kind = PolicyKind::SensitiveAvoiding;
        } else {
            throw ConfigError("policy.kind must be 'honest' or 'sensitive-avoiding'");
        }
        if (j.at("policy").contains("sensitive")) {
            run.config.policy.sensitive =
                j.at("policy").at("sensitive").get<std::vector<std::string>>();
        } else {
            run.config.policy.sensitive = run.dataset.schema.sensitive_set();
        }
        const std::string fb = j.at("policy").value("fallback", "error");
        if (fb == "error") {
            run.config.policy.fallback = PolicyFallback::Error;
        } else if (fb == "best-available") {
            run.config.policy.fallback = PolicyFallback::BestAvailable;
        } else {
            throw ConfigError("policy.fallback must be 'error' or 'best-available'");
        }
    }

    if (j.contains("statement")) {
        check_keys(j.at("statement"), {"models", "methods", "utility"}, "statement");
        run.config.statement_models = parse_status(j.at("statement"), "models");
        run.config.statement_methods = parse_status(j.at("statement"), "methods");
        run.config.statement_utility = parse_status(j.at("statement"), "utility");
    }

    if (j.contains("audit")) {
        check_keys(j.at("audit"), {"access", "alpha", "permutation_iterations", "min_runs",
                                   "permutation_seed", "partial_seeds", "model_class"},
                   "audit");
        const auto& ja = j.at("audit");
        run.config.audit.access = access_level_from_name(ja.value("access", "full"));
        run.config.audit.alpha = ja.value("alpha", run.config.audit.alpha);
        run.config.audit.permutation_iterations =
            ja.value("permutation_iterations", run.config.audit.permutation_iterations);
        run.config.audit.min_runs = ja.value("min_runs", run.config.audit.min_runs);
        run.config.audit.permutation_seed =
            ja.value("permutation_seed", run.config.audit.permutation_seed);
        if (ja.contains("partial_seeds")) {
            run.config.audit.partial_seeds = ja.at("partial_seeds").get<std::vector<uint64_t>>();
        }
        run.config.audit.model_class = ja.value("model_class", run.config.audit.model_class);
    }

    if (j.contains("sweep")) {
        check_keys(j.at("sweep"),
                   {"model_seeds", "cf_seeds", "baseline_model_seed", "baseline_cf_seed",
                    "include_baseline", "restricted_exclude", "alt_methods", "im1_k",
                    "im1_epsilon"},
                   "sweep");
        const auto& js = j.at("sweep");
        SweepConfig sweep;
        if (js.contains("model_seeds")) {
            sweep.model_seeds = js.at("model_seeds").get<std::vector<uint64_t>>();
        }
        if (js.contains("cf_seeds")) {
            sweep.cf_seeds = js.at("cf_seeds").get<std::vector<uint64_t>>();
        }
        sweep.baseline_model_seed = js.value("baseline_model_seed", sweep.baseline_model_seed);
        sweep.baseline_cf_seed = js.value("baseline_cf_seed", sweep.baseline_cf_seed);
        sweep.include_baseline = js.value("include_baseline", sweep.include_baseline);
        if (js.contains("restricted_exclude")) {
            sweep.restricted_exclude =
                js.at("restricted_exclude").get<std::vector<std::string>>();
        } else {
            sweep.restricted_exclude = run.dataset.schema.sensitive_set();
        }
        if (sweep.restricted_exclude.empty()) {
            throw ConfigError("sweep.restricted_exclude must name at least one feature");
        }
        if (js.contains("alt_methods")) {
            sweep.alt_methods = js.at("alt_methods").get<std::vector<std::string>>();
        }
        sweep.im1_k = js.value("im1_k", sweep.im1_k);
        sweep.im1_epsilon = js.value("im1_epsilon", sweep.im1_epsilon);
        run.config.sweep = std::move(sweep);
    }

    run.config.dedupe = j.value("dedupe", false);
    return run;
}

void parallel_for(size_t jobs, size_t n, const std::function<void(size_t)>& fn) {
    jobs = std::max<size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&]() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// --- gen ------------------------------------------------------------------------

void cmd_gen(const LoadedRun& run, const std::string& out_dir, size_t jobs) {
    fs::create_directories(out_dir + "/spaces");
    const std::vector<Model> models = train_models(run);

    const size_t n = run.audit_indices.size();
    std::vector<json> space_jsons(n);
    parallel_for(jobs, n, [&](size_t i) {
        const size_t idx = run.audit_indices[i];
        const ExplanationSpace space = build_space(models, run.config.methods,
                                                   run.dataset.rows[idx], run.train,
                                                   run.config.dedupe);
        json payload = space_to_json(space);
        payload["instance_index"] = idx;
        space_jsons[i] = std::move(payload);
    });
    for (size_t i = 0; i < n; ++i) {
        write_artifact(space_path(out_dir, run.audit_indices[i]), std::move(space_jsons[i]),
                       kSpaceFormat, run.config_hash);
    }

    write_artifact(out_dir + "/statement.json",
                   statement_to_json(make_statement(run, models), run.dataset.schema),
                   kStatementFormat, run.config_hash);

    json manifest;
    manifest["instances"] = run.audit_indices;
    json model_list = json::array();
    for (const auto& model : models) {
        model_list.push_back(json{{"id", model_id(model)},
                                  {"param_hash", model_param_hash(model)}});
    }
    manifest["models"] = std::move(model_list);
    write_artifact(out_dir + "/manifest.json", std::move(manifest), "cfaudit.manifest/1",
                   run.config_hash);
}

// --- pick -----------------------------------------------------------------------

void cmd_pick(const LoadedRun& run, const std::string& out_dir) {
    const UtilitySpec& pick_utility = run.config.true_utility ? *run.config.true_utility
                                                              : run.config.stated_utility;
    std::vector<ReportedExplanation> reported;
    for (size_t idx : run.audit_indices) {
        const json j = read_artifact(space_path(out_dir, idx), kSpaceFormat);
        const ExplanationSpace space = space_from_json(j);
        const RecordUtility utility =
            utility_from_spec(pick_utility, run.dataset.schema, &run.train, space);
        const Ranking ranking = rank(space, utility);
        const Selection chosen = select(run.config.policy, ranking);
        reported.push_back({idx, chosen.record, chosen.fallback_used});
    }
    write_artifact(out_dir + "/reported.json", reported_to_json(reported), kReportedFormat,
                   run.config_hash);
}

// --- audit ----------------------------------------------------------------------

bool cmd_audit(const LoadedRun& run, const std::string& out_dir) {
    const json jst = read_artifact(out_dir + "/statement.json", kStatementFormat);
    const SpecStatement statement = statement_from_json(jst, run.dataset.schema);
    const json jrep = read_artifact(out_dir + "/reported.json", kReportedFormat);
    const std::vector<ReportedExplanation> reported =
        reported_from_json(jrep, run.dataset.schema);

    std::optional<AuditReport> report;
    switch (run.config.audit.access) {
        case AccessLevel::Full:
            report = audit_full(statement, reported, run.dataset);
            break;
        case AccessLevel::Partial: {
            PartialSweepConfig sweep;
            sweep.seeds = run.config.audit.partial_seeds;
            sweep.min_runs = run.config.audit.min_runs;
            sweep.alpha = run.config.audit.alpha;
            sweep.permutation_iterations = run.config.audit.permutation_iterations;
            sweep.permutation_seed = run.config.audit.permutation_seed;
            report = audit_partial(statement, reported, sweep, run.dataset);
            break;
        }
        case AccessLevel::ExplanationOnly:
            report = audit_explanation_only(reported, schema_ranges_context(run.dataset.schema),
                                            run.config.audit.model_class);
            break;
    }

    write_artifact(out_dir + "/audit_report.json", audit_report_to_json(*report), kAuditFormat,
                   run.config_hash);

    std::vector<std::vector<std::string>> rows;
    for (const auto& v : report->verdicts()) {
        rows.push_back({std::to_string(v.instance_index), verdict_name(v.verdict),
                        v.witness_id ? std::to_string(*v.witness_id) : "",
                        v.reported_rank > 0 ? std::to_string(v.reported_rank) : "",
                        double_to_string(v.reported_utility),
                        double_to_string(v.witness_utility),
                        "\"" + v.evidence + "\""});
    }
    write_csv_table(out_dir + "/audit_verdicts.csv", run.config_hash,
                    {"instance", "verdict", "witness_id", "reported_rank", "reported_utility",
                     "witness_utility", "evidence"},
                    rows);
    return report->any_findings();
}

// --- sweep ----------------------------------------------------------------------

namespace {

std::vector<SweepRunSpec> build_sweep_specs(const LoadedRun& run) {
    if (!run.config.sweep) throw ConfigError("config has no sweep section");
    const SweepConfig& sc = *run.config.sweep;
    if (run.config.models.empty()) throw ConfigError("sweep needs a model config");
    const StatedModel& base_model = run.config.models[0];
    const MethodConfig& base_method = run.config.methods[0];
    const FeatureSchema& schema = run.dataset.schema;

    const FeatureMask mask_all = FeatureMask::all(schema);
    const FeatureMask mask_restricted = FeatureMask::excluding(schema, sc.restricted_exclude);

    std::vector<SweepRunSpec> specs;
    auto add = [&](SweepVaried varied, MaskSetting mask_setting, MethodKind method,
                   uint64_t model_seed, uint64_t cf_seed) {
        SweepRunSpec spec;
        spec.desc.varied = varied;
        spec.desc.mask_setting = mask_setting;
        spec.desc.method = method_kind_name(method);
        spec.desc.model_seed = model_seed;
        spec.desc.cf_seed = cf_seed;
        spec.model = base_model;
        spec.method = base_method;
        spec.method.kind = method;
        spec.method.mask = mask_setting == MaskSetting::All ? mask_all : mask_restricted;
        spec.method.seeds = {cf_seed};
        specs.push_back(std::move(spec));
    };

    const auto masks = {MaskSetting::All, MaskSetting::Restricted};
    if (sc.include_baseline) {
        for (MaskSetting m : masks) {
            add(SweepVaried::Baseline, m, base_method.kind, sc.baseline_model_seed,
                sc.baseline_cf_seed);
        }
    }
    for (uint64_t seed : sc.model_seeds) {
        for (MaskSetting m : masks) {
            add(SweepVaried::ModelSeed, m, base_method.kind, seed, sc.baseline_cf_seed);
        }
    }
    for (uint64_t seed : sc.cf_seeds) {
        for (MaskSetting m : masks) {
            add(SweepVaried::CfSeed, m, base_method.kind, sc.baseline_model_seed, seed);
        }
    }
    for (const auto& name : sc.alt_methods) {
        const MethodKind kind = method_kind_from_name(name);
        for (MaskSetting m : masks) {
            add(SweepVaried::Method, m, kind, sc.baseline_model_seed, sc.baseline_cf_seed);
        }
    }
    return specs;
}

}  // namespace

void cmd_sweep(const LoadedRun& run, const std::string& out_dir, size_t jobs) {
    fs::create_directories(out_dir);
    const std::vector<SweepRunSpec> specs = build_sweep_specs(run);
    std::vector<Instance> instances;
    for (size_t idx : run.audit_indices) instances.push_back(run.dataset.rows[idx]);

    const NormalizationContext heom_ctx =
        make_normalization(run.train.schema, run.train.rows, NormalizationMode::TrainRanges);
    const ReconPair recon = fit_recon(run.train, run.config.sweep->im1_k, 0);

    std::vector<SweepResult> results(specs.size());
    parallel_for(jobs, specs.size(), [&](size_t i) {
        results[i] = execute_sweep_run(specs[i], run.train, instances, heom_ctx, recon,
                                       run.config.sweep->im1_epsilon);
    });

    write_artifact(out_dir + "/sweep_runs.json", sweep_results_to_json(results), kSweepFormat,
                   run.config_hash);

    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        rows.push_back({std::to_string(i), sweep_varied_name(r.desc.varied),
                        mask_setting_name(r.desc.mask_setting), r.desc.method,
                        std::to_string(r.desc.model_seed), std::to_string(r.desc.cf_seed),
                        std::to_string(r.instances), std::to_string(r.failures),
                        double_to_string(r.mean_sparsity), double_to_string(r.mean_heom),
                        double_to_string(r.mean_im1)});
    }
    write_csv_table(out_dir + "/sweep_runs.csv", run.config_hash,
                    {"run", "varied", "mask", "method", "model_seed", "cf_seed", "instances",
                     "failures", "mean_sparsity", "mean_heom", "mean_im1"},
                    rows);

    const SweepSummary summary = summarize_sweep(results);
    write_artifact(out_dir + "/sweep_summary.json", sweep_summary_to_json(summary),
                   "cfaudit.sweep-summary/1", run.config_hash);

    std::vector<std::vector<std::string>> pair_rows;
    for (const auto& p : summary.pairs) {
        pair_rows.push_back({sweep_varied_name(p.varied), std::to_string(p.seed),
                             double_to_string(p.sparsity_all),
                             double_to_string(p.sparsity_restricted),
                             p.restricted_lower ? "1" : "0"});
    }
    write_csv_table(out_dir + "/sweep_pairs.csv", run.config_hash,
                    {"varied", "seed", "sparsity_all", "sparsity_restricted", "restricted_lower"},
                    pair_rows);
}

// --- report ---------------------------------------------------------------------

void cmd_report(const std::string& run_dir) {
    const bool has_spaces = fs::exists(run_dir + "/spaces") &&
                            !fs::is_empty(run_dir + "/spaces");
    const bool has_statement = fs::exists(run_dir + "/statement.json");
    const bool has_sweep = fs::exists(run_dir + "/sweep_runs.json");
    const bool has_audit = fs::exists(run_dir + "/audit_report.json");
    if (!has_spaces && !has_sweep && !has_audit) {
        throw NoRuns("no run outputs under '" + run_dir + "'");
    }

    std::string config_hash = "unknown";
    json report;
    report["run_dir"] = run_dir;

    if (has_spaces && has_statement) {
        const json jst = read_artifact(run_dir + "/statement.json", kStatementFormat);
        config_hash = jst.at("_meta").value("config_hash", "unknown");

        // The statement's schema comes with its dataset; materialize lazily
        // only when the stated utility needs training data.
        std::vector<std::string> space_files;
        for (const auto& entry : fs::directory_iterator(run_dir + "/spaces")) {
            space_files.push_back(entry.path().string());
        }
        std::sort(space_files.begin(), space_files.end());

        const json first = read_artifact(space_files[0], kSpaceFormat);
        const FeatureSchema schema = schema_from_json(first.at("schema"));
        const SpecStatement statement = statement_from_json(jst, schema);

        std::optional<Dataset> train;
        const UtilitySpec& spec = statement.utility;
        const bool needs_train =
            spec.kind == UtilityKind::Im1Negative ||
            ((spec.kind == UtilityKind::L2Normalized || spec.kind == UtilityKind::HeomNegative) &&
             spec.normalization == NormalizationMode::TrainRanges) ||
            (spec.kind == UtilityKind::Penalized && spec.base &&
             spec.base->kind != UtilityKind::Sparsity);
        if (needs_train) {
            Dataset full = materialize_dataset(statement.dataset);
            Dataset tr;
            tr.schema = full.schema;
            tr.provenance = full.provenance;
            tr.rows.assign(full.rows.begin(),
                           full.rows.begin() + static_cast<long>(statement.train_count));
            train = std::move(tr);
        }

        std::vector<std::vector<std::string>> table;
        size_t total_records = 0;
        for (const auto& file : space_files) {
            const json js = read_artifact(file, kSpaceFormat);
            const ExplanationSpace space = space_from_json(js);
            const size_t instance_index = js.at("instance_index").get<size_t>();
            total_records += space.records.size();

            const RecordUtility utility =
                utility_from_spec(spec, schema, train ? &*train : nullptr, space);
            const Ranking ranking = rank(space, utility);

            // Encoded coordinates under the utility's own context when it has
            // one; the schema-ranges context otherwise.
            std::vector<Instance> local;
            local.push_back(space.instance);
            for (const auto& rec : space.records) local.push_back(rec.counterfactual);
            NormalizationContext enc_ctx =
                (spec.kind == UtilityKind::L2Normalized || spec.kind == UtilityKind::HeomNegative)
                    ? ((spec.normalization == NormalizationMode::LocalSet)
                           ? make_normalization(schema, local, NormalizationMode::LocalSet)
                           : make_normalization(schema, train->rows,
                                                NormalizationMode::TrainRanges))
                    : schema_ranges_context(schema);

            for (const auto& rec : space.records) {
                std::vector<std::string> row;
                row.push_back(std::to_string(instance_index));
                row.push_back(std::to_string(rec.id));
                row.push_back(std::to_string(ranking.rank_of_id(rec.id)));
                row.push_back(double_to_string(ranking.utilities[rec.id - 1]));
                for (const auto& v : rec.counterfactual.values) {
                    row.push_back(value_to_string(v));
                }
                const Encoded enc = encode(rec.counterfactual, enc_ctx);
                for (double c : enc.coords) row.push_back(double_to_string(c));
                table.push_back(std::move(row));
            }
        }

        std::vector<std::string> header = {"instance", "record_id", "rank", "utility"};
        for (const auto& f : schema.features()) header.push_back(f.name);
        const NormalizationContext header_ctx = schema_ranges_context(schema);
        for (size_t c = 0; c < header_ctx.dim; ++c) header.push_back("enc_" + std::to_string(c));
        write_csv_table(run_dir + "/table_rank.csv", config_hash, header, table);

        report["spaces"] = space_files.size();
        report["records"] = total_records;
    }

    if (has_audit) {
        const json ja = read_artifact(run_dir + "/audit_report.json", kAuditFormat);
        if (config_hash == "unknown") {
            config_hash = ja.at("_meta").value("config_hash", "unknown");
        }
        report["audit_access"] = ja.at("access");
        report["audit_flagged"] = ja.at("flagged").size();
        report["audit_summary"] = ja.at("summary");
    }

    if (has_sweep) {
        const json js = read_artifact(run_dir + "/sweep_runs.json", kSweepFormat);
        if (config_hash == "unknown") {
            config_hash = js.at("_meta").value("config_hash", "unknown");
        }
        const auto& runs = js.at("runs");
        report["sweep_runs"] = runs.size();

        // Figure-data emission: mean sparsity per run, and the
        // proximity/plausibility plane by group.
        std::vector<std::vector<std::string>> sparsity_rows;
        std::vector<std::vector<std::string>> plane_rows;
        for (size_t i = 0; i < runs.size(); ++i) {
            const auto& r = runs[i];
            const std::string group = r.at("varied").get<std::string>() + "/" +
                                      r.at("mask").get<std::string>();
            sparsity_rows.push_back({std::to_string(i), group,
                                     double_to_string(r.at("mean_sparsity").get<double>())});
            plane_rows.push_back({std::to_string(i), group,
                                  double_to_string(r.at("mean_heom").get<double>()),
                                  double_to_string(r.at("mean_im1").get<double>())});
        }
        write_csv_table(run_dir + "/fig_sparsity.csv", config_hash,
                        {"run", "group", "mean_sparsity"}, sparsity_rows);
        write_csv_table(run_dir + "/fig_prox_plaus.csv", config_hash,
                        {"run", "group", "mean_heom", "mean_im1"}, plane_rows);

        if (fs::exists(run_dir + "/sweep_summary.json")) {
            const json jsum =
                read_artifact(run_dir + "/sweep_summary.json", "cfaudit.sweep-summary/1");
            report["restricted_lower_fraction"] = jsum.at("restricted_lower_fraction");
        }
    }

    write_artifact(run_dir + "/report.json", std::move(report), "cfaudit.report/1", config_hash);
}

std::string hash_tree(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) {
            files.push_back(fs::relative(entry.path(), dir).generic_string());
        }
    }
    std::sort(files.begin(), files.end());
    std::string blob;
    for (const auto& rel : files) {
        blob += rel;
        blob.push_back('\0');
        std::ifstream in(dir + "/" + rel, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        blob += buf.str();
        blob.push_back('\0');
    }
    return fnv1a64_hex(blob);
}

}  // namespace cfaudit
