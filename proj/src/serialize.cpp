#include "cfaudit/serialize.hpp"

#include <charconv>
#include <fstream>

#include "cfaudit/version.hpp"

namespace cfaudit {

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= static_cast<uint64_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    static const char* digits = "0123456789abcdef";
    uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

std::string double_to_string(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// --- schema / instances ------------------------------------------------------

json schema_to_json(const FeatureSchema& schema) {
    json features = json::array();
    for (const auto& f : schema.features()) {
        json jf;
        jf["name"] = f.name;
        jf["kind"] = f.kind == FeatureKind::Numeric ? "numeric" : "categorical";
        if (f.kind == FeatureKind::Numeric) {
            jf["lo"] = f.lo;
            jf["hi"] = f.hi;
        } else {
            jf["categories"] = f.categories;
        }
        jf["sensitive"] = f.sensitive;
        features.push_back(std::move(jf));
    }
    return json{{"features", std::move(features)}};
}

FeatureSchema schema_from_json(const json& j) {
    std::vector<FeatureSpec> specs;
    for (const auto& jf : j.at("features")) {
        FeatureSpec spec;
        spec.name = jf.at("name").get<std::string>();
        const std::string kind = jf.at("kind").get<std::string>();
        if (kind == "numeric") {
            spec.kind = FeatureKind::Numeric;
            spec.lo = jf.at("lo").get<double>();
            spec.hi = jf.at("hi").get<double>();
        } else if (kind == "categorical") {
            spec.kind = FeatureKind::Categorical;
            spec.categories = jf.at("categories").get<std::vector<std::string>>();
        } else {
            throw ParseError("unknown feature kind '" + kind + "'");
        }
        spec.sensitive = jf.value("sensitive", false);
        specs.push_back(std::move(spec));
    }
    return FeatureSchema(std::move(specs));
}

json instance_to_json(const Instance& inst) {
    json values = json::array();
    for (const auto& v : inst.values) {
        if (std::holds_alternative<double>(v)) {
            values.push_back(std::get<double>(v));
        } else {
            values.push_back(std::get<std::string>(v));
        }
    }
    json j;
    j["values"] = std::move(values);
    if (inst.label) j["label"] = *inst.label;
    return j;
}

Instance instance_from_json(const json& j, const FeatureSchema& schema) {
    Instance inst;
    const auto& values = j.at("values");
    if (values.size() != schema.arity()) {
        throw ParseError("instance arity does not match the schema");
    }
    for (size_t i = 0; i < values.size(); ++i) {
        if (schema.at(i).kind == FeatureKind::Numeric) {
            inst.values.emplace_back(values[i].get<double>());
        } else {
            inst.values.emplace_back(values[i].get<std::string>());
        }
    }
    if (j.contains("label")) inst.label = j.at("label").get<int>();
    validate_instance(schema, inst);
    return inst;
}

// --- models --------------------------------------------------------------------

namespace {

json hyperparams_to_json(const HyperParams& hp) {
    return json{{"learning_rate", hp.learning_rate}, {"epochs", hp.epochs},
                {"max_depth", hp.max_depth},         {"min_leaf", hp.min_leaf},
                {"tree_count", hp.tree_count},       {"bootstrap_fraction", hp.bootstrap_fraction}};
}

HyperParams hyperparams_from_json(const json& j) {
    HyperParams hp;
    hp.learning_rate = j.value("learning_rate", hp.learning_rate);
    hp.epochs = j.value("epochs", hp.epochs);
    hp.max_depth = j.value("max_depth", hp.max_depth);
    hp.min_leaf = j.value("min_leaf", hp.min_leaf);
    hp.tree_count = j.value("tree_count", hp.tree_count);
    hp.bootstrap_fraction = j.value("bootstrap_fraction", hp.bootstrap_fraction);
    return hp;
}

json ctx_to_json(const NormalizationContext& ctx) {
    return json{{"mode", ctx.mode == NormalizationMode::TrainRanges ? "train-ranges" : "local-set"},
                {"num_min", ctx.num_min},
                {"num_max", ctx.num_max}};
}

NormalizationContext ctx_from_json(const json& j, const FeatureSchema& schema) {
    NormalizationContext ctx;
    ctx.schema = schema;
    ctx.mode = j.at("mode").get<std::string>() == "local-set" ? NormalizationMode::LocalSet
                                                              : NormalizationMode::TrainRanges;
    ctx.num_min = j.at("num_min").get<std::vector<double>>();
    ctx.num_max = j.at("num_max").get<std::vector<double>>();
    ctx.offset.assign(schema.arity(), 0);
    size_t off = 0;
    for (size_t i = 0; i < schema.arity(); ++i) {
        ctx.offset[i] = off;
        const auto& spec = schema.at(i);
        if (spec.kind == FeatureKind::Numeric) {
            off += 1;
        } else {
            off += spec.categories.size() == 2 ? 1 : spec.categories.size();
        }
    }
    ctx.dim = off;
    return ctx;
}

json trees_to_json(const std::vector<DecisionTree>& trees) {
    json out = json::array();
    for (const auto& tree : trees) {
        json nodes = json::array();
        for (const auto& n : tree.nodes) {
            nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.leaf_label}));
        }
        out.push_back(std::move(nodes));
    }
    return out;
}

std::vector<DecisionTree> trees_from_json(const json& j) {
    std::vector<DecisionTree> trees;
    for (const auto& jt : j) {
        DecisionTree tree;
        for (const auto& jn : jt) {
            TreeNode n;
            n.feature = jn.at(0).get<int>();
            n.threshold = jn.at(1).get<double>();
            n.left = jn.at(2).get<int>();
            n.right = jn.at(3).get<int>();
            n.leaf_label = jn.at(4).get<int>();
            tree.nodes.push_back(n);
        }
        trees.push_back(std::move(tree));
    }
    return trees;
}

}  // namespace

json model_to_json(const Model& model) {
    json j;
    j["kind"] = model_kind_name(model.kind);
    j["train_seed"] = model.train_seed;
    j["schema"] = schema_to_json(model.schema);
    j["hyperparams"] = hyperparams_to_json(model.hp);
    if (model.kind != ModelKind::RuleXor) {
        j["ctx"] = ctx_to_json(model.ctx);
    }
    if (model.kind == ModelKind::Logistic) {
        j["weights"] = model.weights;
        j["bias"] = model.bias;
    } else if (model.kind == ModelKind::Tree || model.kind == ModelKind::Forest) {
        j["trees"] = trees_to_json(model.trees);
    }
    return j;
}

Model model_from_json(const json& j) {
    Model model;
    model.kind = model_kind_from_name(j.at("kind").get<std::string>());
    model.train_seed = j.at("train_seed").get<uint64_t>();
    model.schema = schema_from_json(j.at("schema"));
    model.hp = hyperparams_from_json(j.at("hyperparams"));
    if (model.kind != ModelKind::RuleXor) {
        model.ctx = ctx_from_json(j.at("ctx"), model.schema);
    }
    if (model.kind == ModelKind::Logistic) {
        model.weights = j.at("weights").get<std::vector<double>>();
        model.bias = j.at("bias").get<double>();
    } else if (model.kind == ModelKind::Tree || model.kind == ModelKind::Forest) {
        model.trees = trees_from_json(j.at("trees"));
    }
    return model;
}

uint64_t model_param_hash(const Model& model) {
    return fnv1a64(model_to_json(model).dump());
}

// --- records / spaces ------------------------------------------------------------

json record_to_json(const ExplanationRecord& rec) {
    json delta = json::array();
    for (const auto& d : rec.delta) {
        json jd;
        jd["changed"] = d.changed;
        if (std::holds_alternative<double>(d.new_value)) {
            jd["new_value"] = std::get<double>(d.new_value);
            jd["numeric_diff"] = d.numeric_diff;
        } else {
            jd["new_value"] = std::get<std::string>(d.new_value);
        }
        delta.push_back(std::move(jd));
    }
    json prov;
    prov["model_index"] = rec.provenance.model_index;
    prov["method_index"] = rec.provenance.method_index;
    prov["seed_index"] = rec.provenance.seed_index;
    prov["emission_index"] = rec.provenance.emission_index;
    prov["model_id"] = rec.provenance.model_id;
    prov["method_id"] = rec.provenance.method_id;
    prov["method_seed"] = rec.provenance.method_seed;

    json j;
    j["id"] = rec.id;
    j["factual"] = instance_to_json(rec.factual);
    j["counterfactual"] = instance_to_json(rec.counterfactual);
    j["delta"] = std::move(delta);
    j["provenance"] = std::move(prov);
    return j;
}

ExplanationRecord record_from_json(const json& j, const FeatureSchema& schema) {
    ExplanationRecord rec;
    rec.id = j.at("id").get<size_t>();
    rec.factual = instance_from_json(j.at("factual"), schema);
    rec.counterfactual = instance_from_json(j.at("counterfactual"), schema);
    const auto& jdelta = j.at("delta");
    for (size_t i = 0; i < jdelta.size(); ++i) {
        DeltaEntry d;
        d.changed = jdelta[i].at("changed").get<bool>();
        if (schema.at(i).kind == FeatureKind::Numeric) {
            d.new_value = jdelta[i].at("new_value").get<double>();
            d.numeric_diff = jdelta[i].value("numeric_diff", 0.0);
        } else {
            d.new_value = jdelta[i].at("new_value").get<std::string>();
        }
        rec.delta.push_back(std::move(d));
    }
    const auto& prov = j.at("provenance");
    rec.provenance.model_index = prov.at("model_index").get<size_t>();
    rec.provenance.method_index = prov.at("method_index").get<size_t>();
    rec.provenance.seed_index = prov.at("seed_index").get<size_t>();
    rec.provenance.emission_index = prov.at("emission_index").get<size_t>();
    rec.provenance.model_id = prov.at("model_id").get<std::string>();
    rec.provenance.method_id = prov.at("method_id").get<std::string>();
    rec.provenance.method_seed = prov.at("method_seed").get<uint64_t>();
    return rec;
}

json space_to_json(const ExplanationSpace& space) {
    json records = json::array();
    for (const auto& rec : space.records) records.push_back(record_to_json(rec));
    json failures = json::array();
    for (const auto& f : space.manifest.failures) {
        failures.push_back(json{{"model_index", f.model_index},
                                {"method_index", f.method_index},
                                {"seed_index", f.seed_index},
                                {"seed", f.seed},
                                {"error", f.error}});
    }
    json j;
    j["schema"] = schema_to_json(space.schema);
    j["instance"] = instance_to_json(space.instance);
    j["records"] = std::move(records);
    j["manifest"] = json{{"model_ids", space.manifest.model_ids},
                         {"method_ids", space.manifest.method_ids},
                         {"failures", std::move(failures)},
                         {"dedupe", space.manifest.dedupe}};
    return j;
}

ExplanationSpace space_from_json(const json& j) {
    ExplanationSpace space;
    space.schema = schema_from_json(j.at("schema"));
    space.instance = instance_from_json(j.at("instance"), space.schema);
    for (const auto& jr : j.at("records")) {
        space.records.push_back(record_from_json(jr, space.schema));
    }
    const auto& m = j.at("manifest");
    space.manifest.model_ids = m.at("model_ids").get<std::vector<std::string>>();
    space.manifest.method_ids = m.at("method_ids").get<std::vector<std::string>>();
    for (const auto& jf : m.at("failures")) {
        GenerationFailure f;
        f.model_index = jf.at("model_index").get<size_t>();
        f.method_index = jf.at("method_index").get<size_t>();
        f.seed_index = jf.at("seed_index").get<size_t>();
        f.seed = jf.at("seed").get<uint64_t>();
        f.error = jf.at("error").get<std::string>();
        space.manifest.failures.push_back(std::move(f));
    }
    space.manifest.dedupe = m.at("dedupe").get<bool>();
    return space;
}

// --- utilities / methods / statements ----------------------------------------------

json utility_spec_to_json(const UtilitySpec& spec) {
    json j;
    j["kind"] = utility_kind_name(spec.kind);
    switch (spec.kind) {
        case UtilityKind::Sparsity:
            break;
        case UtilityKind::L2Normalized:
        case UtilityKind::HeomNegative:
            j["normalization"] =
                spec.normalization == NormalizationMode::LocalSet ? "local-set" : "train-ranges";
            break;
        case UtilityKind::Im1Negative:
            j["k"] = spec.im1_components;
            j["epsilon"] = spec.im1_epsilon;
            break;
        case UtilityKind::Penalized:
            j["base"] = utility_spec_to_json(*spec.base);
            j["sensitive"] = spec.sensitive;
            j["penalty_mode"] = spec.penalty_mode == PenaltyMode::HardConstant
                                    ? "hard-constant"
                                    : "sparsity-saturating";
            if (spec.penalty_mode == PenaltyMode::HardConstant) {
                j["penalty_value"] = spec.penalty_value;
            }
            break;
    }
    return j;
}

UtilitySpec utility_spec_from_json(const json& j) {
    UtilitySpec spec;
    spec.kind = utility_kind_from_name(j.at("kind").get<std::string>());
    switch (spec.kind) {
        case UtilityKind::Sparsity:
            break;
        case UtilityKind::L2Normalized:
        case UtilityKind::HeomNegative:
            spec.normalization = j.value("normalization", std::string("train-ranges")) ==
                                         "local-set"
                                     ? NormalizationMode::LocalSet
                                     : NormalizationMode::TrainRanges;
            break;
        case UtilityKind::Im1Negative:
            spec.im1_components = j.value("k", spec.im1_components);
            spec.im1_epsilon = j.value("epsilon", spec.im1_epsilon);
            break;
        case UtilityKind::Penalized: {
            spec.base = std::make_shared<UtilitySpec>(utility_spec_from_json(j.at("base")));
            spec.sensitive = j.at("sensitive").get<std::vector<std::string>>();
            const std::string mode = j.at("penalty_mode").get<std::string>();
            if (mode == "hard-constant") {
                spec.penalty_mode = PenaltyMode::HardConstant;
                spec.penalty_value = j.value("penalty_value", spec.penalty_value);
            } else if (mode == "sparsity-saturating") {
                spec.penalty_mode = PenaltyMode::SparsitySaturating;
            } else {
                throw ParseError("unknown penalty mode '" + mode + "'");
            }
            break;
        }
    }
    return spec;
}

json mask_to_json(const FeatureMask& mask, const FeatureSchema& schema) {
    json editable = json::array();
    for (size_t i = 0; i < mask.editable.size(); ++i) {
        if (mask.editable[i]) editable.push_back(schema.at(i).name);
    }
    return json{{"editable", std::move(editable)}};
}

FeatureMask mask_from_json(const json& j, const FeatureSchema& schema) {
    FeatureMask mask;
    mask.editable.assign(schema.arity(), false);
    for (const auto& name : j.at("editable")) {
        mask.editable[schema.index_of(name.get<std::string>())] = true;
    }
    mask.validate(schema);
    return mask;
}

json method_config_to_json(const MethodConfig& cfg, const FeatureSchema& schema) {
    json j;
    j["kind"] = method_kind_name(cfg.kind);
    j["mask"] = mask_to_json(cfg.mask, schema);
    j["budget"] = json{{"attempts_per_level", cfg.budget.attempts_per_level},
                       {"max_level", cfg.budget.max_level}};
    j["seeds"] = cfg.seeds;
    if (cfg.kind == MethodKind::Exhaustive) {
        j["grid_steps"] = cfg.grid_steps;
        j["grid_cap"] = cfg.grid_cap;
    }
    return j;
}

MethodConfig method_config_from_json(const json& j, const FeatureSchema& schema) {
    MethodConfig cfg;
    cfg.kind = method_kind_from_name(j.at("kind").get<std::string>());
    cfg.mask = mask_from_json(j.at("mask"), schema);
    cfg.budget.attempts_per_level = j.at("budget").at("attempts_per_level").get<size_t>();
    cfg.budget.max_level = j.at("budget").at("max_level").get<size_t>();
    cfg.seeds = j.at("seeds").get<std::vector<uint64_t>>();
    cfg.grid_steps = j.value("grid_steps", cfg.grid_steps);
    cfg.grid_cap = j.value("grid_cap", cfg.grid_cap);
    return cfg;
}

json dataset_ref_to_json(const DatasetRef& ref) {
    json j;
    j["kind"] = ref.kind;
    if (ref.kind == "csv") {
        j["path"] = ref.path;
        j["schema_path"] = ref.schema_path;
    } else {
        j["n"] = ref.n;
        j["seed"] = ref.seed;
    }
    return j;
}

DatasetRef dataset_ref_from_json(const json& j) {
    DatasetRef ref;
    ref.kind = j.at("kind").get<std::string>();
    if (ref.kind == "csv") {
        ref.path = j.at("path").get<std::string>();
        ref.schema_path = j.at("schema_path").get<std::string>();
    } else {
        ref.n = j.at("n").get<size_t>();
        ref.seed = j.at("seed").get<uint64_t>();
    }
    return ref;
}

namespace {

std::string component_status_name(ComponentStatus s) {
    return s == ComponentStatus::Stated ? "stated" : "estimated";
}

ComponentStatus component_status_from_name(const std::string& name) {
    if (name == "stated") return ComponentStatus::Stated;
    if (name == "estimated") return ComponentStatus::Estimated;
    throw ParseError("unknown component status '" + name + "'");
}

}  // namespace

json statement_to_json(const SpecStatement& statement, const FeatureSchema& schema) {
    json models = json::array();
    for (const auto& m : statement.models) {
        models.push_back(json{{"kind", model_kind_name(m.kind)},
                              {"hyperparams", hyperparams_to_json(m.hp)},
                              {"seed", m.seed},
                              {"param_hash", m.param_hash}});
    }
    json methods = json::array();
    for (const auto& m : statement.methods) methods.push_back(method_config_to_json(m, schema));

    json j;
    j["status"] = json{{"models", component_status_name(statement.models_status)},
                       {"methods", component_status_name(statement.methods_status)},
                       {"utility", component_status_name(statement.utility_status)}};
    j["dataset"] = dataset_ref_to_json(statement.dataset);
    j["train_count"] = statement.train_count;
    j["models"] = std::move(models);
    j["methods"] = std::move(methods);
    j["utility"] = utility_spec_to_json(statement.utility);
    j["tiebreak"] = statement.tiebreak;
    j["instances"] = statement.instance_indices;
    return j;
}

SpecStatement statement_from_json(const json& j, const FeatureSchema& schema) {
    SpecStatement st;
    const auto& status = j.at("status");
    st.models_status = component_status_from_name(status.at("models").get<std::string>());
    st.methods_status = component_status_from_name(status.at("methods").get<std::string>());
    st.utility_status = component_status_from_name(status.at("utility").get<std::string>());
    st.dataset = dataset_ref_from_json(j.at("dataset"));
    st.train_count = j.at("train_count").get<size_t>();
    for (const auto& jm : j.at("models")) {
        StatedModel m;
        m.kind = model_kind_from_name(jm.at("kind").get<std::string>());
        m.hp = hyperparams_from_json(jm.at("hyperparams"));
        m.seed = jm.at("seed").get<uint64_t>();
        m.param_hash = jm.at("param_hash").get<uint64_t>();
        st.models.push_back(m);
    }
    for (const auto& jm : j.at("methods")) {
        st.methods.push_back(method_config_from_json(jm, schema));
    }
    st.utility = utility_spec_from_json(j.at("utility"));
    st.tiebreak = j.at("tiebreak").get<std::string>();
    st.instance_indices = j.at("instances").get<std::vector<size_t>>();
    return st;
}

json reported_to_json(const std::vector<ReportedExplanation>& reported) {
    json out = json::array();
    for (const auto& rep : reported) {
        out.push_back(json{{"instance_index", rep.instance_index},
                           {"record", record_to_json(rep.record)},
                           {"fallback_used", rep.fallback_used}});
    }
    return json{{"reported", std::move(out)}};
}

std::vector<ReportedExplanation> reported_from_json(const json& j, const FeatureSchema& schema) {
    std::vector<ReportedExplanation> out;
    for (const auto& jr : j.at("reported")) {
        ReportedExplanation rep;
        rep.instance_index = jr.at("instance_index").get<size_t>();
        rep.record = record_from_json(jr.at("record"), schema);
        rep.fallback_used = jr.at("fallback_used").get<bool>();
        out.push_back(std::move(rep));
    }
    return out;
}

json audit_report_to_json(const AuditReport& report) {
    json verdicts = json::array();
    for (const auto& v : report.verdicts()) {
        json jv;
        jv["instance"] = v.instance_index;
        jv["verdict"] = verdict_name(v.verdict);
        if (v.witness_id) jv["witness_id"] = *v.witness_id;
        if (v.reported_rank > 0) jv["reported_rank"] = v.reported_rank;
        jv["reported_utility"] = v.reported_utility;
        jv["witness_utility"] = v.witness_utility;
        jv["evidence"] = v.evidence;
        verdicts.push_back(std::move(jv));
    }
    json summary = json::object();
    for (const auto& [key, value] : report.summary()) summary[key] = value;

    json j;
    j["access"] = access_level_name(report.access());
    j["verdicts"] = std::move(verdicts);
    j["flagged"] = report.flagged();
    j["summary"] = std::move(summary);
    return j;
}

json sweep_results_to_json(const std::vector<SweepResult>& runs) {
    json out = json::array();
    for (const auto& run : runs) {
        out.push_back(json{{"varied", sweep_varied_name(run.desc.varied)},
                           {"mask", mask_setting_name(run.desc.mask_setting)},
                           {"method", run.desc.method},
                           {"model_seed", run.desc.model_seed},
                           {"cf_seed", run.desc.cf_seed},
                           {"instances", run.instances},
                           {"failures", run.failures},
                           {"mean_sparsity", run.mean_sparsity},
                           {"mean_heom", run.mean_heom},
                           {"mean_im1", run.mean_im1}});
    }
    return json{{"runs", std::move(out)}};
}

json sweep_summary_to_json(const SweepSummary& summary) {
    json groups = json::array();
    for (const auto& g : summary.groups) {
        groups.push_back(json{{"group", g.group},
                              {"runs", g.runs},
                              {"sparsity", json{{"mean", g.sparsity_mean},
                                                {"min", g.sparsity_min},
                                                {"max", g.sparsity_max}}},
                              {"heom", json{{"mean", g.heom_mean},
                                            {"min", g.heom_min},
                                            {"max", g.heom_max}}},
                              {"im1", json{{"mean", g.im1_mean},
                                           {"min", g.im1_min},
                                           {"max", g.im1_max}}}});
    }
    json pairs = json::array();
    for (const auto& p : summary.pairs) {
        pairs.push_back(json{{"varied", sweep_varied_name(p.varied)},
                             {"seed", p.seed},
                             {"sparsity_all", p.sparsity_all},
                             {"sparsity_restricted", p.sparsity_restricted},
                             {"restricted_lower", p.restricted_lower}});
    }
    return json{{"groups", std::move(groups)},
                {"pairs", std::move(pairs)},
                {"restricted_lower_fraction", summary.restricted_lower_fraction}};
}

void write_artifact(const std::string& path, json payload, const std::string& format,
                    const std::string& config_hash) {
    payload["_meta"] = json{{"format", format},
                            {"tool_version", kToolVersion},
                            {"config_hash", config_hash}};
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw Error("cannot open '" + path + "' for writing");
    out << payload.dump(2) << "\n";
}

json read_artifact(const std::string& path, const std::string& expected_format) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw ParseError("cannot open artifact '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& err) {
        throw ParseError("malformed JSON in '" + path + "': " + err.what());
    }
    const std::string format = j.value("_meta", json::object()).value("format", "");
    if (format != expected_format) {
        throw ParseError("'" + path + "' has format '" + format + "', expected '" +
                         expected_format + "'");
    }
    return j;
}

void write_csv_table(const std::string& path, const std::string& config_hash,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw Error("cannot open '" + path + "' for writing");
    out << "# config_hash=" << config_hash << " tool_version=" << kToolVersion << "\n";
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << "\n";
    }
}

}  // namespace cfaudit
