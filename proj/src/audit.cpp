#include "cfaudit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cfaudit/rng.hpp"
#include "cfaudit/serialize.hpp"

namespace cfaudit {

std::string access_level_name(AccessLevel level) {
    switch (level) {
        case AccessLevel::Full: return "full";
        case AccessLevel::Partial: return "partial";
        case AccessLevel::ExplanationOnly: return "explanation-only";
    }
    return "unknown";
}

AccessLevel access_level_from_name(const std::string& name) {
    if (name == "full") return AccessLevel::Full;
    if (name == "partial") return AccessLevel::Partial;
    if (name == "explanation-only") return AccessLevel::ExplanationOnly;
    throw ParseError("unknown access level '" + name + "'");
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Conformant: return "conformant";
        case Verdict::CherryPicked: return "cherry-picked";
        case Verdict::Inconsistent: return "inconsistent";
        case Verdict::Indeterminate: return "indeterminate";
    }
    return "unknown";
}

bool verdict_allowed(AccessLevel level, Verdict verdict) {
    switch (level) {
        case AccessLevel::Full:
            return true;
        case AccessLevel::Partial:
        case AccessLevel::ExplanationOnly:
            // No positive per-instance conclusion without the full stated
            // pipeline: Conformant and CherryPicked both presume the space
            // and ranking were reconstructed exactly.
            return verdict == Verdict::Inconsistent || verdict == Verdict::Indeterminate;
    }
    return false;
}

void AuditReport::add_verdict(InstanceVerdict v) {
    if (!verdict_allowed(access_, v.verdict)) {
        throw Error("verdict '" + verdict_name(v.verdict) + "' is not in the vocabulary of " +
                    access_level_name(access_) + " access");
    }
    if (v.verdict == Verdict::CherryPicked && !v.witness_id) {
        throw Error("a cherry-picked verdict requires a witness record");
    }
    if (v.verdict == Verdict::Inconsistent && v.evidence.empty()) {
        throw Error("an inconsistent verdict requires evidence");
    }
    if (v.verdict == Verdict::CherryPicked || v.verdict == Verdict::Inconsistent) {
        flagged_.push_back(v.instance_index);
    }
    verdicts_.push_back(std::move(v));
}

void AuditReport::add_summary(const std::string& key, double value) {
    summary_.emplace_back(key, value);
}

bool AuditReport::any_findings() const {
    return !flagged_.empty();
}

// --- full access ---------------------------------------------------------------

namespace {

Dataset training_split(const Dataset& dataset, size_t train_count) {
    if (train_count == 0 || train_count > dataset.rows.size()) {
        throw Error("statement train_count outside the dataset");
    }
    Dataset train;
    train.schema = dataset.schema;
    train.provenance = dataset.provenance;
    train.rows.assign(dataset.rows.begin(),
                      dataset.rows.begin() + static_cast<long>(train_count));
    return train;
}

const ReportedExplanation* find_report(const std::vector<ReportedExplanation>& reported,
                                       size_t instance_index) {
    for (const auto& rep : reported) {
        if (rep.instance_index == instance_index) return &rep;
    }
    return nullptr;
}

// Locates the reported record inside the regenerated space by provenance
// tuple; nullptr when no realisation matches.
const ExplanationRecord* match_record(const ExplanationSpace& space,
                                      const ExplanationRecord& reported) {
    for (const auto& rec : space.records) {
        const auto& a = rec.provenance;
        const auto& b = reported.provenance;
        if (a.model_index == b.model_index && a.method_index == b.method_index &&
            a.seed_index == b.seed_index && a.emission_index == b.emission_index) {
            return &rec;
        }
    }
    return nullptr;
}

}  // namespace

AuditReport audit_full(const SpecStatement& statement,
                       const std::vector<ReportedExplanation>& reported,
                       const Dataset& dataset) {
    if (!statement.complete()) {
        throw Error("audit_full requires a complete statement (all components stated)");
    }
    const Dataset train = training_split(dataset, statement.train_count);

    std::vector<Model> models;
    for (const auto& stated : statement.models) {
        Model model = train_stated_model(stated, train);
        const uint64_t hash = model_param_hash(model);
        if (stated.param_hash != 0 && hash != stated.param_hash) {
            throw RegenerationMismatch("retrained model " + model_id(model) +
                                       " does not match the stated parameter hash");
        }
        models.push_back(std::move(model));
    }

    AuditReport report(AccessLevel::Full);
    size_t conformant = 0;
    size_t cherry = 0;
    size_t inconsistent = 0;

    for (size_t idx : statement.instance_indices) {
        if (idx >= dataset.rows.size()) throw Error("audited instance index outside the dataset");
        const ReportedExplanation* rep = find_report(reported, idx);
        if (rep == nullptr) {
            throw Error("reported explanations do not cover instance " + std::to_string(idx));
        }
        const Instance& x = dataset.rows[idx];

        const ExplanationSpace space = build_space(models, statement.methods, x, train);
        const RecordUtility utility =
            utility_from_spec(statement.utility, dataset.schema, &train, space);
        const Ranking ranking = rank(space, utility);

        const ExplanationRecord* matched = match_record(space, rep->record);
        InstanceVerdict verdict;
        verdict.instance_index = idx;
        if (matched == nullptr ||
            !matched->counterfactual.same_values(rep->record.counterfactual)) {
            verdict.verdict = Verdict::Inconsistent;
            verdict.evidence =
                matched == nullptr
                    ? "no stated realisation produces the reported provenance"
                    : "regenerated record for this provenance differs from the reported values";
            ++inconsistent;
        } else {
            const CherryPickResult result = is_cherry_picked(ranking, *matched);
            if (result.cherry_picked) {
                verdict.verdict = Verdict::CherryPicked;
                verdict.witness_id = result.witness_id;
                verdict.reported_rank = result.rank;
                verdict.reported_utility = ranking.utilities[matched->id - 1];
                verdict.witness_utility = ranking.utilities[*result.witness_id - 1];
                verdict.evidence = "rank " + std::to_string(result.rank) + " > 1; witness id " +
                                   std::to_string(*result.witness_id);
                ++cherry;
            } else {
                verdict.verdict = Verdict::Conformant;
                verdict.reported_rank = 1;
                verdict.reported_utility = ranking.utilities[matched->id - 1];
                ++conformant;
            }
        }
        report.add_verdict(std::move(verdict));
    }

    report.add_summary("instances", static_cast<double>(statement.instance_indices.size()));
    report.add_summary("conformant", static_cast<double>(conformant));
    report.add_summary("cherry_picked", static_cast<double>(cherry));
    report.add_summary("inconsistent", static_cast<double>(inconsistent));
    return report;
}

// --- sweeps -------------------------------------------------------------------

std::string sweep_varied_name(SweepVaried v) {
    switch (v) {
        case SweepVaried::Baseline: return "baseline";
        case SweepVaried::ModelSeed: return "model-seed";
        case SweepVaried::CfSeed: return "cf-seed";
        case SweepVaried::Method: return "method";
    }
    return "unknown";
}

std::string mask_setting_name(MaskSetting m) {
    return m == MaskSetting::All ? "all" : "restricted";
}

SweepResult execute_sweep_run(const SweepRunSpec& spec, const Dataset& train,
                              const std::vector<Instance>& instances,
                              const NormalizationContext& heom_ctx, const ReconPair& recon,
                              double im1_eps) {
    SweepResult result;
    result.desc = spec.desc;

    StatedModel stated = spec.model;
    stated.seed = spec.desc.model_seed;
    const Model model = train_stated_model(stated, train);

    for (const Instance& x : instances) {
        try {
            ExplanationRecord rec;
            switch (spec.method.kind) {
                case MethodKind::DiceRandom:
                    rec = dice_random(model, x, train, spec.method.mask, spec.method.budget,
                                      spec.desc.cf_seed);
                    break;
                case MethodKind::GreedySparse:
                    rec = greedy_sparse(model, x, train, spec.method.mask);
                    break;
                case MethodKind::Exhaustive:
                    throw Error("exhaustive enumeration is not a sweep method");
            }
            result.sparsity_values.push_back(
                static_cast<double>(changed_count(train.schema, x, rec.counterfactual)));
            result.heom_values.push_back(heom(x, rec.counterfactual, heom_ctx));
            result.im1_values.push_back(
                im1(rec.counterfactual, recon, *rec.counterfactual.label, im1_eps));
        } catch (const CfNotFound&) {
            ++result.failures;
        }
    }
    result.instances = result.sparsity_values.size();
    const auto mean = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    result.mean_sparsity = mean(result.sparsity_values);
    result.mean_heom = mean(result.heom_values);
    result.mean_im1 = mean(result.im1_values);
    return result;
}

SweepSummary summarize_sweep(const std::vector<SweepResult>& runs) {
    if (runs.size() < 2) {
        throw InsufficientSweep("summaries need at least 2 runs, got " +
                                std::to_string(runs.size()));
    }
    SweepSummary summary;

    std::vector<std::string> group_order;
    for (const auto& run : runs) {
        const std::string group =
            sweep_varied_name(run.desc.varied) + "/" + mask_setting_name(run.desc.mask_setting);
        if (std::find(group_order.begin(), group_order.end(), group) == group_order.end()) {
            group_order.push_back(group);
        }
    }
    for (const auto& group : group_order) {
        GroupSummary g;
        g.group = group;
        bool first = true;
        for (const auto& run : runs) {
            const std::string rg = sweep_varied_name(run.desc.varied) + "/" +
                                   mask_setting_name(run.desc.mask_setting);
            if (rg != group) continue;
            ++g.runs;
            g.sparsity_mean += run.mean_sparsity;
            g.heom_mean += run.mean_heom;
            g.im1_mean += run.mean_im1;
            if (first) {
                g.sparsity_min = g.sparsity_max = run.mean_sparsity;
                g.heom_min = g.heom_max = run.mean_heom;
                g.im1_min = g.im1_max = run.mean_im1;
                first = false;
            } else {
                g.sparsity_min = std::min(g.sparsity_min, run.mean_sparsity);
                g.sparsity_max = std::max(g.sparsity_max, run.mean_sparsity);
                g.heom_min = std::min(g.heom_min, run.mean_heom);
                g.heom_max = std::max(g.heom_max, run.mean_heom);
                g.im1_min = std::min(g.im1_min, run.mean_im1);
                g.im1_max = std::max(g.im1_max, run.mean_im1);
            }
        }
        g.sparsity_mean /= static_cast<double>(g.runs);
        g.heom_mean /= static_cast<double>(g.runs);
        g.im1_mean /= static_cast<double>(g.runs);
        summary.groups.push_back(std::move(g));
    }

    // Restricted-vs-all pairs share (varied, method, model seed, cf seed).
    size_t lower = 0;
    for (const auto& all_run : runs) {
        if (all_run.desc.mask_setting != MaskSetting::All) continue;
        for (const auto& restricted : runs) {
            if (restricted.desc.mask_setting != MaskSetting::Restricted) continue;
            if (restricted.desc.varied != all_run.desc.varied ||
                restricted.desc.method != all_run.desc.method ||
                restricted.desc.model_seed != all_run.desc.model_seed ||
                restricted.desc.cf_seed != all_run.desc.cf_seed) {
                continue;
            }
            PairRow pair;
            pair.varied = all_run.desc.varied;
            pair.seed = all_run.desc.varied == SweepVaried::CfSeed ? all_run.desc.cf_seed
                                                                   : all_run.desc.model_seed;
            pair.sparsity_all = all_run.mean_sparsity;
            pair.sparsity_restricted = restricted.mean_sparsity;
            pair.restricted_lower = restricted.mean_sparsity < all_run.mean_sparsity;
            lower += static_cast<size_t>(pair.restricted_lower);
            summary.pairs.push_back(pair);
        }
    }
    summary.restricted_lower_fraction =
        summary.pairs.empty() ? 0.0
                              : static_cast<double>(lower) / static_cast<double>(summary.pairs.size());
    return summary;
}

double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw EmptySample("ks_two_sample needs non-empty samples");
    std::vector<double> sa(a);
    std::vector<double> sb(b);
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    size_t i = 0;
    size_t j = 0;
    double sup = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double v = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= v) ++i;
        while (j < sb.size() && sb[j] <= v) ++j;
        const double fa = static_cast<double>(i) / static_cast<double>(sa.size());
        const double fb = static_cast<double>(j) / static_cast<double>(sb.size());
        sup = std::max(sup, std::abs(fa - fb));
    }
    return sup;
}

double permutation_p(const std::vector<double>& a, const std::vector<double>& b,
                     size_t iterations, uint64_t seed) {
    if (a.empty() || b.empty()) throw EmptySample("permutation_p needs non-empty samples");
    if (iterations == 0) throw Error("permutation_p needs at least one iteration");
    const double observed = ks_two_sample(a, b);

    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    Rng rng(seed);
    size_t at_least = 0;
    std::vector<double> pa(a.size());
    std::vector<double> pb(b.size());
    for (size_t it = 0; it < iterations; ++it) {
        for (size_t i = pooled.size(); i > 1; --i) {
            std::swap(pooled[i - 1], pooled[rng.uniform_index(i)]);
        }
        std::copy(pooled.begin(), pooled.begin() + static_cast<long>(a.size()), pa.begin());
        std::copy(pooled.begin() + static_cast<long>(a.size()), pooled.end(), pb.begin());
        if (ks_two_sample(pa, pb) >= observed - 1e-12) ++at_least;
    }
    return static_cast<double>(at_least + 1) / static_cast<double>(iterations + 1);
}

// --- partial access -------------------------------------------------------------

AuditReport audit_partial(const SpecStatement& statement,
                          const std::vector<ReportedExplanation>& reported,
                          const PartialSweepConfig& sweep, const Dataset& dataset) {
    if (statement.complete()) {
        throw Error("audit_partial requires at least one estimated component");
    }
    if (statement.models.empty() || statement.methods.empty()) {
        throw Error("statement must describe at least one model and method");
    }
    if (sweep.seeds.size() < sweep.min_runs) {
        throw InsufficientSweep("sweep of size " + std::to_string(sweep.seeds.size()) +
                                " is below the minimum of " + std::to_string(sweep.min_runs));
    }
    const Dataset train = training_split(dataset, statement.train_count);
    std::vector<Instance> instances;
    for (size_t idx : statement.instance_indices) {
        if (idx >= dataset.rows.size()) throw Error("audited instance index outside the dataset");
        instances.push_back(dataset.rows[idx]);
    }

    const NormalizationContext heom_ctx =
        make_normalization(train.schema, train.rows, NormalizationMode::TrainRanges);
    const ReconPair recon = fit_recon(train, 2, 0);
    const double im1_eps = 1e-6;

    // Sweep the estimated component; stated components stay fixed. When the
    // model is estimated the model seed varies; otherwise the method seed.
    const bool vary_model = statement.models_status == ComponentStatus::Estimated;
    std::vector<SweepResult> runs;
    for (uint64_t seed : sweep.seeds) {
        SweepRunSpec spec;
        spec.model = statement.models[0];
        spec.method = statement.methods[0];
        spec.desc.varied = vary_model ? SweepVaried::ModelSeed : SweepVaried::CfSeed;
        spec.desc.mask_setting = MaskSetting::All;
        spec.desc.method = method_kind_name(spec.method.kind);
        spec.desc.model_seed = vary_model ? seed : statement.models[0].seed;
        spec.desc.cf_seed =
            vary_model ? (spec.method.seeds.empty() ? 0 : spec.method.seeds[0]) : seed;
        runs.push_back(execute_sweep_run(spec, train, instances, heom_ctx, recon, im1_eps));
    }

    // Per-instance metrics of what the provider actually reported.
    std::vector<double> rep_sparsity;
    std::vector<double> rep_heom;
    std::vector<double> rep_im1;
    for (size_t idx : statement.instance_indices) {
        const ReportedExplanation* rep = find_report(reported, idx);
        if (rep == nullptr) {
            throw Error("reported explanations do not cover instance " + std::to_string(idx));
        }
        const Instance& x = dataset.rows[idx];
        const Instance& e = rep->record.counterfactual;
        rep_sparsity.push_back(static_cast<double>(changed_count(train.schema, x, e)));
        rep_heom.push_back(heom(x, e, heom_ctx));
        int e_class = e.label ? *e.label : 1;
        rep_im1.push_back(im1(e, recon, e_class, im1_eps));
    }

    struct MetricCheck {
        std::string name;
        const std::vector<double>* reported_values;
        double reported_mean;
        double sweep_min, sweep_max;
        bool outside;
        double p = 1.0;
    };
    const auto mean = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };

    std::vector<MetricCheck> checks = {
        {"sparsity", &rep_sparsity, mean(rep_sparsity), 0, 0, false, 1.0},
        {"heom", &rep_heom, mean(rep_heom), 0, 0, false, 1.0},
        {"im1", &rep_im1, mean(rep_im1), 0, 0, false, 1.0},
    };
    for (auto& check : checks) {
        std::vector<double> run_means;
        std::vector<double> pooled;
        for (const auto& run : runs) {
            const std::vector<double>* vals = check.name == "sparsity" ? &run.sparsity_values
                                              : check.name == "heom"   ? &run.heom_values
                                                                       : &run.im1_values;
            run_means.push_back(check.name == "sparsity" ? run.mean_sparsity
                                : check.name == "heom"   ? run.mean_heom
                                                         : run.mean_im1);
            pooled.insert(pooled.end(), vals->begin(), vals->end());
        }
        check.sweep_min = *std::min_element(run_means.begin(), run_means.end());
        check.sweep_max = *std::max_element(run_means.begin(), run_means.end());
        check.outside =
            check.reported_mean < check.sweep_min || check.reported_mean > check.sweep_max;
        if (check.outside) {
            check.p = permutation_p(*check.reported_values, pooled,
                                    sweep.permutation_iterations, sweep.permutation_seed);
        }
    }

    bool inconsistent = false;
    std::string evidence;
    for (const auto& check : checks) {
        if (check.outside && check.p < sweep.alpha) {
            inconsistent = true;
            evidence += (evidence.empty() ? "" : "; ") + check.name + " mean " +
                        std::to_string(check.reported_mean) + " outside sweep range [" +
                        std::to_string(check.sweep_min) + ", " + std::to_string(check.sweep_max) +
                        "] with p=" + std::to_string(check.p);
        }
    }

    AuditReport report(AccessLevel::Partial);
    for (size_t idx : statement.instance_indices) {
        InstanceVerdict verdict;
        verdict.instance_index = idx;
        verdict.verdict = inconsistent ? Verdict::Inconsistent : Verdict::Indeterminate;
        verdict.evidence = inconsistent
                               ? evidence
                               : "reported metrics inside the sweep's empirical range";
        report.add_verdict(std::move(verdict));
    }
    report.add_summary("runs", static_cast<double>(runs.size()));
    for (const auto& check : checks) {
        report.add_summary("reported_mean_" + check.name, check.reported_mean);
        report.add_summary("sweep_min_" + check.name, check.sweep_min);
        report.add_summary("sweep_max_" + check.name, check.sweep_max);
        report.add_summary("p_" + check.name, check.p);
    }
    return report;
}

// --- explanation-only access ------------------------------------------------------

BoundaryClaim BoundaryClaim::from_reports(const std::vector<ReportedExplanation>& reported,
                                          const NormalizationContext& ctx,
                                          const std::string& model_class) {
    BoundaryClaim claim;
    claim.model_class = model_class;
    for (const auto& rep : reported) {
        const ExplanationRecord& rec = rep.record;
        if (!rec.factual.label || !rec.counterfactual.label ||
            *rec.factual.label == *rec.counterfactual.label) {
            throw Error("each report must carry opposite factual/counterfactual classes");
        }
        claim.points.push_back(encode(rec.factual, ctx).coords);
        claim.labels.push_back(*rec.factual.label);
        claim.instance_of_point.push_back(rep.instance_index);
        claim.points.push_back(encode(rec.counterfactual, ctx).coords);
        claim.labels.push_back(*rec.counterfactual.label);
        claim.instance_of_point.push_back(rep.instance_index);
    }
    return claim;
}

RealizabilityResult linear_realizability(const BoundaryClaim& claim, double eps) {
    if (claim.points.empty()) throw Error("linear_realizability needs a non-empty claim");
    if (claim.model_class != "linear") {
        throw Error("linear_realizability decides only the 'linear' model class");
    }

    const SeparationResult full = strict_separation(claim.points, claim.labels, eps);
    RealizabilityResult result;
    if (full.feasible) {
        result.realizable = true;
        result.weights = full.weights;
        result.bias = full.bias;
        return result;
    }

    // Deletion filter: drop each point whose removal keeps the system
    // infeasible. One pass leaves an irreducible infeasible subsystem.
    std::vector<size_t> keep(claim.points.size());
    std::iota(keep.begin(), keep.end(), 0);
    for (size_t i = 0; i < claim.points.size(); ++i) {
        std::vector<size_t> trial;
        for (size_t k : keep) {
            if (k != i) trial.push_back(k);
        }
        if (trial.empty()) continue;
        std::vector<std::vector<double>> pts;
        std::vector<int> lbs;
        for (size_t k : trial) {
            pts.push_back(claim.points[k]);
            lbs.push_back(claim.labels[k]);
        }
        if (!strict_separation(pts, lbs, eps).feasible) keep = std::move(trial);
    }
    result.realizable = false;
    result.infeasible_subset = std::move(keep);
    return result;
}

AuditReport audit_explanation_only(const std::vector<ReportedExplanation>& reported,
                                   const NormalizationContext& ctx,
                                   const std::string& model_class) {
    if (reported.empty()) throw Error("explanation-only audit needs reported explanations");
    AuditReport report(AccessLevel::ExplanationOnly);

    if (model_class != "linear") {
        for (const auto& rep : reported) {
            InstanceVerdict v;
            v.instance_index = rep.instance_index;
            v.verdict = Verdict::Indeterminate;
            v.evidence = "capacity descriptor '" + model_class +
                         "' is accepted but not decided; only the linear case has a decision "
                         "procedure";
            report.add_verdict(std::move(v));
        }
        report.add_summary("decided", 0.0);
        return report;
    }

    const BoundaryClaim claim = BoundaryClaim::from_reports(reported, ctx, model_class);
    const RealizabilityResult result = linear_realizability(claim);

    std::set<size_t> flagged_instances;
    if (!result.realizable) {
        for (size_t point : result.infeasible_subset) {
            flagged_instances.insert(claim.instance_of_point[point]);
        }
    }
    for (const auto& rep : reported) {
        InstanceVerdict v;
        v.instance_index = rep.instance_index;
        if (flagged_instances.count(rep.instance_index) > 0) {
            v.verdict = Verdict::Inconsistent;
            v.evidence = "boundary points of this report belong to a subsystem no linear model "
                         "can classify (" +
                         std::to_string(result.infeasible_subset.size()) + " points)";
        } else {
            v.verdict = Verdict::Indeterminate;
            v.evidence = result.realizable
                             ? "claims are linearly realizable; consistency does not rule out "
                               "omittance"
                             : "report not part of the infeasible subsystem";
        }
        report.add_verdict(std::move(v));
    }
    report.add_summary("decided", 1.0);
    report.add_summary("realizable", result.realizable ? 1.0 : 0.0);
    report.add_summary("infeasible_points", static_cast<double>(result.infeasible_subset.size()));
    return report;
}

}  // namespace cfaudit
