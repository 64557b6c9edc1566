#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfaudit/lp.hpp"
#include "cfaudit/ranking.hpp"

namespace cfaudit {

enum class AccessLevel { Full, Partial, ExplanationOnly };
enum class Verdict { Conformant, CherryPicked, Inconsistent, Indeterminate };

std::string access_level_name(AccessLevel level);
AccessLevel access_level_from_name(const std::string& name);
std::string verdict_name(Verdict v);

// The verdict vocabulary per access level. Only full procedural access may
// conclude anything positive about an individual reported explanation;
// partial and explanation-only audits can at most fail to refute, so their
// strongest verdict is Indeterminate. "Certified not cherry-picked" is not a
// verdict at all: certificates exist only for fully enumerated spaces, via
// certify_top_rank.
bool verdict_allowed(AccessLevel level, Verdict verdict);

struct InstanceVerdict {
    size_t instance_index = 0;
    Verdict verdict = Verdict::Indeterminate;
    std::optional<size_t> witness_id;  // strictly better-ranked record, cherry-picked only
    size_t reported_rank = 0;          // full access only
    double reported_utility = 0.0;
    double witness_utility = 0.0;
    std::string evidence;
};

class AuditReport {
public:
    explicit AuditReport(AccessLevel access) : access_(access) {}

    AccessLevel access() const { return access_; }
    const std::vector<InstanceVerdict>& verdicts() const { return verdicts_; }
    const std::vector<size_t>& flagged() const { return flagged_; }
    const std::vector<std::pair<std::string, double>>& summary() const { return summary_; }

    // Enforces the vocabulary above; a verdict outside the access level's
    // set throws instead of being recorded.
    void add_verdict(InstanceVerdict v);
    void add_summary(const std::string& key, double value);

    bool any_findings() const;  // any cherry-picked or inconsistent verdict

private:
    AccessLevel access_;
    std::vector<InstanceVerdict> verdicts_;
    std::vector<size_t> flagged_;
    std::vector<std::pair<std::string, double>> summary_;
};

// What a provider handed over for one audited instance.
struct ReportedExplanation {
    size_t instance_index = 0;
    ExplanationRecord record;
    bool fallback_used = false;
};

// Full procedural access: rebuild the space per the statement, rank under
// the stated utility and tie-break, and flag exactly the instances whose
// reported record is not rank-1. Every flag carries the rank-1 witness.
// `dataset` is the full dataset the statement's DatasetRef describes; rows
// [0, train_count) are the training split.
// Throws RegenerationMismatch when a stated model hash does not match the
// retrained model; a reported record missing from its regenerated space
// yields a per-instance Inconsistent verdict.
AuditReport audit_full(const SpecStatement& statement,
                       const std::vector<ReportedExplanation>& reported,
                       const Dataset& dataset);

// --- distribution comparison over seed sweeps -------------------------------

enum class SweepVaried { Baseline, ModelSeed, CfSeed, Method };
enum class MaskSetting { All, Restricted };

std::string sweep_varied_name(SweepVaried v);
std::string mask_setting_name(MaskSetting m);

struct SweepRunDescriptor {
    SweepVaried varied = SweepVaried::Baseline;
    MaskSetting mask_setting = MaskSetting::All;
    std::string method = "dice_random";
    uint64_t model_seed = 0;
    uint64_t cf_seed = 0;
};

// Mean quality metrics of one run (one realisation of model seed, method
// seed and mask) over a fixed audited instance list.
struct SweepResult {
    SweepRunDescriptor desc;
    size_t instances = 0;
    size_t failures = 0;
    double mean_sparsity = 0.0;  // mean changed-feature count
    double mean_heom = 0.0;
    double mean_im1 = 0.0;
    std::vector<double> sparsity_values;  // per instance, generation order
    std::vector<double> heom_values;
    std::vector<double> im1_values;
};

struct SweepRunSpec {
    SweepRunDescriptor desc;
    StatedModel model;
    MethodConfig method;  // single realisation; desc.cf_seed is the seed used
};

// Trains the run's model and generates one explanation per instance,
// recording sparsity / HEOM / IM1. Instances that fail generation are
// excluded from the means and counted.
SweepResult execute_sweep_run(const SweepRunSpec& spec, const Dataset& train,
                              const std::vector<Instance>& instances,
                              const NormalizationContext& heom_ctx, const ReconPair& recon,
                              double im1_eps);

struct GroupSummary {
    std::string group;  // "<varied>/<mask>"
    size_t runs = 0;
    double sparsity_mean = 0.0, sparsity_min = 0.0, sparsity_max = 0.0;
    double heom_mean = 0.0, heom_min = 0.0, heom_max = 0.0;
    double im1_mean = 0.0, im1_min = 0.0, im1_max = 0.0;
};

struct PairRow {
    SweepVaried varied = SweepVaried::ModelSeed;
    uint64_t seed = 0;
    double sparsity_all = 0.0;
    double sparsity_restricted = 0.0;
    bool restricted_lower = false;
};

struct SweepSummary {
    std::vector<GroupSummary> groups;
    std::vector<PairRow> pairs;  // all/restricted runs matched by seed
    double restricted_lower_fraction = 0.0;
};

// Throws InsufficientSweep on fewer than two runs.
SweepSummary summarize_sweep(const std::vector<SweepResult>& runs);

// Exact empirical-CDF sup distance in [0,1]; symmetric.
double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

// Permutation p-value of the KS statistic under seeded label shuffles, with
// the add-one correction (count+1)/(iterations+1).
double permutation_p(const std::vector<double>& a, const std::vector<double>& b,
                     size_t iterations, uint64_t seed);

struct PartialSweepConfig {
    std::vector<uint64_t> seeds;  // realisations of the estimated component
    size_t min_runs = 2;
    double alpha = 0.05;
    size_t permutation_iterations = 1000;
    uint64_t permutation_seed = 0;
};

// Partial procedural access: sweep the estimated component (model seed or
// method seed, per the statement's status flags) and compare the reported
// explanations' metrics against the sweep distribution. Reported means
// inside the sweep's empirical range are Indeterminate; means outside it
// are Inconsistent only when a permutation test on the per-instance values
// rejects at alpha, and Indeterminate otherwise. No outcome of this audit
// can assert that cherry-picking did not occur.
AuditReport audit_partial(const SpecStatement& statement,
                          const std::vector<ReportedExplanation>& reported,
                          const PartialSweepConfig& sweep, const Dataset& dataset);

// --- explanation-only access -------------------------------------------------

// Labeled boundary points implied by reported explanations: each report
// contributes its factual and counterfactual with opposite classes.
struct BoundaryClaim {
    std::vector<std::vector<double>> points;      // encoded coordinates
    std::vector<int> labels;                      // {0,1}
    std::vector<size_t> instance_of_point;        // originating audited instance
    std::string model_class = "linear";           // "linear" or "capacity:<d>"

    static BoundaryClaim from_reports(const std::vector<ReportedExplanation>& reported,
                                      const NormalizationContext& ctx,
                                      const std::string& model_class);
};

struct RealizabilityResult {
    bool realizable = false;
    std::vector<double> weights;  // witness, realizable only
    double bias = 0.0;
    std::vector<size_t> infeasible_subset;  // point indices, unrealizable only
};

// Decides whether any hyperplane classifies every claimed point consistently
// with positive margin. Realizable returns witness weights; unrealizable
// returns an irreducible infeasible subsystem found by a deletion filter.
// Requires model_class == "linear".
RealizabilityResult linear_realizability(const BoundaryClaim& claim, double eps = 1e-9);

// Wraps linear_realizability into the verdict machinery. Non-linear
// capacity descriptors are accepted but undecided: every verdict is
// Indeterminate with the reason recorded. An unrealizable linear claim
// yields Inconsistent verdicts for the instances whose points appear in the
// infeasible subsystem.
AuditReport audit_explanation_only(const std::vector<ReportedExplanation>& reported,
                                   const NormalizationContext& ctx,
                                   const std::string& model_class);

}  // namespace cfaudit
