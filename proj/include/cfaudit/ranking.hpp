#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cfaudit/generators.hpp"
#include "cfaudit/metrics.hpp"
#include "cfaudit/models.hpp"

namespace cfaudit {

enum class MethodKind { DiceRandom, GreedySparse, Exhaustive };

std::string method_kind_name(MethodKind kind);
MethodKind method_kind_from_name(const std::string& name);

// One stated explanation method: the algorithm plus every knob that pins
// down its realisations. Each (method, seed) pair is a distinct single-valued
// element of the method set; deterministic methods use the seed purely as a
// realisation label.
struct MethodConfig {
    MethodKind kind = MethodKind::DiceRandom;
    FeatureMask mask;
    GenBudget budget;
    std::vector<uint64_t> seeds = {0};
    size_t grid_steps = 5;      // exhaustive only
    size_t grid_cap = 1000000;  // exhaustive only
};

struct GenerationFailure {
    size_t model_index = 0;
    size_t method_index = 0;
    size_t seed_index = 0;
    uint64_t seed = 0;
    std::string error;
};

// What went into a space build, including attempts that produced nothing.
// Failed realisations are excluded from the space but preserved here so an
// auditor can see they were tried.
struct SpaceManifest {
    std::vector<std::string> model_ids;
    std::vector<std::string> method_ids;
    std::vector<GenerationFailure> failures;
    bool dedupe = false;
};

// The finite admissible explanation space at one instance: every record the
// stated models and method realisations produce, with ids 1..n assigned in
// lexicographic provenance order (model, method, seed, emission). Identical
// manifests rebuild identical spaces.
struct ExplanationSpace {
    FeatureSchema schema;
    Instance instance;
    std::vector<ExplanationRecord> records;
    SpaceManifest manifest;

    const ExplanationRecord& by_id(size_t id) const;
};

// Duplicate counterfactual value tuples from different realisations stay as
// distinct records unless dedupe is set.
ExplanationSpace build_space(const std::vector<Model>& models,
                             const std::vector<MethodConfig>& methods, const Instance& x,
                             const Dataset& train, bool dedupe = false);

// Utility values callable on a record of a space. Production code builds one
// from a UtilitySpec; tests may inject arbitrary value maps.
using RecordUtility = std::function<double(const Instance& x, const ExplanationRecord&)>;

RecordUtility utility_from_spec(const UtilitySpec& spec, const FeatureSchema& schema,
                                const Dataset* train, const ExplanationSpace& space);

// A strict total order over the space: utility-consistent, bijective onto
// 1..n, ties broken by ascending id. Holds a pointer to the ranked space,
// which must outlive the ranking.
struct Ranking {
    const ExplanationSpace* space = nullptr;
    std::vector<double> utilities;  // by record position
    std::vector<size_t> order;      // record positions sorted best-first
    std::vector<size_t> rank_of;    // by record position, 1-based

    size_t rank_of_id(size_t id) const;
    const ExplanationRecord& at_rank(size_t r) const;  // r is 1-based
};

Ranking rank(const ExplanationSpace& space, const RecordUtility& utility);

struct CherryPickResult {
    bool cherry_picked = false;
    size_t rank = 0;
    std::optional<size_t> witness_id;  // a strictly better-ranked record when cherry-picked
};

// A record is cherry-picked exactly when its rank exceeds 1; the witness is
// the rank-1 record. Throws NotInSpace when the record does not match the
// ranking's space entry with the same id.
CherryPickResult is_cherry_picked(const Ranking& ranking, const ExplanationRecord& record);

enum class PolicyKind { Honest, SensitiveAvoiding };
enum class PolicyFallback { Error, BestAvailable };

// Honest providers return the rank-1 record. Sensitive-avoiding providers
// return the best-ranked record that edits no sensitive feature, which is
// the rank-1 record under the hard-constant penalized form of the same base
// utility. When every record edits a sensitive feature the fallback decides:
// error out or return the overall rank-1 record flagged as a fallback.
struct ProviderPolicy {
    PolicyKind kind = PolicyKind::Honest;
    std::vector<std::string> sensitive;
    PolicyFallback fallback = PolicyFallback::Error;
};

struct Selection {
    ExplanationRecord record;
    bool fallback_used = false;
};

Selection select(const ProviderPolicy& policy, const Ranking& ranking);

struct UtilityTableEntry {
    size_t record_id = 0;
    double utility = 0.0;
};

// certified == true comes with the full utility table over the space and
// exactly |space| utility evaluations: top rank cannot be certified cheaper
// than by touching every admissible record. certified == false instead
// carries one counterexample found by early exit.
struct TopRankCertificate {
    bool certified = false;
    std::vector<UtilityTableEntry> table;
    std::optional<size_t> counterexample_id;
    size_t evaluations = 0;
};

TopRankCertificate certify_top_rank(const ExplanationSpace& space, const RecordUtility& utility,
                                    const ExplanationRecord& record);

// --- stated specifications -------------------------------------------------

enum class ComponentStatus { Stated, Estimated };

// Self-contained dataset descriptor so an auditor can rebuild training data.
struct DatasetRef {
    std::string kind;  // "synthetic-loan" | "synthetic-xor" | "csv"
    size_t n = 0;
    uint64_t seed = 0;
    std::string path;         // csv only
    std::string schema_path;  // csv only
};

Dataset materialize_dataset(const DatasetRef& ref);

struct StatedModel {
    ModelKind kind = ModelKind::Forest;
    HyperParams hp;
    uint64_t seed = 0;
    uint64_t param_hash = 0;  // hash of the serialized trained model
};

// The specification a provider disclosed: everything an auditor is allowed
// to see. Component statuses record which parts are stated versus estimated,
// which decides the applicable audit mode.
struct SpecStatement {
    ComponentStatus models_status = ComponentStatus::Stated;
    ComponentStatus methods_status = ComponentStatus::Stated;
    ComponentStatus utility_status = ComponentStatus::Stated;
    DatasetRef dataset;
    size_t train_count = 0;  // training split: rows [0, train_count)
    std::vector<StatedModel> models;
    std::vector<MethodConfig> methods;
    UtilitySpec utility;
    std::string tiebreak = "id-ascending";
    std::vector<size_t> instance_indices;  // audited dataset rows

    bool complete() const {
        return models_status == ComponentStatus::Stated &&
               methods_status == ComponentStatus::Stated &&
               utility_status == ComponentStatus::Stated;
    }
};

Model train_stated_model(const StatedModel& stated, const Dataset& train);

}  // namespace cfaudit
