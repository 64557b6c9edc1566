#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfaudit/models.hpp"
#include "cfaudit/tabular.hpp"

namespace cfaudit {

// Which features a method may edit. Restricting this set is the
// cherry-picking mechanism exercised by the audits, so compliance must stay
// machine-checkable on the produced records.
struct FeatureMask {
    std::vector<bool> editable;

    static FeatureMask all(const FeatureSchema& schema);
    // Every feature editable except the named ones.
    static FeatureMask excluding(const FeatureSchema& schema,
                                 const std::vector<std::string>& names);

    void validate(const FeatureSchema& schema) const;  // needs >= 1 editable feature
    std::vector<size_t> editable_indices() const;
};

// Search budget in evaluation counts, never wall clock.
struct GenBudget {
    size_t attempts_per_level = 100;
    size_t max_level = 0;  // 0 means "feature arity", resolved at call time
};

struct RecordProvenance {
    size_t model_index = 0;
    size_t method_index = 0;
    size_t seed_index = 0;
    size_t emission_index = 0;
    std::string model_id;
    std::string method_id;
    uint64_t method_seed = 0;
};

// Per-feature change entry of the explanation vector: which features moved
// and to what. Numeric deltas are value differences; categorical deltas are
// replacements.
struct DeltaEntry {
    bool changed = false;
    FeatureValue new_value;
    double numeric_diff = 0.0;
};

// A factual/counterfactual pair with full provenance. The invariant
// predict(model, e) != predict(model, x) holds for every constructed record;
// both instances carry their predicted class on .label.
struct ExplanationRecord {
    size_t id = 0;  // assigned by the explanation space, 1-based
    Instance factual;
    Instance counterfactual;
    std::vector<DeltaEntry> delta;
    RecordProvenance provenance;

    bool edits_feature(size_t feature) const { return delta.at(feature).changed; }
    bool edits_any(const std::vector<size_t>& features) const;
};

// Builds a record from a validated pair, computing the delta and stamping
// predicted classes. Throws Error if the pair is not a valid counterfactual.
ExplanationRecord make_record(const Model& model, const Instance& x, const Instance& e,
                              RecordProvenance provenance);

// Level-wise random search: at level n it samples `attempts_per_level`
// candidates, each picking n distinct editable features uniformly and, per
// feature independently, a replacement value from a uniformly drawn training
// row. The first candidate whose prediction flips is returned, so at most n
// features differ at the terminating level (a sampled replacement may equal
// the original value). Throws CfNotFound when the budget is exhausted.
ExplanationRecord dice_random(const Model& model, const Instance& x, const Dataset& train,
                              const FeatureMask& mask, const GenBudget& budget, uint64_t seed,
                              RecordProvenance provenance = {});

// Deterministic scan: single-feature swaps in (feature order x training-row
// order), then feature pairs in lexicographic order with both replacement
// values taken from the same training row. No randomness; same inputs give
// the same record. Throws CfNotFound.
ExplanationRecord greedy_sparse(const Model& model, const Instance& x, const Dataset& train,
                                const FeatureMask& mask, RecordProvenance provenance = {});

// Finite value grid per feature for exhaustive enumeration.
struct ValueGrid {
    std::vector<std::vector<FeatureValue>> values;  // per schema feature

    // Numeric features discretized to `steps` evenly spaced values over the
    // schema range (endpoints included); categoricals take every category.
    static ValueGrid regular(const FeatureSchema& schema, size_t steps);
};

// Ground-truth enumeration: every grid point that respects the mask (masked
// features pinned to x) and flips the prediction, in lexicographic grid
// order. The certification routines consume this as the whole space. Throws
// GridTooLarge when the masked grid exceeds `cap` points.
std::vector<ExplanationRecord> exhaustive_enumerate(const Model& model, const Instance& x,
                                                    const ValueGrid& grid,
                                                    const FeatureMask& mask,
                                                    size_t cap = 1000000,
                                                    RecordProvenance provenance = {});

}  // namespace cfaudit
