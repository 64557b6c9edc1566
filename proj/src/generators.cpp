#include "cfaudit/generators.hpp"

#include <algorithm>

#include "cfaudit/rng.hpp"

namespace cfaudit {

FeatureMask FeatureMask::all(const FeatureSchema& schema) {
    FeatureMask mask;
    mask.editable.assign(schema.arity(), true);
    return mask;
}

FeatureMask FeatureMask::excluding(const FeatureSchema& schema,
                                   const std::vector<std::string>& names) {
    FeatureMask mask = all(schema);
    for (const auto& name : names) mask.editable[schema.index_of(name)] = false;
    mask.validate(schema);
    return mask;
}

void FeatureMask::validate(const FeatureSchema& schema) const {
    if (editable.size() != schema.arity()) {
        throw SchemaMismatch("feature mask arity does not match the schema");
    }
    if (std::none_of(editable.begin(), editable.end(), [](bool b) { return b; })) {
        throw Error("feature mask disables every feature");
    }
}

std::vector<size_t> FeatureMask::editable_indices() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < editable.size(); ++i) {
        if (editable[i]) out.push_back(i);
    }
    return out;
}

bool ExplanationRecord::edits_any(const std::vector<size_t>& features) const {
    return std::any_of(features.begin(), features.end(),
                       [&](size_t f) { return delta.at(f).changed; });
}

ExplanationRecord make_record(const Model& model, const Instance& x, const Instance& e,
                              RecordProvenance provenance) {
    const int fx = predict(model, x);
    const int fe = predict(model, e);
    if (fx == fe) throw Error("counterfactual does not flip the prediction");

    ExplanationRecord rec;
    rec.factual = x;
    rec.factual.label = fx;
    rec.counterfactual = e;
    rec.counterfactual.label = fe;
    rec.provenance = std::move(provenance);
    rec.delta.resize(x.values.size());
    for (size_t i = 0; i < x.values.size(); ++i) {
        auto& d = rec.delta[i];
        d.changed = !value_equal(x.values[i], e.values[i]);
        d.new_value = e.values[i];
        if (std::holds_alternative<double>(x.values[i])) {
            d.numeric_diff = std::get<double>(e.values[i]) - std::get<double>(x.values[i]);
        }
    }
    return rec;
}

ExplanationRecord dice_random(const Model& model, const Instance& x, const Dataset& train,
                              const FeatureMask& mask, const GenBudget& budget, uint64_t seed,
                              RecordProvenance provenance) {
    validate_instance(model.schema, x);
    mask.validate(model.schema);
    if (train.rows.empty()) throw EmptyData("dice_random needs training rows to swap from");
    if (budget.attempts_per_level < 1) throw Error("attempts_per_level must be >= 1");

    const auto editable = mask.editable_indices();
    size_t max_level = budget.max_level == 0 ? model.schema.arity() : budget.max_level;
    max_level = std::min(max_level, editable.size());
    if (max_level < 1) throw Error("generation budget allows no edits");

    const int fx = predict(model, x);
    Rng rng(seed);
    Instance candidate = x;

    for (size_t level = 1; level <= max_level; ++level) {
        for (size_t attempt = 0; attempt < budget.attempts_per_level; ++attempt) {
            candidate.values = x.values;
            const auto picks = rng.sample_distinct(editable.size(), level);
            for (size_t p : picks) {
                const size_t feature = editable[p];
                const size_t row = rng.uniform_index(train.rows.size());
                candidate.values[feature] = train.rows[row].values[feature];
            }
            if (predict(model, candidate) != fx) {
                provenance.method_seed = seed;
                return make_record(model, x, candidate, std::move(provenance));
            }
        }
    }
    throw CfNotFound("no valid counterfactual within " + std::to_string(budget.attempts_per_level) +
                     " attempts per level up to level " + std::to_string(max_level));
}

ExplanationRecord greedy_sparse(const Model& model, const Instance& x, const Dataset& train,
                                const FeatureMask& mask, RecordProvenance provenance) {
    validate_instance(model.schema, x);
    mask.validate(model.schema);
    if (train.rows.empty()) throw EmptyData("greedy_sparse needs training rows to swap from");

    const auto editable = mask.editable_indices();
    const int fx = predict(model, x);
    Instance candidate = x;

    for (size_t f : editable) {
        for (const auto& row : train.rows) {
            if (value_equal(row.values[f], x.values[f])) continue;
            candidate.values = x.values;
            candidate.values[f] = row.values[f];
            if (predict(model, candidate) != fx) {
                return make_record(model, x, candidate, std::move(provenance));
            }
        }
    }
    for (size_t a = 0; a < editable.size(); ++a) {
        for (size_t b = a + 1; b < editable.size(); ++b) {
            for (const auto& row : train.rows) {
                candidate.values = x.values;
                candidate.values[editable[a]] = row.values[editable[a]];
                candidate.values[editable[b]] = row.values[editable[b]];
                if (candidate.same_values(x)) continue;
                if (predict(model, candidate) != fx) {
                    return make_record(model, x, candidate, std::move(provenance));
                }
            }
        }
    }
    throw CfNotFound("no valid counterfactual among single- and two-feature swaps");
}

ValueGrid ValueGrid::regular(const FeatureSchema& schema, size_t steps) {
    if (steps < 2) throw Error("grid needs at least 2 steps per numeric feature");
    ValueGrid grid;
    grid.values.resize(schema.arity());
    for (size_t i = 0; i < schema.arity(); ++i) {
        const auto& spec = schema.at(i);
        if (spec.kind == FeatureKind::Numeric) {
            for (size_t s = 0; s < steps; ++s) {
                const double t = static_cast<double>(s) / static_cast<double>(steps - 1);
                grid.values[i].emplace_back(spec.lo + t * (spec.hi - spec.lo));
            }
        } else {
            for (const auto& cat : spec.categories) grid.values[i].emplace_back(cat);
        }
    }
    return grid;
}

std::vector<ExplanationRecord> exhaustive_enumerate(const Model& model, const Instance& x,
                                                    const ValueGrid& grid,
                                                    const FeatureMask& mask, size_t cap,
                                                    RecordProvenance provenance) {
    validate_instance(model.schema, x);
    mask.validate(model.schema);
    if (grid.values.size() != model.schema.arity()) {
        throw SchemaMismatch("grid arity does not match the model schema");
    }

    // Masked features are pinned to x, so the effective grid is the product
    // over editable features only.
    std::vector<std::vector<FeatureValue>> cells(model.schema.arity());
    size_t total = 1;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (mask.editable[i]) {
            if (grid.values[i].empty()) throw Error("empty grid for an editable feature");
            cells[i] = grid.values[i];
        } else {
            cells[i] = {x.values[i]};
        }
        if (cells[i].size() > 0 && total > cap / cells[i].size() + 1) {
            throw GridTooLarge("grid exceeds the configured cap of " + std::to_string(cap));
        }
        total *= cells[i].size();
    }
    if (total > cap) {
        throw GridTooLarge("grid exceeds the configured cap of " + std::to_string(cap));
    }

    const int fx = predict(model, x);
    std::vector<ExplanationRecord> out;
    std::vector<size_t> idx(cells.size(), 0);
    Instance candidate = x;

    // Odometer over the per-feature cells; the first feature is the most
    // significant digit, giving lexicographic grid order.
    for (size_t count = 0; count < total; ++count) {
        for (size_t i = 0; i < cells.size(); ++i) candidate.values[i] = cells[i][idx[i]];
        if (!candidate.same_values(x) && predict(model, candidate) != fx) {
            RecordProvenance p = provenance;
            p.emission_index = out.size();
            out.push_back(make_record(model, x, candidate, std::move(p)));
        }
        for (size_t i = cells.size(); i-- > 0;) {
            if (++idx[i] < cells[i].size()) break;
            idx[i] = 0;
        }
    }
    return out;
}

}  // namespace cfaudit
