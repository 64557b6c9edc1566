#include "cfaudit/ranking.hpp"

#include <algorithm>
#include <cmath>

namespace cfaudit {

std::string method_kind_name(MethodKind kind) {
    switch (kind) {
        case MethodKind::DiceRandom: return "dice_random";
        case MethodKind::GreedySparse: return "greedy_sparse";
        case MethodKind::Exhaustive: return "exhaustive";
    }
    return "unknown";
}

MethodKind method_kind_from_name(const std::string& name) {
    if (name == "dice_random") return MethodKind::DiceRandom;
    if (name == "greedy_sparse") return MethodKind::GreedySparse;
    if (name == "exhaustive") return MethodKind::Exhaustive;
    throw ParseError("unknown method kind '" + name + "'");
}

const ExplanationRecord& ExplanationSpace::by_id(size_t id) const {
    if (id < 1 || id > records.size()) {
        throw NotInSpace("record id " + std::to_string(id) + " not in a space of size " +
                         std::to_string(records.size()));
    }
    return records[id - 1];
}

ExplanationSpace build_space(const std::vector<Model>& models,
                             const std::vector<MethodConfig>& methods, const Instance& x,
                             const Dataset& train, bool dedupe) {
    if (models.empty() || methods.empty()) {
        throw Error("build_space needs at least one model and one method config");
    }

    ExplanationSpace space;
    space.schema = models[0].schema;
    space.instance = x;
    space.manifest.dedupe = dedupe;

    for (size_t m = 0; m < models.size(); ++m) {
        space.manifest.model_ids.push_back(model_id(models[m]));
        for (size_t a = 0; a < methods.size(); ++a) {
            const MethodConfig& cfg = methods[a];
            if (m == 0) {
                space.manifest.method_ids.push_back(method_kind_name(cfg.kind));
            }
            const auto seeds = cfg.seeds.empty() ? std::vector<uint64_t>{0} : cfg.seeds;
            for (size_t s = 0; s < seeds.size(); ++s) {
                RecordProvenance prov;
                prov.model_index = m;
                prov.method_index = a;
                prov.seed_index = s;
                prov.model_id = model_id(models[m]);
                prov.method_id = method_kind_name(cfg.kind);
                prov.method_seed = seeds[s];
                try {
                    switch (cfg.kind) {
                        case MethodKind::DiceRandom:
                            space.records.push_back(dice_random(models[m], x, train, cfg.mask,
                                                                cfg.budget, seeds[s], prov));
                            break;
                        case MethodKind::GreedySparse:
                            space.records.push_back(
                                greedy_sparse(models[m], x, train, cfg.mask, prov));
                            break;
                        case MethodKind::Exhaustive: {
                            const ValueGrid grid =
                                ValueGrid::regular(models[m].schema, cfg.grid_steps);
                            auto recs = exhaustive_enumerate(models[m], x, grid, cfg.mask,
                                                             cfg.grid_cap, prov);
                            for (auto& rec : recs) space.records.push_back(std::move(rec));
                            break;
                        }
                    }
                } catch (const CfNotFound& err) {
                    space.manifest.failures.push_back({m, a, s, seeds[s], err.what()});
                }
            }
        }
    }

    std::stable_sort(space.records.begin(), space.records.end(),
                     [](const ExplanationRecord& a, const ExplanationRecord& b) {
                         const auto& pa = a.provenance;
                         const auto& pb = b.provenance;
                         return std::tie(pa.model_index, pa.method_index, pa.seed_index,
                                         pa.emission_index) <
                                std::tie(pb.model_index, pb.method_index, pb.seed_index,
                                         pb.emission_index);
                     });

    if (dedupe) {
        std::vector<ExplanationRecord> unique;
        for (auto& rec : space.records) {
            const bool dup = std::any_of(unique.begin(), unique.end(),
                                         [&](const ExplanationRecord& u) {
                                             return u.counterfactual.same_values(rec.counterfactual);
                                         });
            if (!dup) unique.push_back(std::move(rec));
        }
        space.records = std::move(unique);
    }

    if (space.records.empty()) {
        throw EmptySpace("every generation attempt failed at this instance");
    }
    for (size_t i = 0; i < space.records.size(); ++i) space.records[i].id = i + 1;
    return space;
}

RecordUtility utility_from_spec(const UtilitySpec& spec, const FeatureSchema& schema,
                                const Dataset* train, const ExplanationSpace& space) {
    // Local-set normalization references {x} union the counterfactuals of
    // the space being ranked.
    std::vector<Instance> local_set;
    local_set.push_back(space.instance);
    for (const auto& rec : space.records) local_set.push_back(rec.counterfactual);

    auto evaluator = std::make_shared<UtilityEvaluator>(spec, schema, train, &local_set);
    return [evaluator](const Instance& x, const ExplanationRecord& rec) {
        return evaluator->eval(x, rec.counterfactual);
    };
}

Ranking rank(const ExplanationSpace& space, const RecordUtility& utility) {
    Ranking ranking;
    ranking.space = &space;
    const size_t n = space.records.size();
    ranking.utilities.resize(n);
    for (size_t i = 0; i < n; ++i) {
        ranking.utilities[i] = utility(space.instance, space.records[i]);
    }
    ranking.order.resize(n);
    for (size_t i = 0; i < n; ++i) ranking.order[i] = i;
    std::sort(ranking.order.begin(), ranking.order.end(), [&](size_t a, size_t b) {
        if (ranking.utilities[a] != ranking.utilities[b]) {
            return ranking.utilities[a] > ranking.utilities[b];
        }
        return space.records[a].id < space.records[b].id;
    });
    ranking.rank_of.resize(n);
    for (size_t r = 0; r < n; ++r) ranking.rank_of[ranking.order[r]] = r + 1;
    return ranking;
}

size_t Ranking::rank_of_id(size_t id) const {
    if (space == nullptr || id < 1 || id > rank_of.size()) {
        throw NotInSpace("record id " + std::to_string(id) + " not in the ranked space");
    }
    return rank_of[id - 1];
}

const ExplanationRecord& Ranking::at_rank(size_t r) const {
    if (space == nullptr || r < 1 || r > order.size()) {
        throw NotInSpace("rank " + std::to_string(r) + " out of range");
    }
    return space->records[order[r - 1]];
}

namespace {

// A caller-supplied record must actually be the space's record with that id,
// not merely share an id with it.
void check_membership(const ExplanationSpace& space, const ExplanationRecord& record) {
    if (record.id < 1 || record.id > space.records.size()) {
        throw NotInSpace("record id " + std::to_string(record.id) + " not in the space");
    }
    const ExplanationRecord& own = space.records[record.id - 1];
    if (!own.counterfactual.same_values(record.counterfactual) ||
        !own.factual.same_values(record.factual)) {
        throw NotInSpace("record values do not match the space entry with id " +
                         std::to_string(record.id));
    }
}

}  // namespace

CherryPickResult is_cherry_picked(const Ranking& ranking, const ExplanationRecord& record) {
    check_membership(*ranking.space, record);
    CherryPickResult result;
    result.rank = ranking.rank_of_id(record.id);
    result.cherry_picked = result.rank > 1;
    if (result.cherry_picked) {
        result.witness_id = ranking.at_rank(1).id;
    }
    return result;
}

Selection select(const ProviderPolicy& policy, const Ranking& ranking) {
    const ExplanationSpace& space = *ranking.space;
    if (space.records.empty()) throw EmptySpace("select over an empty space");

    if (policy.kind == PolicyKind::Honest) {
        return {ranking.at_rank(1), false};
    }

    std::vector<size_t> sensitive_idx;
    for (const auto& name : policy.sensitive) {
        sensitive_idx.push_back(space.schema.index_of(name));
    }
    for (size_t r = 1; r <= space.records.size(); ++r) {
        const ExplanationRecord& rec = ranking.at_rank(r);
        if (!rec.edits_any(sensitive_idx)) return {rec, false};
    }
    if (policy.fallback == PolicyFallback::Error) {
        throw NoAdmissibleRecord("every record edits a sensitive feature");
    }
    return {ranking.at_rank(1), true};
}

TopRankCertificate certify_top_rank(const ExplanationSpace& space, const RecordUtility& utility,
                                    const ExplanationRecord& record) {
    check_membership(space, record);
    TopRankCertificate cert;

    const double u_target = utility(space.instance, record);
    cert.evaluations = 1;
    cert.table.push_back({record.id, u_target});

    for (const auto& other : space.records) {
        if (other.id == record.id) continue;
        const double u_other = utility(space.instance, other);
        ++cert.evaluations;
        cert.table.push_back({other.id, u_other});
        if (u_other > u_target || (u_other == u_target && other.id < record.id)) {
            // One strictly better-ranked record refutes top rank immediately.
            cert.certified = false;
            cert.counterexample_id = other.id;
            return cert;
        }
    }
    cert.certified = true;
    std::sort(cert.table.begin(), cert.table.end(),
              [](const UtilityTableEntry& a, const UtilityTableEntry& b) {
                  return a.record_id < b.record_id;
              });
    return cert;
}

Dataset materialize_dataset(const DatasetRef& ref) {
    if (ref.kind == "synthetic-loan") return gen_synthetic_loan(ref.n, ref.seed);
    if (ref.kind == "synthetic-xor") return gen_xor(ref.n, ref.seed);
    if (ref.kind == "csv") return load_csv(ref.path, load_schema(ref.schema_path));
    throw ConfigError("unknown dataset kind '" + ref.kind + "'");
}

Model train_stated_model(const StatedModel& stated, const Dataset& train) {
    switch (stated.kind) {
        case ModelKind::Logistic: return train_logistic(train, stated.hp, stated.seed);
        case ModelKind::Tree: return train_tree(train, stated.hp, stated.seed);
        case ModelKind::Forest: return train_forest(train, stated.hp, stated.seed);
        case ModelKind::RuleXor: return rule_model_xor();
    }
    throw Error("unreachable model kind");
}

}  // namespace cfaudit
