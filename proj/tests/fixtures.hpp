#pragma once

// Shared hand-built fixtures for the worked loan example: the factual x and
// the five counterfactuals e1..e5, plus helpers to assemble them into an
// explanation space with ids 1..5.

#include <string>
#include <vector>

#include "cfaudit/generators.hpp"
#include "cfaudit/ranking.hpp"
#include "cfaudit/tabular.hpp"

namespace fixtures {

inline cfaudit::Instance loan_row(double income, const std::string& gender,
                                  const std::string& employment, double age, int label) {
    cfaudit::Instance inst;
    inst.values = {cfaudit::FeatureValue(income), cfaudit::FeatureValue(gender),
                   cfaudit::FeatureValue(employment), cfaudit::FeatureValue(age)};
    inst.label = label;
    return inst;
}

inline cfaudit::Instance loan_x() { return loan_row(25000, "F", "Temporary", 30, 0); }

inline std::vector<cfaudit::Instance> loan_counterfactuals() {
    return {
        loan_row(28000, "M", "Temporary", 30, 1),  // e1
        loan_row(30000, "F", "Permanent", 35, 1),  // e2
        loan_row(26000, "F", "Permanent", 31, 1),  // e3
        loan_row(35000, "M", "Temporary", 32, 1),  // e4
        loan_row(30000, "M", "Permanent", 35, 1),  // e5
    };
}

// The five-record space over the loan schema with ids 1..5 in e1..e5 order.
inline cfaudit::ExplanationSpace loan_space() {
    cfaudit::ExplanationSpace space;
    space.schema = cfaudit::loan_schema();
    space.instance = loan_x();
    const auto es = loan_counterfactuals();
    for (size_t i = 0; i < es.size(); ++i) {
        cfaudit::ExplanationRecord rec;
        rec.id = i + 1;
        rec.factual = space.instance;
        rec.counterfactual = es[i];
        rec.delta.resize(space.schema.arity());
        for (size_t f = 0; f < space.schema.arity(); ++f) {
            rec.delta[f].changed =
                !cfaudit::value_equal(space.instance.values[f], es[i].values[f]);
            rec.delta[f].new_value = es[i].values[f];
        }
        rec.provenance.model_index = 0;
        rec.provenance.method_index = 0;
        rec.provenance.seed_index = i;
        rec.provenance.model_id = "fixture";
        rec.provenance.method_id = "fixture";
        rec.provenance.method_seed = i;
        space.records.push_back(std::move(rec));
    }
    space.manifest.model_ids = {"fixture"};
    space.manifest.method_ids = {"fixture"};
    return space;
}

}  // namespace fixtures
