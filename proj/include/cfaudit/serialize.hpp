#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfaudit/audit.hpp"
#include "cfaudit/ranking.hpp"

namespace cfaudit {

using json = nlohmann::ordered_json;

// FNV-1a 64-bit over raw bytes; used for config hashes and model parameter
// hashes embedded in artifacts.
uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

// Shortest round-trip decimal rendering (to_chars); locale-independent.
std::string double_to_string(double v);

json schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const json& j);

json instance_to_json(const Instance& inst);
Instance instance_from_json(const json& j, const FeatureSchema& schema);

json model_to_json(const Model& model);
Model model_from_json(const json& j);
uint64_t model_param_hash(const Model& model);

json record_to_json(const ExplanationRecord& rec);
ExplanationRecord record_from_json(const json& j, const FeatureSchema& schema);

json space_to_json(const ExplanationSpace& space);
ExplanationSpace space_from_json(const json& j);

json utility_spec_to_json(const UtilitySpec& spec);
UtilitySpec utility_spec_from_json(const json& j);

json mask_to_json(const FeatureMask& mask, const FeatureSchema& schema);
FeatureMask mask_from_json(const json& j, const FeatureSchema& schema);

json method_config_to_json(const MethodConfig& cfg, const FeatureSchema& schema);
MethodConfig method_config_from_json(const json& j, const FeatureSchema& schema);

json dataset_ref_to_json(const DatasetRef& ref);
DatasetRef dataset_ref_from_json(const json& j);

json statement_to_json(const SpecStatement& statement, const FeatureSchema& schema);
SpecStatement statement_from_json(const json& j, const FeatureSchema& schema);

json reported_to_json(const std::vector<ReportedExplanation>& reported);
std::vector<ReportedExplanation> reported_from_json(const json& j, const FeatureSchema& schema);

json audit_report_to_json(const AuditReport& report);

json sweep_results_to_json(const std::vector<SweepResult>& runs);
json sweep_summary_to_json(const SweepSummary& summary);

// Writes `payload` with an embedded {"_meta": {format, tool_version,
// config_hash}} block, two-space indented, trailing newline.
void write_artifact(const std::string& path, json payload, const std::string& format,
                    const std::string& config_hash);

// Reads an artifact and checks its _meta.format tag.
json read_artifact(const std::string& path, const std::string& expected_format);

// CSV table with a leading "# config_hash=... tool_version=..." comment line.
void write_csv_table(const std::string& path, const std::string& config_hash,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

}  // namespace cfaudit
