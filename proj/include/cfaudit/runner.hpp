#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cfaudit/audit.hpp"
#include "cfaudit/ranking.hpp"

namespace cfaudit {

// Sweep section of a run config: seed sets for the model and the generator,
// the baseline realisation, and the restricted feature set mirrored against
// the unrestricted ("all") setting.
struct SweepConfig {
    std::vector<uint64_t> model_seeds;
    std::vector<uint64_t> cf_seeds;
    uint64_t baseline_model_seed = 42;
    uint64_t baseline_cf_seed = 42;
    bool include_baseline = true;
    std::vector<std::string> restricted_exclude;  // defaults to the schema's sensitive set
    std::vector<std::string> alt_methods;         // extra deterministic methods, e.g. greedy_sparse
    size_t im1_k = 2;
    double im1_epsilon = 1e-6;
};

struct AuditConfig {
    AccessLevel access = AccessLevel::Full;
    double alpha = 0.05;
    size_t permutation_iterations = 1000;
    size_t min_runs = 2;
    uint64_t permutation_seed = 0;
    std::vector<uint64_t> partial_seeds;
    std::string model_class = "linear";
};

struct RunConfig {
    uint64_t master_seed = 0;
    DatasetRef dataset;
    size_t train_count = 0;
    size_t audit_count = 0;
    size_t audit_offset = 0;
    std::vector<StatedModel> models;
    std::vector<MethodConfig> methods;
    UtilitySpec stated_utility;
    std::optional<UtilitySpec> true_utility;  // provider's actual preference, if different
    ProviderPolicy policy;
    ComponentStatus statement_models = ComponentStatus::Stated;
    ComponentStatus statement_methods = ComponentStatus::Stated;
    ComponentStatus statement_utility = ComponentStatus::Stated;
    AuditConfig audit;
    std::optional<SweepConfig> sweep;
    bool dedupe = false;
};

// A parsed config together with the materialized data it describes.
struct LoadedRun {
    RunConfig config;
    Dataset dataset;
    Dataset train;                      // rows [0, train_count)
    std::vector<size_t> audit_indices;  // dataset row ids under audit
    std::string config_hash;            // fnv1a64 hex of the raw config bytes
};

// Parses and validates a config file. Unknown keys anywhere are ConfigError:
// a misspelled constraint must fail loudly rather than silently vanish from
// the stated specification. `seed_override` replaces master_seed (--seed).
LoadedRun load_run(const std::string& config_path, std::optional<uint64_t> seed_override);

// Runs fn(0..n-1) on up to `jobs` threads. Each index writes only its own
// results, so outputs are byte-identical to the sequential order regardless
// of thread count.
void parallel_for(size_t jobs, size_t n, const std::function<void(size_t)>& fn);

// Subcommand entry points. All artifact writing happens under out_dir.
void cmd_gen(const LoadedRun& run, const std::string& out_dir, size_t jobs);
void cmd_pick(const LoadedRun& run, const std::string& out_dir);
// Returns true when the audit flagged at least one instance (CLI exit 3).
bool cmd_audit(const LoadedRun& run, const std::string& out_dir);
void cmd_sweep(const LoadedRun& run, const std::string& out_dir, size_t jobs);
void cmd_report(const std::string& run_dir);

// FNV-1a over sorted relative paths and file contents; byte-identical output
// trees hash identically.
std::string hash_tree(const std::string& dir);

}  // namespace cfaudit
