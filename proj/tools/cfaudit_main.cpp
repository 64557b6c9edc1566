// Command-line driver: gen | pick | audit | sweep | report over a run config.
//
// Exit codes: 0 success, 2 config error, 3 audit found flags or an
// inconsistency, 1 any other failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cfaudit/errors.hpp"
#include "cfaudit/runner.hpp"
#include "cfaudit/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"counterfactual explanation-space generation and cherry-picking audits"};
    app.set_version_flag("--version", cfaudit::kToolVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<uint64_t> seed_override;
    size_t jobs = 1;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config) {
            cmd->add_option("--config", config_path, "run config path")->required();
        }
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed_override, "override the config's master seed");
        cmd->add_option("--jobs", jobs, "worker threads; must not change outputs")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* gen = app.add_subcommand("gen", "generate explanation spaces and the statement");
    add_common(gen, true);
    CLI::App* pick = app.add_subcommand("pick", "apply the provider policy to generated spaces");
    add_common(pick, true);
    CLI::App* audit = app.add_subcommand("audit", "audit reported explanations");
    add_common(audit, true);
    CLI::App* sweep = app.add_subcommand("sweep", "run the seed sweep");
    add_common(sweep, true);
    CLI::App* report = app.add_subcommand("report", "aggregate a run directory");
    add_common(report, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (report->parsed()) {
            cfaudit::cmd_report(out_dir);
            return 0;
        }
        const cfaudit::LoadedRun run = cfaudit::load_run(config_path, seed_override);
        if (gen->parsed()) {
            cfaudit::cmd_gen(run, out_dir, jobs);
        } else if (pick->parsed()) {
            cfaudit::cmd_pick(run, out_dir);
        } else if (audit->parsed()) {
            if (cfaudit::cmd_audit(run, out_dir)) {
                std::cerr << "audit flagged at least one instance\n";
                return 3;
            }
        } else if (sweep->parsed()) {
            cfaudit::cmd_sweep(run, out_dir, jobs);
        }
        return 0;
    } catch (const cfaudit::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const cfaudit::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
