#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "qhopcli/config.hpp"
#include "qhopcli/experiments.hpp"
#include "qhopcli/formats.hpp"

namespace {

struct CommonOpts {
    std::string config;
    std::string out;
    std::int64_t seed = -1;  // < 0 keeps the config's seed
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config) {
    auto* copt = cmd->add_option("--config", o.config, "experiment config file");
    if (needs_config) copt->required();
    cmd->add_option("--out", o.out, "output directory (default: out key in config, else ./out)");
    cmd->add_option("--seed", o.seed, "override the config seed")->check(CLI::NonNegativeNumber);
    cmd->add_option("--threads", o.threads, "worker threads for the integrators")
        ->check(CLI::PositiveNumber);
}

qhopcli::ExperimentConfig resolve(const CommonOpts& o) {
    auto cfg = qhopcli::load_config(o.config);
    if (o.seed >= 0) {
        cfg.seed = std::uint64_t(o.seed);
        if (!cfg.gamma_seed_explicit) cfg.gamma_seed = cfg.seed;
    }
    return cfg;
}

std::string out_dir(const CommonOpts& o, const qhopcli::ExperimentConfig& cfg) {
    if (!o.out.empty()) return o.out;
    if (!cfg.out.empty()) return cfg.out;
    return "out";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice quantum-hopping experiments"};
    app.require_subcommand(1);

    CommonOpts run_opts, conv_opts, sym_opts, val_opts;
    auto* run_cmd = app.add_subcommand("run", "run the experiment named in the config");
    add_common(run_cmd, run_opts, true);
    auto* conv_cmd =
        app.add_subcommand("convergence", "halve the study parameter and report orders");
    add_common(conv_cmd, conv_opts, true);
    auto* sym_cmd = app.add_subcommand("symmetry-report",
                                       "solve the cubic-invariance constraints and print the "
                                       "invariant families");
    sym_cmd->add_option("--out", sym_opts.out, "output directory (default ./out)");
    auto* val_cmd = app.add_subcommand("validate-config", "parse and schema-check a config");
    val_cmd->add_option("--config", val_opts.config, "experiment config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const auto cfg = resolve(run_opts);
            const auto r = qhopcli::run_experiment(cfg, out_dir(run_opts, cfg),
                                                   run_opts.threads);
            std::cout << cfg.experiment << ": " << r.message << "\n";
            return r.exit_code;
        }
        if (conv_cmd->parsed()) {
            const auto cfg = resolve(conv_opts);
            const auto r = qhopcli::run_convergence(cfg, out_dir(conv_opts, cfg),
                                                    conv_opts.threads);
            std::cout << r.message << "\n";
            return r.exit_code;
        }
        if (sym_cmd->parsed()) {
            const std::string dir = sym_opts.out.empty() ? "out" : sym_opts.out;
            const auto r = qhopcli::run_symmetry_report(dir);
            std::cout << qhopcli::read_text_file(dir + "/basis.txt");
            std::cout << r.message << "\n";
            return r.exit_code;
        }
        const auto cfg = qhopcli::load_config(val_opts.config);
        std::cout << "ok: experiment '" << cfg.experiment << "'\n";
        return qhopcli::exit_ok;
    } catch (const qhopcli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return qhopcli::exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return qhopcli::exit_diverged;
    }
}
