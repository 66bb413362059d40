// fracac: batch front end for the time-fractional Allen-Cahn solver.
//
//   fracac [--config FILE] [--preset NAME] [--set key=value ...]
//          [--out DIR] [--threads N] [--seed U64] <command>
//
// Commands: convergence, bubbles, kernel-check, soe-table, singularity.
// Exit codes: 0 success, 1 usage, 2 assertion failure, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fracac/config.hpp"
#include "fracac/error.hpp"
#include "fracac/experiments.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kAssertion = 2;
constexpr int kNumerical = 3;

int exit_code(fracac::ErrorKind kind) {
    using fracac::ErrorKind;
    switch (kind) {
        case ErrorKind::PicardDiverged:
        case ErrorKind::ToleranceUnachievable:
        case ErrorKind::Overflow:
        case ErrorKind::NonPositiveShift:
            return kNumerical;
        case ErrorKind::AssumptionViolated:
            return kAssertion;
        default:
            return kUsage;
    }
}

void print_table(const fracac::ConvergenceTable& tab) {
    std::printf("gamma = %g\n%6s %12s %12s %8s\n", tab.gamma, "N", "tau", "error", "order");
    for (const auto& row : tab.rows) {
        std::printf("%6zu %12.3e %12.3e ", row.N, row.tau, row.error);
        if (row.order) std::printf("%8.2f\n", *row.order);
        else std::printf("%8s\n", "-");
    }
    std::printf("theoretical rate %.2f\n\n", tab.theory);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-fractional Allen-Cahn solver with fast L1 time stepping"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string preset_name;
    std::vector<std::string> settings;
    std::string out_dir;
    unsigned threads = 1;
    std::optional<std::uint64_t> seed;
    bool quiet = false;

    app.add_option("--config", config_path, "Run-config file (key = value lines)")->check(CLI::ExistingFile);
    app.add_option("--preset", preset_name, "Experiment preset: table1..table4, bubbles, bubbles-stabilized, fig1");
    app.add_option("--set", settings, "Override a config key, e.g. --set alpha=0.4")->take_all();
    app.add_option("--out", out_dir, "Output directory (overrides out_dir)");
    app.add_option("--threads", threads, "Worker threads for independent table cells")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Random-tail seed (overrides mesh.seed)");
    app.add_flag("--quiet", quiet, "Suppress progress messages");

    auto* convergence = app.add_subcommand("convergence", "Manufactured-solution temporal convergence tables");
    auto* bubbles = app.add_subcommand("bubbles", "Coalescence of two kissing bubbles");
    auto* kernel_check = app.add_subcommand("kernel-check", "SOE, L1 and Gronwall kernel suites");
    auto* soe_table = app.add_subcommand("soe-table", "Emit the SOE nodes and weights for the configured run");
    auto* singularity = app.add_subcommand("singularity", "Difference quotients near t = 0 and slope fit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    try {
        std::vector<fracac::ConfigEntry> entries;
        if (!config_path.empty()) entries = fracac::read_config_file(config_path);
        for (const auto& s : settings) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                std::cerr << "error: --set expects key=value, got '" << s << "'\n";
                return kUsage;
            }
            entries.push_back({s.substr(0, eq), s.substr(eq + 1), 0});
        }
        if (seed) entries.push_back({"mesh.seed", std::to_string(*seed), 0});
        if (!out_dir.empty()) entries.push_back({"out_dir", out_dir, 0});

        std::optional<std::string> chosen;
        if (!preset_name.empty()) chosen = preset_name;
        const fracac::RunConfig cfg = fracac::resolve_config(entries, chosen);

        fracac::RunOptions opts;
        opts.out_dir = cfg.out_dir;
        opts.threads = threads;
        opts.log = quiet ? nullptr : &std::cerr;

        if (*convergence) {
            for (const auto& tab : fracac::run_convergence(cfg, opts)) {
                print_table(tab);
                for (const auto& w : tab.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            }
            return 0;
        }
        if (*bubbles) {
            const auto out = fracac::run_bubbles(cfg, opts);
            const auto& mp = out.max_principle;
            std::printf("levels %zu, max |u| = %.17g (%s)\n", out.run.records.size(), mp.max_norm,
                        mp.holds ? "maximum principle holds" : "maximum principle VIOLATED");
            std::printf("energy increases above %g: %zu (max %.3e)\n", out.energy.threshold, out.energy.increases,
                        out.energy.max_increase);
            if (out.slope) {
                std::printf("difference-quotient slope %.4f on [%g, %g) (alpha - 1 = %.4f)\n", out.slope->slope,
                            out.slope->t_lo, out.slope->t_hi, cfg.alpha - 1.0);
            }
            for (const auto& w : out.run.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            return mp.holds ? 0 : kAssertion;
        }
        if (*kernel_check) {
            const auto out = fracac::run_kernel_check(cfg, opts);
            std::printf("%s\n", out.passed() ? "kernel-check PASS" : "kernel-check FAIL");
            return out.passed() ? 0 : kAssertion;
        }
        if (*soe_table) {
            const auto soe = fracac::run_soe_table(cfg, opts);
            std::printf("Nq = %zu, dt = %.6e, T = %g, max deviation = %.3e\n", soe.size(), soe.cutoff(),
                        soe.horizon(), soe.max_deviation());
            return 0;
        }
        if (*singularity) {
            for (const auto& s : fracac::run_singularity(cfg, opts)) {
                if (s.fit_inf) {
                    std::printf("gamma = %g: slope %.4f on [%g, %g) with %zu points (alpha - 1 = %.4f)\n", s.gamma,
                                s.fit_inf->slope, s.fit_inf->t_lo, s.fit_inf->t_hi, s.fit_inf->points,
                                cfg.alpha - 1.0);
                } else {
                    std::printf("gamma = %g: no decade with enough samples\n", s.gamma);
                }
            }
            return 0;
        }
    } catch (const fracac::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
