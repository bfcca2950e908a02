#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cli_config.hpp"
#include "runner.hpp"

namespace {

using qwalk::cli::RunConfig;

// Flag values are collected as optionals so that command-line settings
// override config-file values, which override the built-in defaults.
struct Flags {
    std::optional<std::string> config_file;
    std::optional<double> p, a, phi, export_floor, threshold_fraction;
    std::optional<int> r, t_max, grid_n, fit_lo, fit_hi, seeds, threads;
    std::optional<std::string> variant, coin_mode, engine, out, preset;
    std::optional<std::string> scan_p, scan_r, scan_a, scan_phi;
    bool force_nonunitary = false;
    bool plot_script = false;
};

void add_common_options(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--config", flags.config_file, "key=value config file");
    cmd->add_option("--p", flags.p, "coin bias p in (0,1)");
    cmd->add_option("--r", flags.r, "rightward/upward jump length (positive integer)");
    cmd->add_option("--a", flags.a, "initial-state parameter a in [0,1]");
    cmd->add_option("--phi", flags.phi, "initial-state phase in [0, 2*pi)");
    cmd->add_option("--variant", flags.variant, "initial-state variant: asprinted|tensor");
    cmd->add_option("--coin-mode", flags.coin_mode, "coin mode: corrected|asprinted");
    cmd->add_option("--engine", flags.engine, "return-series engine: direct|fourier");
    cmd->add_option("--t-max", flags.t_max, "number of steps");
    cmd->add_option("--grid-n", flags.grid_n, "momentum grid size (default: aliasing-safe power of two)");
    cmd->add_option("--out", flags.out, "output directory (default: out)");
    cmd->add_option("--export-floor", flags.export_floor, "omit probabilities at or below this");
    cmd->add_option("--threshold-fraction", flags.threshold_fraction,
                    "peak threshold as a fraction of the maximum");
    cmd->add_option("--fit-lo", flags.fit_lo, "decay-fit window lower bound");
    cmd->add_option("--fit-hi", flags.fit_hi, "decay-fit window upper bound");
    cmd->add_option("--seeds", flags.seeds, "Newton multi-start grid density (>= 8)");
    cmd->add_option("--threads", flags.threads, "worker threads (OpenMP builds)");
    cmd->add_option("--preset", flags.preset, "named initial state: symmetric (a=1/2, phi=pi/2)");
    cmd->add_option("--scan-p", flags.scan_p, "scan grid for p, comma-separated");
    cmd->add_option("--scan-r", flags.scan_r, "scan grid for r, comma-separated");
    cmd->add_option("--scan-a", flags.scan_a, "scan grid for a, comma-separated");
    cmd->add_option("--scan-phi", flags.scan_phi, "scan grid for phi, comma-separated");
    cmd->add_flag("--force-nonunitary", flags.force_nonunitary,
                  "allow evolving with the non-unitary as-printed coin");
    cmd->add_flag("--plot-script", flags.plot_script, "also emit gnuplot scripts");
}

RunConfig resolve(const Flags& flags) {
    RunConfig config;
    if (flags.config_file) config = qwalk::cli::load_config(*flags.config_file);
    if (flags.preset) {
        if (*flags.preset != "symmetric")
            throw std::invalid_argument("unknown preset '" + *flags.preset + "'");
        config.a = 0.5;
        config.phi = qwalk::kPi / 2;
    }
    auto set = [](auto& dst, const auto& src) {
        if (src) dst = *src;
    };
    set(config.p, flags.p);
    set(config.r, flags.r);
    set(config.a, flags.a);
    set(config.phi, flags.phi);
    set(config.t_max, flags.t_max);
    set(config.grid_n, flags.grid_n);
    set(config.output_path, flags.out);
    set(config.export_floor, flags.export_floor);
    set(config.threshold_fraction, flags.threshold_fraction);
    set(config.fit_lo, flags.fit_lo);
    set(config.fit_hi, flags.fit_hi);
    set(config.seeds, flags.seeds);
    set(config.threads, flags.threads);
    if (flags.variant) qwalk::cli::apply_key(config, "variant", *flags.variant, "--variant");
    if (flags.coin_mode) qwalk::cli::apply_key(config, "coin_mode", *flags.coin_mode, "--coin-mode");
    if (flags.engine) qwalk::cli::apply_key(config, "engine", *flags.engine, "--engine");
    if (flags.scan_p) qwalk::cli::apply_key(config, "scan_p", *flags.scan_p, "--scan-p");
    if (flags.scan_r) qwalk::cli::apply_key(config, "scan_r", *flags.scan_r, "--scan-r");
    if (flags.scan_a) qwalk::cli::apply_key(config, "scan_a", *flags.scan_a, "--scan-a");
    if (flags.scan_phi) qwalk::cli::apply_key(config, "scan_phi", *flags.scan_phi, "--scan-phi");
    if (flags.force_nonunitary) config.force_nonunitary = true;
    if (flags.plot_script) config.plot_script = true;
    config.check();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"biased four-state quantum walk on the plane: simulator and "
                 "formula-verification toolkit"};
    app.require_subcommand(1);

    Flags flags;
    int (*runner)(const RunConfig&) = nullptr;

    struct Sub {
        const char* name;
        const char* help;
        int (*fn)(const RunConfig&);
    };
    const Sub subs[] = {
        {"evolve", "direct evolution: probability distribution and peaks", qwalk::cli::run_evolve},
        {"spectrum", "momentum-space audit report", qwalk::cli::run_spectrum},
        {"saddles", "stationary-point audit report", qwalk::cli::run_saddles},
        {"velocities", "peak-velocity profile and hull criterion", qwalk::cli::run_velocities},
        {"return", "return-probability series and decay fit", qwalk::cli::run_return},
        {"polya", "partial products and tail extrapolation", qwalk::cli::run_polya},
        {"mean", "mean-position trajectory", qwalk::cli::run_mean},
        {"scan", "parameter sweep over (p, r, a, phi)", qwalk::cli::run_scan},
        {"verify", "run the full formula-audit suite", qwalk::cli::run_verify},
    };
    for (const Sub& sub : subs) {
        CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
        add_common_options(cmd, flags);
        cmd->callback([&runner, fn = sub.fn] { runner = fn; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        return runner(resolve(flags));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
