#include "cli_config.hpp"

#include <fstream>
#include <stdexcept>

#include "qwalk/io.hpp"

namespace qwalk::cli {

int RunConfig::effective_grid_n() const {
    if (grid_n > 0) return grid_n;
    const long need = long(r + 1) * t_max + 1;
    int n = 1;
    while (n < need) n *= 2;
    return n;
}

FitWindow RunConfig::effective_fit_window() const {
    if (fit_lo > 0 || fit_hi > 0) return FitWindow{fit_lo, fit_hi > 0 ? fit_hi : t_max};
    return default_fit_window(BiasParams{p, r}, t_max);
}

void RunConfig::check() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (!(p > 0.0 && p < 1.0)) fail("p must be in (0,1), got " + format_g17(p));
    if (r < 1) fail("r must be a positive integer, got " + std::to_string(r));
    if (!(a >= 0.0 && a <= 1.0)) fail("a must be in [0,1], got " + format_g17(a));
    if (!(phi >= 0.0 && phi < 2 * kPi)) fail("phi must be in [0, 2*pi), got " + format_g17(phi));
    if (t_max < 0) fail("t_max must be >= 0, got " + std::to_string(t_max));
    if (grid_n < 0) fail("grid_n must be positive (or omitted), got " + std::to_string(grid_n));
    if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0))
        fail("threshold_fraction must be in (0,1], got " + format_g17(threshold_fraction));
    if (export_floor < 0.0) fail("export_floor must be >= 0, got " + format_g17(export_floor));
    if (seeds < 8) fail("seeds must be >= 8, got " + std::to_string(seeds));
    if (fit_lo < 0 || fit_hi < 0) fail("fit window bounds must be >= 0");
    for (double v : scan_p)
        if (!(v > 0.0 && v < 1.0)) fail("scan_p entries must be in (0,1), got " + format_g17(v));
    for (int v : scan_r)
        if (v < 1) fail("scan_r entries must be positive, got " + std::to_string(v));
    for (double v : scan_a)
        if (!(v >= 0.0 && v <= 1.0)) fail("scan_a entries must be in [0,1], got " + format_g17(v));
    for (double v : scan_phi)
        if (!(v >= 0.0 && v < 2 * kPi))
            fail("scan_phi entries must be in [0, 2*pi), got " + format_g17(v));
}

namespace {

double to_double(const std::string& value, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(where + ": bad number '" + value + "'");
    }
}

int to_int(const std::string& value, const std::string& where) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(where + ": bad integer '" + value + "'");
    }
}

bool to_bool(const std::string& value, const std::string& where) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument(where + ": bad boolean '" + value + "'");
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

void apply_key(RunConfig& config, const std::string& key, const std::string& value,
               const std::string& where) {
    if (key == "p") config.p = to_double(value, where);
    else if (key == "r") config.r = to_int(value, where);
    else if (key == "a") config.a = to_double(value, where);
    else if (key == "phi") config.phi = to_double(value, where);
    else if (key == "variant") {
        if (value == "asprinted") config.variant = InitialVariant::AsPrinted;
        else if (value == "tensor") config.variant = InitialVariant::TensorProduct;
        else throw std::invalid_argument(where + ": variant must be asprinted|tensor, got '" + value + "'");
    } else if (key == "coin_mode") {
        if (value == "corrected") config.coin_mode = CoinMode::Corrected;
        else if (value == "asprinted") config.coin_mode = CoinMode::AsPrinted;
        else throw std::invalid_argument(where + ": coin_mode must be corrected|asprinted, got '" + value + "'");
    } else if (key == "engine") {
        if (value == "direct") config.engine = Engine::Direct;
        else if (value == "fourier") config.engine = Engine::Fourier;
        else throw std::invalid_argument(where + ": engine must be direct|fourier, got '" + value + "'");
    } else if (key == "t_max") config.t_max = to_int(value, where);
    else if (key == "grid_n") config.grid_n = to_int(value, where);
    else if (key == "out") config.output_path = value;
    else if (key == "export_floor") config.export_floor = to_double(value, where);
    else if (key == "threshold_fraction") config.threshold_fraction = to_double(value, where);
    else if (key == "fit_lo") config.fit_lo = to_int(value, where);
    else if (key == "fit_hi") config.fit_hi = to_int(value, where);
    else if (key == "seeds") config.seeds = to_int(value, where);
    else if (key == "threads") config.threads = to_int(value, where);
    else if (key == "force_nonunitary") config.force_nonunitary = to_bool(value, where);
    else if (key == "plot_script") config.plot_script = to_bool(value, where);
    else if (key == "scan_p") config.scan_p = parse_double_list(value);
    else if (key == "scan_r") config.scan_r = parse_int_list(value);
    else if (key == "scan_a") config.scan_a = parse_double_list(value);
    else if (key == "scan_phi") config.scan_phi = parse_double_list(value);
    else throw std::invalid_argument(where + ": unknown key '" + key + "'");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    RunConfig config;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = path + ":" + std::to_string(lineno);
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(where + ": expected key=value, got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument(where + ": empty key");
        apply_key(config, key, value, where);
    }
    config.check();
    return config;
}

}  // namespace qwalk::cli
