#include "tdft/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace tdft::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t consumed = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &consumed);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse numeric value '" + value + "'");
    }
    if (consumed != value.size()) {
        throw ConfigError("config key '" + key + "': trailing characters in value '" + value +
                          "'");
    }
    return out;
}

}  // namespace

cavity::CavityParams Config::params() const {
    cavity::CavityParams p;
    p.g0 = g0_mhz;  // 1 MHz -> 1 rad/us
    p.delta = delta_mhz;
    p.d = d_um;
    p.v = v_mps;  // 1 m/s -> 1 um/us
    p.z1_0 = z1_0_um;
    p.z2_0 = z2_0_um;
    p.n_p = n_p;
    return p;
}

void Config::validate() const {
    if (!(step_factor > 0.0) || step_factor > 0.02) {
        throw ConfigError("config key 'step_factor': must lie in (0, 0.02]");
    }
    if (window_sigmas < 5.0) {
        throw ConfigError("config key 'window_sigmas': must be >= 5");
    }
    try {
        cavity::validate(params(), unsafe);
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("invalid physical parameters: ") + err.what());
    }
}

RunMode parse_mode(const std::string& text) {
    if (text == "closed_form") return RunMode::closed_form;
    if (text == "quadrature") return RunMode::quadrature;
    if (text == "exact") return RunMode::exact;
    throw ConfigError("config key 'mode': expected closed_form|quadrature|exact, got '" + text +
                      "'");
}

std::string mode_name(RunMode mode) {
    switch (mode) {
        case RunMode::closed_form: return "closed_form";
        case RunMode::quadrature: return "quadrature";
        case RunMode::exact: return "exact";
    }
    return "closed_form";
}

void apply_override(Config& config, const std::string& key, const std::string& value) {
    if (key == "g0_mhz") config.g0_mhz = parse_double(key, value);
    else if (key == "delta_mhz") config.delta_mhz = parse_double(key, value);
    else if (key == "d_um") config.d_um = parse_double(key, value);
    else if (key == "v_mps") config.v_mps = parse_double(key, value);
    else if (key == "z1_0_um") config.z1_0_um = parse_double(key, value);
    else if (key == "z2_0_um") config.z2_0_um = parse_double(key, value);
    else if (key == "n_p") config.n_p = parse_double(key, value);
    else if (key == "step_factor") config.step_factor = parse_double(key, value);
    else if (key == "window_sigmas") config.window_sigmas = parse_double(key, value);
    else if (key == "mode") config.mode = parse_mode(value);
    else throw ConfigError("unknown config key '" + key + "'");
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    Config config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "config line " << line_no << ": expected 'key = value', got '" << stripped
                << "'";
            throw ConfigError(msg.str());
        }
        apply_override(config, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return config;
}

}  // namespace tdft::cli
