// config.hpp — flat `key = value` run configuration shared by every CLI
// subcommand. `#` starts a comment; unknown keys are rejected with the
// offending name. Command-line flags of the same names override file values.

#pragma once

#include <stdexcept>
#include <string>

#include "tdft/cavity.hpp"

namespace tdft::cli {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class RunMode { closed_form, quadrature, exact };

struct Config {
    double g0_mhz = 100.0;     // vacuum Rabi frequency (MHz -> rad/us)
    double delta_mhz = 1e4;    // detuning (MHz -> rad/us)
    double d_um = 30.0;        // cavity half-width (um)
    double v_mps = 10.0;       // atomic velocity (m/s == um/us)
    double z1_0_um = -180.0;   // initial position, atom 1 (um)
    double z2_0_um = -180.0;   // initial position, atom 2 (um)
    double n_p = 0.0;          // mean photon number
    double step_factor = 0.02; // integration step = step_factor / |delta|
    double window_sigmas = 6.0;
    RunMode mode = RunMode::closed_form;
    bool unsafe = false;       // lifts the |g0/delta| <= 0.1 gate (flag only)

    cavity::CavityParams params() const;
    // Throws ConfigError on out-of-range values (delegates to cavity::validate).
    void validate() const;
};

// Parses a config file. Throws ConfigError naming the offending key/line.
Config load_config(const std::string& path);

// Applies one `key = value` override (same keys as the file). Throws.
void apply_override(Config& config, const std::string& key, const std::string& value);

RunMode parse_mode(const std::string& text);
std::string mode_name(RunMode mode);

}  // namespace tdft::cli
