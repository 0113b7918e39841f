// tdftsim — transit-entanglement simulator CLI.
// Subcommands: evolve (time series), sweep (entropy grid), contours
// (maximal-entanglement curves), verify (self-check battery, exit 0/1).
// Exit codes: 0 success, 1 verification failure, 2 usage/config error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tdft/commands.hpp"
#include "tdft/config.hpp"

namespace {

struct CliState {
    std::string config_path;
    std::string out_path;
    int threads = 0;
    bool unsafe = false;
    std::optional<double> g0_mhz, delta_mhz, d_um, v_mps, z1_0_um, z2_0_um, n_p, step_factor,
        window_sigmas;
    std::optional<std::string> mode;
};

tdft::cli::Config build_config(const CliState& st) {
    tdft::cli::Config config;
    if (!st.config_path.empty()) config = tdft::cli::load_config(st.config_path);
    if (st.g0_mhz) config.g0_mhz = *st.g0_mhz;
    if (st.delta_mhz) config.delta_mhz = *st.delta_mhz;
    if (st.d_um) config.d_um = *st.d_um;
    if (st.v_mps) config.v_mps = *st.v_mps;
    if (st.z1_0_um) config.z1_0_um = *st.z1_0_um;
    if (st.z2_0_um) config.z2_0_um = *st.z2_0_um;
    if (st.n_p) config.n_p = *st.n_p;
    if (st.step_factor) config.step_factor = *st.step_factor;
    if (st.window_sigmas) config.window_sigmas = *st.window_sigmas;
    if (st.mode) config.mode = tdft::cli::parse_mode(*st.mode);
    config.unsafe = st.unsafe;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-atom cavity-transit entanglement simulator"};
    app.require_subcommand(1);

    CliState st;
    app.add_option("--config", st.config_path, "Path to a key = value config file");
    app.add_option("--out", st.out_path, "Output path (default: stdout)");
    app.add_option("--threads", st.threads, "Worker threads for grid sweeps (0 = auto)");
    app.add_flag("--unsafe", st.unsafe, "Lift the |g0/delta| <= 0.1 weak-coupling gate");
    app.add_option("--g0_mhz", st.g0_mhz, "Vacuum Rabi frequency (MHz)");
    app.add_option("--delta_mhz", st.delta_mhz, "Detuning (MHz)");
    app.add_option("--d_um", st.d_um, "Cavity half-width (um)");
    app.add_option("--v_mps", st.v_mps, "Atomic velocity (m/s)");
    app.add_option("--z1_0_um", st.z1_0_um, "Initial position of atom 1 (um)");
    app.add_option("--z2_0_um", st.z2_0_um, "Initial position of atom 2 (um)");
    app.add_option("--n_p", st.n_p, "Mean photon number");
    app.add_option("--step_factor", st.step_factor, "Integration step factor (<= 0.02)");
    app.add_option("--window_sigmas", st.window_sigmas, "Window margin in half-widths (>= 5)");
    app.add_option("--mode", st.mode, "closed_form | quadrature | exact");

    int rows = 1001;
    auto* evolve = app.add_subcommand("evolve", "Emit one transit as a CSV time series");
    evolve->add_option("--rows", rows, "Number of output rows")->check(CLI::PositiveNumber);
    evolve->fallthrough();

    tdft::cli::SweepGrid grid;
    grid.nv = 101;
    grid.nz = 101;
    auto* sweep = app.add_subcommand("sweep", "Entropy over a (v, z0) reduced-unit grid");
    sweep->add_option("--v-min", grid.v_min, "Reduced velocity, lower bound");
    sweep->add_option("--v-max", grid.v_max, "Reduced velocity, upper bound");
    sweep->add_option("--z0-min", grid.z0_min, "Reduced position difference, lower bound");
    sweep->add_option("--z0-max", grid.z0_max, "Reduced position difference, upper bound");
    sweep->add_option("--nv", grid.nv, "Grid points along v");
    sweep->add_option("--nz", grid.nz, "Grid points along z0");
    sweep->fallthrough();

    int n_max = 6, contour_nz = 41;
    double contour_z0_min = 0.0, contour_z0_max = 4.0;
    bool allow_large_n = false;
    auto* contours = app.add_subcommand("contours", "Maximal-entanglement contour table");
    contours->add_option("--n-max", n_max, "Largest contour index");
    contours->add_option("--z0-min", contour_z0_min, "Reduced position difference, lower bound");
    contours->add_option("--z0-max", contour_z0_max, "Reduced position difference, upper bound");
    contours->add_option("--nz", contour_nz, "Points per contour");
    contours->add_flag("--allow-large-n", allow_large_n, "Permit contour indices above 6");
    contours->fallthrough();

    auto* verify = app.add_subcommand("verify", "Run the verification battery (exit 0/1)");
    verify->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const tdft::cli::Config config = build_config(st);

        std::ofstream file;
        if (!st.out_path.empty()) {
            file.open(st.out_path);
            if (!file) {
                std::cerr << "error: cannot open output file '" << st.out_path << "'\n";
                return 2;
            }
        }
        std::ostream& out = st.out_path.empty() ? std::cout : file;

        if (evolve->parsed()) return tdft::cli::cmd_evolve(config, out, rows);
        if (sweep->parsed()) return tdft::cli::cmd_sweep(config, grid, out, st.threads);
        if (contours->parsed()) {
            return tdft::cli::cmd_contours(config, n_max, contour_z0_min, contour_z0_max,
                                           contour_nz, out, allow_large_n);
        }
        if (verify->parsed()) return tdft::cli::cmd_verify(config, out);
        std::cerr << "error: no subcommand given\n";
        return 2;
    } catch (const tdft::cli::ConfigError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
}
