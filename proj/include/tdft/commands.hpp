// commands.hpp — implementations behind the CLI subcommands. Everything writes
// deterministic CSV/JSON: fixed headers, 9 significant digits, '.' decimal
// separator, LF line endings, results gathered by grid index regardless of the
// worker-thread count.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tdft/config.hpp"

namespace tdft::cli {

struct SweepGrid {
    double v_min = 0.05, v_max = 2.0;   // reduced velocity (units g0^2 d / delta)
    double z0_min = -4.0, z0_max = 4.0; // reduced position difference (units d)
    int nv = 2, nz = 2;                 // >= 2; uniform, endpoints included
};

struct RunRecord {
    double v_reduced = 0.0;
    double z0_reduced = 0.0;
    double theta_inf = 0.0;  // rad
    double entropy = 0.0;    // bits, in [0, 1]
    RunMode method = RunMode::closed_form;
};

struct ContourRow {
    int n = 0;
    double z0_reduced = 0.0;
    double v_reduced = 0.0;
};

// Shortest round-trippable representation at 9 significant digits.
std::string format_number(double value);

// Time series of one transit: columns
//   t_us,g1,g2,f,theta,p_ge,p_eg,entropy
// with the initial state |ge>. Modes closed_form/quadrature evolve the closed
// {|ge>,|eg>} subspace by the accumulated theta(t); mode exact propagates the
// block Hamiltonian and reports photon-projected populations/entropy.
int cmd_evolve(const Config& config, std::ostream& out, int rows = 1001);

// One record per grid point, z0-major then v. Pure per-point work dispatched
// to `threads` workers (<= 0 picks the hardware count).
std::vector<RunRecord> run_sweep(const Config& config, const SweepGrid& grid, int threads);

// CSV header: v_reduced,z0_reduced,theta_inf,entropy
int cmd_sweep(const Config& config, const SweepGrid& grid, std::ostream& out, int threads);

// Maximal-entanglement contours theta(+inf) = (2n+1) pi/4 for n = 0..n_max.
// Every emitted row is re-verified to give entanglement 1 within 1e-9.
std::vector<ContourRow> run_contours(const Config& config, int n_max, double z0_min,
                                     double z0_max, int nz, bool allow_large_n = false);

// CSV header: n,z0_reduced,v_reduced
int cmd_contours(const Config& config, int n_max, double z0_min, double z0_max, int nz,
                 std::ostream& out, bool allow_large_n = false);

// Self-verification battery for the given configuration. Emits a flat JSON
// object (numbers plus a boolean `passed` per check) and returns the process
// exit code: 0 when every threshold passes, 1 otherwise.
int cmd_verify(const Config& config, std::ostream& out);

}  // namespace tdft::cli
