// cavity.hpp — two identical two-level atoms crossing a single-mode cavity in
// sequence. The Gaussian mode profile makes the atom-photon couplings
// time-dependent; eliminating the photon at second order leaves an effective
// atom-atom exchange coupling f(t) whose accumulated phase
// theta(t) = int f dt' fixes the final two-atom entanglement.
//
// Units: time in us, length in um, angular frequencies in rad/us. Quoted MHz
// coupling/detuning values map 1 MHz -> 1 rad/us; every dimensionless output
// (reduced velocity, theta, entropy) is insensitive to that convention.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "tdft/quantum.hpp"

namespace tdft::cavity {

using qm::cplx;

struct CavityParams {
    double g0 = 0.0;     // vacuum Rabi frequency at the mode center (rad/us)
    double delta = 0.0;  // detuning omega_0 - omega (rad/us), nonzero
    double d = 0.0;      // half-width of the cavity mode (um)
    double v = 0.0;      // atomic velocity along z (um/us == m/s)
    double z1_0 = 0.0;   // initial position of atom 1 (um), |z1_0| >= 5 d
    double z2_0 = 0.0;   // initial position of atom 2 (um), |z2_0| >= 5 d
    double n_p = 0.0;    // mean photon number (dimensionless, >= 0)
};

// Throws std::invalid_argument on violated parameter constraints. The
// weak-coupling gate |g0/delta| <= 0.1 may be lifted explicitly; everything
// downstream is then second-order-unreliable by construction.
void validate(const CavityParams& params, bool allow_strong_coupling = false);

// g_j(t) = g0 exp(-(z_j^0 + v t)^2 / d^2) for atom j in {1, 2}.
double coupling(const CavityParams& params, double t, int atom);

// Simulation window [0, T]: both atoms start at least `sigmas` half-widths
// before the center (validated) and T is when the trailing atom has passed
// `sigmas` half-widths beyond it. sigmas = 6 keeps edge couplings < 2e-16 g0.
double window_end(const CavityParams& params, double sigmas = 6.0);

// Photon-elimination coefficients x_j(t): g_j + delta x_j - i dx_j/dt = 0.
struct XTrajectory {
    std::vector<double> t_grid;  // uniform
    std::vector<cplx> x1, x2;
    // max_t |x_j(t) + g_j(t)/delta| observed along the unstrided integration.
    double max_adiabatic_dev1 = 0.0;
    double max_adiabatic_dev2 = 0.0;

    cplx at(double t, int atom) const;  // linear interpolation, throws outside
};

// RK4 from x_j = 0 on [0, window_end(sigmas)] at the given step
// (step <= 0.02/|delta| enforced); both couplings must be < 1e-10 g0 at the
// window start. Stores every record_stride-th point.
XTrajectory solve_x(const CavityParams& params, double step, double sigmas = 6.0,
                    std::size_t record_stride = 1);

// Adiabatic reference x_j(t) ~ -g_j(t)/delta.
cplx adiabatic_x(const CavityParams& params, double t, int atom);

enum class CouplingMode { full, simplified };

// Full: Delta_j = delta - (g_j^* x_j + g_j x_j^*)(1 + 2 n_p) (needs x).
// Simplified (adiabatic limit): Delta_j = delta + 2 (1 + 2 n_p) g_j(t)^2 / delta.
double effective_detuning(const CavityParams& params, double t, int atom, CouplingMode mode,
                          const XTrajectory* x = nullptr);

// Full: f = -(g_1^* x_2 + g_2 x_1^*)/2 (needs x).
// Simplified: f = g_1(t) g_2(t) / delta (real).
cplx effective_coupling(const CavityParams& params, double t, CouplingMode mode,
                        const XTrajectory* x = nullptr);

enum class ThetaMethod { closed_form, quadrature };

struct ThetaResult {
    double theta = 0.0;  // rad
    ThetaMethod method = ThetaMethod::closed_form;
};

// theta(+inf) = sqrt(pi/2) g0^2 d / (v delta) exp(-(z^0)^2 / (2 d^2)) with
// z^0 = z1_0 - z2_0. The quadrature route integrates the simplified f(t) by
// Simpson's rule over the window where both atoms are within 6 d of the center.
ThetaResult theta_infinity(const CavityParams& params,
                           ThetaMethod method = ThetaMethod::closed_form,
                           int quad_intervals = 4000);

// Accumulated theta(t) = int_0^t f(t') dt' (simplified coupling), Simpson with
// `subdiv` sub-intervals per call. Used by the evolution trace.
double theta_increment(const CavityParams& params, double t0, double t1, int subdiv = 8);

// Two-atom amplitudes over {|gg>, |ge>, |eg>, |ee>}.
struct ReducedState {
    cplx c_gg{0.0, 0.0}, c_ge{0.0, 0.0}, c_eg{0.0, 0.0}, c_ee{0.0, 0.0};
    double squared_norm() const;
};

// Rotation by theta on the {|ge>, |eg>} block:
//   c_ge' = c_ge cos(theta) - i c_eg sin(theta)
//   c_eg' = -i c_ge sin(theta) + c_eg cos(theta)
// |gg>, |ee> amplitudes untouched; exactly norm-preserving.
// Throws std::invalid_argument if the input norm deviates from 1 by > 1e-9.
ReducedState evolve_reduced(const ReducedState& initial, double theta);

// Final entanglement entropy (bits) for the initial state |ge>:
// binary entropy of cos^2 theta(+inf).
double entanglement_final(const CavityParams& params,
                          ThetaMethod method = ThetaMethod::closed_form);

// Velocity (units g0^2 d / delta) of the n-th maximal-entanglement contour
// theta(+inf) = (2n+1) pi/4 at reduced position difference z0 (units d):
//   v = sqrt(pi/2) * 4 / ((2n+1) pi) * exp(-z0^2 / 2).
// n is capped at 6 unless allow_large_n is set.
double contour_velocity(int n, double z0_reduced, bool allow_large_n = false);

// Physical parameters for a reduced-unit point: v in units g0^2 d / delta and
// z0 = z1_0 - z2_0 in units d, with g0, delta, d, n_p taken from `base`.
// Starting positions put both atoms at least `sigmas` half-widths out.
CavityParams params_from_reduced(double v_reduced, double z0_reduced, const CavityParams& base,
                                 double sigmas = 6.0);

}  // namespace tdft::cavity
