// engine.hpp — time-dependent Froehlich transformation for a perturbed system
// H = H0 + H1(t), given in the H0 eigenbasis.
//
// The generator S(t) is the anti-hermitian solution of
//     H1 + [H0, S] - i dS/dt = 0,
// which elementwise reads dS_mn/dt = -i (H1_mn(t) + E_mn S_mn) with
// E_mn = E_m - E_n. With S available, the effective Hamiltonian is
//     H_eff(t) = H0 + [H1(t), S(t)] / 2.
// Second-order time-dependent perturbation theory is provided alongside as an
// independent route to the same order; the two must agree (see tdft_order2).

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "tdft/quantum.hpp"

namespace tdft {

using qm::cplx;
using qm::Index;
using qm::Matrix;
using qm::Vector;

struct TdftProblem {
    // Eigenvalues E_m of H0 (rad/us), one per basis state.
    std::vector<double> energies;
    // H1(t) in the H0 eigenbasis (rad/us). Must be pure, reentrant and hermitian
    // at every queried time.
    std::function<Matrix(double)> h1_of_t;

    Index dim() const { return static_cast<Index>(energies.size()); }

    // max |E_m - E_n| over all pairs; 0 when all levels coincide.
    double max_level_spacing() const;

    // Default integration step 0.02 / max|E_mn| (>= 60 samples per fastest
    // oscillation). Falls back to `fallback` for fully degenerate spectra.
    double default_step(double fallback = 1e-2) const;
};

struct GeneratorTrajectory {
    std::vector<double> t_grid;      // strictly increasing, uniform spacing
    std::vector<Matrix> s_matrices;  // anti-hermitian; S(t_grid[0]) = 0

    double t_start() const { return t_grid.front(); }
    double t_end() const { return t_grid.back(); }
    double grid_step() const { return t_grid.size() > 1 ? t_grid[1] - t_grid[0] : 0.0; }

    // Componentwise linear interpolation. Throws std::out_of_range outside
    // [t_start, t_end].
    Matrix at(double t) const;

    // Index of the grid point closest to t. Throws outside the range.
    std::size_t nearest_index(double t) const;
};

struct PerturbationCoefficients {
    int order = 0;
    Vector c;  // C_m(t), one per basis state
};

// Integrates the generator equation with classic RK4 from S(t_start) = 0.
// `step` must satisfy step <= 0.1 / max|E_mn| (resolves the fastest
// oscillation); the integration step actually used is (t_end - t_start)/N for
// the smallest N respecting the bound. Only every record_stride-th point is
// stored; H1 hermiticity is checked at the stored points (tolerance 1e-10).
GeneratorTrajectory solve_generator(const TdftProblem& problem, double t_start, double t_end,
                                    double step, std::size_t record_stride = 1);

// Max over interior grid points of || H1 + [H0,S] - i dS/dt ||_F with dS/dt by
// central differences on the trajectory grid. Small residual certifies the
// solve; for an exact S the value decays as O(grid_step^2).
double generator_residual(const TdftProblem& problem, const GeneratorTrajectory& traj);

// H0 + [H1(t), S(t)]/2 with S linearly interpolated. Hermitian up to the
// interpolation error. Throws if t lies outside the trajectory.
Matrix effective_hamiltonian(const TdftProblem& problem, const GeneratorTrajectory& traj,
                             double t);

// Zeroth order: C_m = delta_{m,k} for initial state |k>.
PerturbationCoefficients perturbation_order0(Index dim, Index initial_index);

// First order, C_m(t) = -i  int_{t_start}^{t} e^{i E_mk t'} H1_mk(t') dt',
// by composite Simpson quadrature at the given step.
PerturbationCoefficients perturbation_order1(const TdftProblem& problem, Index initial_index,
                                             double t_start, double t, double step);

// Second order via the nested double integral: the inner cumulative integral is
// tabulated once per intermediate state (Simpson per interval), the outer
// integral is composite Simpson on the same grid. O(N) per matrix element.
PerturbationCoefficients perturbation_order2(const TdftProblem& problem, Index initial_index,
                                             double t_start, double t, double step);

// Second order through the transformation route:
//     C_m = C'_m + (S(t)^2)_mk / 2,
//     C'_m = -(i/2) int e^{i E_mk t'} [H1(t'), S(t')]_mk dt',
// quadrature on the trajectory grid (t snaps to the nearest grid point).
// Agrees with perturbation_order2 to quadrature accuracy.
PerturbationCoefficients tdft_order2(const TdftProblem& problem, const GeneratorTrajectory& traj,
                                     Index initial_index, double t);

}  // namespace tdft
