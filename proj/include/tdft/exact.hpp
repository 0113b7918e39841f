// exact.hpp — numerically exact propagation of the two-atom/one-mode
// interaction-picture Hamiltonian
//     H(t) = delta (sz_1 + sz_2) + [ g_1(t) s1+ a + g_2(t) s2+ a + h.c. ]
// on an excitation-number-conserving block. The rotating-wave coupling makes
// the 3- or 4-dimensional block the entire accessible space for Fock photon
// states, so there is no truncation error; this is the ground truth against
// which the transformed (effective) dynamics is measured.

#pragma once

#include <vector>

#include "tdft/cavity.hpp"
#include "tdft/engine.hpp"
#include "tdft/quantum.hpp"

namespace tdft::exact {

using cavity::CavityParams;
using qm::cplx;
using qm::Matrix;
using qm::Vector;

// Block of fixed total excitation number n_ref + 1, spanned by (in order)
//   |gg, n+1>, |ge, n>, |eg, n>, |ee, n-1>,
// with the last label absent for n_ref = 0.
struct ExcitationBlock {
    int n_ref = 0;

    int dim() const { return n_ref == 0 ? 3 : 4; }
    // Index of a basis label within the block; the photon-rich |gg, n+1> is 0,
    // |ge, n> is 1, |eg, n> is 2, |ee, n-1> is 3.
    static constexpr int idx_gg = 0, idx_ge = 1, idx_eg = 2, idx_ee = 3;
};

// Diagonal energies delta*(excited-atom count) per basis label, in block order.
std::vector<double> block_energies(const CavityParams& params, const ExcitationBlock& block);

// Hermitian block Hamiltonian at time t: bare detunings on the diagonal plus
// the couplings g_j(t) with Bose factors sqrt(n+1), sqrt(n).
Matrix build_block_hamiltonian(const CavityParams& params, double t, const ExcitationBlock& block);

// The same block as a generic transformation problem (H0 energies + H1(t)
// callback), for cross-checking the generic engine against this model.
TdftProblem make_block_problem(const CavityParams& params, const ExcitationBlock& block);

// RK4 propagation of i d|psi>/dt = H(t)|psi> over [0, window_end(sigmas)].
// step <= 0.02/|delta| is enforced. Internally the diagonal phases are
// factored out analytically and RK4 acts on the residual coupling, which keeps
// the norm drift per full window below 1e-9 at the mandated steps; populations
// are identical to direct integration. No renormalization is applied.
Vector integrate_exact(const CavityParams& params, const ExcitationBlock& block,
                       const Vector& initial, double step, double sigmas = 6.0);

// Same propagation, additionally returning the state at the requested times
// (snapped to the nearest integration node; sample_times must be ascending and
// inside [0, window_end]). Used for time-resolved traces.
std::vector<Vector> integrate_exact_samples(const CavityParams& params,
                                            const ExcitationBlock& block, const Vector& initial,
                                            double step, const std::vector<double>& sample_times,
                                            double sigmas = 6.0);

struct OracleReport {
    std::vector<double> final_populations;  // block order
    double entropy_exact = 0.0;             // bits
    double entropy_tdft = 0.0;              // bits
    double max_population_error = 0.0;
    double norm_defect = 0.0;
    double photon_population = 0.0;       // residual |<gg,1|psi>|^2 after transit
    bool photon_reliable = true;          // false when the residual >= 1e-3
};

// Propagates |ge, 0> exactly through the transit, projects out the photon mode
// (valid when the residual photon population is < 1e-3; flagged otherwise),
// evaluates the atomic entanglement entropy via the reduced state of atom 1,
// and compares populations and entropy against the closed-subspace rotation by
// theta(+inf).
OracleReport compare_tdft_exact(const CavityParams& params, double step_factor = 0.02,
                                double sigmas = 6.0);

}  // namespace tdft::exact
