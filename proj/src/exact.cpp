#include "tdft/exact.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tdft::exact {

namespace {

constexpr cplx kImag(0.0, 1.0);

// Couplings of the block written as (row, col, amplitude(t)) with row the
// state of one more atomic excitation; every such pair has E_row - E_col =
// delta, so the phase-stripped matrix is e^{i delta t} x (real couplings).
struct CouplingPair {
    int row, col;
    double bose;  // sqrt(n+1) or sqrt(n)
    int atom;     // whose g_j(t) multiplies this entry
};

std::vector<CouplingPair> block_couplings(const ExcitationBlock& block) {
    const double root_np1 = std::sqrt(static_cast<double>(block.n_ref + 1));
    std::vector<CouplingPair> pairs = {
        {ExcitationBlock::idx_ge, ExcitationBlock::idx_gg, root_np1, 2},
        {ExcitationBlock::idx_eg, ExcitationBlock::idx_gg, root_np1, 1},
    };
    if (block.n_ref > 0) {
        const double root_n = std::sqrt(static_cast<double>(block.n_ref));
        pairs.push_back({ExcitationBlock::idx_ee, ExcitationBlock::idx_ge, root_n, 1});
        pairs.push_back({ExcitationBlock::idx_ee, ExcitationBlock::idx_eg, root_n, 2});
    }
    return pairs;
}

}  // namespace

std::vector<double> block_energies(const CavityParams& params, const ExcitationBlock& block) {
    std::vector<double> e = {0.0, params.delta, params.delta};
    if (block.n_ref > 0) e.push_back(2.0 * params.delta);
    return e;
}

Matrix build_block_hamiltonian(const CavityParams& params, double t,
                               const ExcitationBlock& block) {
    const int dim = block.dim();
    Matrix h = Matrix::Zero(dim, dim);
    const auto energies = block_energies(params, block);
    for (int i = 0; i < dim; ++i) h(i, i) = energies[static_cast<std::size_t>(i)];
    for (const auto& pair : block_couplings(block)) {
        const double g = cavity::coupling(params, t, pair.atom) * pair.bose;
        h(pair.row, pair.col) = g;
        h(pair.col, pair.row) = g;
    }
    return h;
}

TdftProblem make_block_problem(const CavityParams& params, const ExcitationBlock& block) {
    TdftProblem problem;
    problem.energies = block_energies(params, block);
    const auto pairs = block_couplings(block);
    const int dim = block.dim();
    problem.h1_of_t = [params, pairs, dim](double t) {
        Matrix h1 = Matrix::Zero(dim, dim);
        for (const auto& pair : pairs) {
            const double g = cavity::coupling(params, t, pair.atom) * pair.bose;
            h1(pair.row, pair.col) = g;
            h1(pair.col, pair.row) = g;
        }
        return h1;
    };
    return problem;
}

namespace {

// Shared stepping loop. When sample_nodes is non-null it must be an ascending
// list of node indices in [0, n_steps]; the phase-restored state at each one is
// appended to *samples.
Vector propagate_block(const CavityParams& params, const ExcitationBlock& block,
                       const Vector& initial, double step, double sigmas,
                       const std::vector<std::size_t>* sample_nodes,
                       std::vector<Vector>* samples, std::size_t n_steps_hint = 0) {
    const int dim = block.dim();
    if (initial.size() != dim) {
        throw std::invalid_argument("integrate_exact: initial state has wrong dimension");
    }
    if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    if (step > 0.02 / std::abs(params.delta)) {
        std::ostringstream msg;
        msg << "step " << step << " violates the bound 0.02/|delta| = "
            << 0.02 / std::abs(params.delta);
        throw std::invalid_argument(msg.str());
    }
    const double t_end = cavity::window_end(params, sigmas);
    if (!(t_end > 0.0)) throw std::invalid_argument("empty integration window");

    std::size_t n_steps = n_steps_hint;
    if (n_steps == 0) {
        n_steps = static_cast<std::size_t>(std::ceil(t_end / step));
        n_steps = std::max<std::size_t>(n_steps, 1);
    }
    const double h = t_end / static_cast<double>(n_steps);

    const auto pairs = block_couplings(block);
    const auto energies = block_energies(params, block);

    // Phase-stripped frame: psi = D(t) phi with D = diag(e^{-i E_m t}), so
    // i dphi/dt = B(t) phi where B_mn = H1_mn e^{i E_mn t}. Every coupled pair
    // here has E_mn = delta, hence one complex phase per evaluation.
    Vector phi = initial;
    Vector k1(dim), k2(dim), k3(dim), k4(dim), stage(dim);
    auto deriv = [&](double t, const Vector& state, Vector& out) {
        out.setZero();
        const cplx phase = std::exp(kImag * params.delta * t);
        for (const auto& pr : pairs) {
            const cplx b = cavity::coupling(params, t, pr.atom) * pr.bose * phase;
            out(pr.row) += -kImag * b * state(pr.col);
            out(pr.col) += -kImag * std::conj(b) * state(pr.row);
        }
    };
    auto restore = [&](std::size_t node) {
        Vector psi(dim);
        const double t = static_cast<double>(node) * h;
        for (int m = 0; m < dim; ++m) {
            psi(m) = std::exp(-kImag * energies[static_cast<std::size_t>(m)] * t) * phi(m);
        }
        return psi;
    };

    std::size_t next_sample = 0;
    auto maybe_sample = [&](std::size_t node) {
        if (sample_nodes == nullptr || samples == nullptr) return;
        while (next_sample < sample_nodes->size() && (*sample_nodes)[next_sample] == node) {
            samples->push_back(restore(node));
            ++next_sample;
        }
    };

    maybe_sample(0);
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t = static_cast<double>(i) * h;
        deriv(t, phi, k1);
        stage = phi + (0.5 * h) * k1;
        deriv(t + 0.5 * h, stage, k2);
        stage = phi + (0.5 * h) * k2;
        deriv(t + 0.5 * h, stage, k3);
        stage = phi + h * k3;
        deriv(t + h, stage, k4);
        phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        maybe_sample(i + 1);
    }
    return restore(n_steps);
}

}  // namespace

Vector integrate_exact(const CavityParams& params, const ExcitationBlock& block,
                       const Vector& initial, double step, double sigmas) {
    return propagate_block(params, block, initial, step, sigmas, nullptr, nullptr);
}

std::vector<Vector> integrate_exact_samples(const CavityParams& params,
                                            const ExcitationBlock& block, const Vector& initial,
                                            double step, const std::vector<double>& sample_times,
                                            double sigmas) {
    const double t_end = cavity::window_end(params, sigmas);
    auto n_steps = static_cast<std::size_t>(std::ceil(t_end / step));
    n_steps = std::max<std::size_t>(n_steps, 1);
    const double h = t_end / static_cast<double>(n_steps);

    std::vector<std::size_t> nodes;
    nodes.reserve(sample_times.size());
    for (double t : sample_times) {
        if (t < -1e-9 || t > t_end * (1.0 + 1e-12) + 1e-9) {
            throw std::invalid_argument("sample time outside the integration window");
        }
        const double pos = std::round(t / h);
        auto node = static_cast<std::size_t>(
            std::min(std::max(pos, 0.0), static_cast<double>(n_steps)));
        if (!nodes.empty() && node < nodes.back()) {
            throw std::invalid_argument("sample times must be ascending");
        }
        nodes.push_back(node);
    }

    std::vector<Vector> samples;
    samples.reserve(nodes.size());
    propagate_block(params, block, initial, step, sigmas, &nodes, &samples, n_steps);
    return samples;
}

OracleReport compare_tdft_exact(const CavityParams& params, double step_factor, double sigmas) {
    const ExcitationBlock block{0};
    const Vector initial = qm::basis_ket(block.dim(), ExcitationBlock::idx_ge);
    const double step = step_factor / std::abs(params.delta);
    const Vector psi = integrate_exact(params, block, initial, step, sigmas);

    OracleReport report;
    report.final_populations.resize(static_cast<std::size_t>(block.dim()));
    for (int m = 0; m < block.dim(); ++m) {
        report.final_populations[static_cast<std::size_t>(m)] = std::norm(psi(m));
    }
    report.norm_defect = std::abs(psi.norm() - 1.0);
    report.photon_population = report.final_populations[ExcitationBlock::idx_gg];
    report.photon_reliable = report.photon_population < 1e-3;

    // Exact entropy: drop the photon-carrying component, renormalize the atomic
    // pair and reduce over atom 2 (basis {gg, ge, eg, ee} = atom1 (x) atom2).
    const cplx c_ge = psi(ExcitationBlock::idx_ge);
    const cplx c_eg = psi(ExcitationBlock::idx_eg);
    const double atom_norm = std::sqrt(std::norm(c_ge) + std::norm(c_eg));
    if (atom_norm > 0.0) {
        Vector atomic = Vector::Zero(4);
        atomic(1) = c_ge / atom_norm;
        atomic(2) = c_eg / atom_norm;
        const Matrix rho1 = qm::partial_trace_first(qm::projector(atomic), 2, 2);
        report.entropy_exact = qm::von_neumann_entropy(rho1);
    }

    const double theta = cavity::theta_infinity(params).theta;
    const double c2 = std::cos(theta) * std::cos(theta);
    report.entropy_tdft = qm::binary_entropy(c2);

    std::vector<double> tdft_populations(static_cast<std::size_t>(block.dim()), 0.0);
    tdft_populations[ExcitationBlock::idx_ge] = c2;
    tdft_populations[ExcitationBlock::idx_eg] = 1.0 - c2;
    for (std::size_t m = 0; m < tdft_populations.size(); ++m) {
        report.max_population_error = std::max(
            report.max_population_error,
            std::abs(report.final_populations[m] - tdft_populations[m]));
    }
    return report;
}

}  // namespace tdft::exact
