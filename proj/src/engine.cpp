#include "tdft/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tdft {

namespace {

constexpr double kH1HermitianTol = 1e-10;
constexpr cplx kImag(0.0, 1.0);

// Largest admissible integration step: 0.1 / max|E_mn| resolves the fastest
// oscillation of the elementwise equation. No bound for degenerate spectra.
void check_step_bound(const TdftProblem& problem, double step) {
    if (step <= 0.0) throw std::invalid_argument("step must be positive");
    const double max_spacing = problem.max_level_spacing();
    if (max_spacing > 0.0 && step > 0.1 / max_spacing) {
        std::ostringstream msg;
        msg << "step " << step << " violates the oscillation bound 0.1/max|E_mn| = "
            << 0.1 / max_spacing;
        throw std::invalid_argument(msg.str());
    }
}

Matrix sample_h1_checked(const TdftProblem& problem, double t) {
    Matrix h1 = problem.h1_of_t(t);
    if (h1.rows() != problem.dim() || h1.cols() != problem.dim()) {
        throw std::invalid_argument("h1_of_t sample has wrong dimension");
    }
    if (!qm::is_hermitian(h1, kH1HermitianTol)) {
        std::ostringstream msg;
        msg << "h1_of_t sample at t = " << t << " is not hermitian within " << kH1HermitianTol;
        throw std::invalid_argument(msg.str());
    }
    return h1;
}

// E_mn = E_m - E_n as a dense real matrix.
Eigen::MatrixXd level_spacing_matrix(const TdftProblem& problem) {
    const Index n = problem.dim();
    Eigen::MatrixXd emn(n, n);
    for (Index m = 0; m < n; ++m) {
        for (Index k = 0; k < n; ++k) {
            emn(m, k) = problem.energies[static_cast<std::size_t>(m)] -
                        problem.energies[static_cast<std::size_t>(k)];
        }
    }
    return emn;
}

void check_initial_index(const TdftProblem& problem, Index initial_index) {
    if (initial_index < 0 || initial_index >= problem.dim()) {
        throw std::out_of_range("initial_index out of range");
    }
}

struct QuadratureGrid {
    double t0 = 0.0;
    double h = 0.0;
    std::size_t n_intervals = 0;  // even
};

QuadratureGrid make_even_grid(double t_start, double t_end, double step) {
    if (!(t_end > t_start)) throw std::invalid_argument("t_end must exceed t_start");
    auto n = static_cast<std::size_t>(std::ceil((t_end - t_start) / step));
    n = std::max<std::size_t>(n, 2);
    if (n % 2 != 0) ++n;
    return {t_start, (t_end - t_start) / static_cast<double>(n), n};
}

// Composite Simpson weight for node i of an even interval count n.
double simpson_weight(std::size_t i, std::size_t n) {
    if (i == 0 || i == n) return 1.0;
    return (i % 2 == 1) ? 4.0 : 2.0;
}

}  // namespace

double TdftProblem::max_level_spacing() const {
    double max_spacing = 0.0;
    for (std::size_t m = 0; m < energies.size(); ++m) {
        for (std::size_t n = m + 1; n < energies.size(); ++n) {
            max_spacing = std::max(max_spacing, std::abs(energies[m] - energies[n]));
        }
    }
    return max_spacing;
}

double TdftProblem::default_step(double fallback) const {
    const double max_spacing = max_level_spacing();
    return max_spacing > 0.0 ? 0.02 / max_spacing : fallback;
}

Matrix GeneratorTrajectory::at(double t) const {
    const double h = grid_step();
    const double slack = 1e-9 * std::max(1.0, std::abs(t_end()));
    if (t < t_start() - slack || t > t_end() + slack) {
        std::ostringstream msg;
        msg << "time " << t << " outside trajectory range [" << t_start() << ", " << t_end()
            << "]";
        throw std::out_of_range(msg.str());
    }
    if (t_grid.size() == 1 || h == 0.0) return s_matrices.front();
    const double pos = (t - t_start()) / h;
    auto lo = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0,
                                                  static_cast<double>(t_grid.size() - 2)));
    const double w = std::clamp(pos - static_cast<double>(lo), 0.0, 1.0);
    return (1.0 - w) * s_matrices[lo] + w * s_matrices[lo + 1];
}

std::size_t GeneratorTrajectory::nearest_index(double t) const {
    const double h = grid_step();
    const double slack = 1e-9 * std::max(1.0, std::abs(t_end()));
    if (t < t_start() - slack || t > t_end() + slack) {
        throw std::out_of_range("time outside trajectory range");
    }
    if (t_grid.size() == 1 || h == 0.0) return 0;
    const double pos = std::round((t - t_start()) / h);
    return static_cast<std::size_t>(
        std::clamp(pos, 0.0, static_cast<double>(t_grid.size() - 1)));
}

GeneratorTrajectory solve_generator(const TdftProblem& problem, double t_start, double t_end,
                                    double step, std::size_t record_stride) {
    if (!(t_end > t_start)) throw std::invalid_argument("t_end must exceed t_start");
    if (record_stride == 0) throw std::invalid_argument("record_stride must be positive");
    check_step_bound(problem, step);

    auto n_steps = static_cast<std::size_t>(std::ceil((t_end - t_start) / step));
    n_steps = std::max<std::size_t>(n_steps, 1);
    // Round up to a stride multiple so the recorded grid stays uniform.
    n_steps = ((n_steps + record_stride - 1) / record_stride) * record_stride;
    const double h = (t_end - t_start) / static_cast<double>(n_steps);

    const Index dim = problem.dim();
    const Eigen::MatrixXd emn = level_spacing_matrix(problem);
    const Matrix emn_c = emn.cast<cplx>();

    GeneratorTrajectory traj;
    traj.t_grid.reserve(n_steps / record_stride + 1);
    traj.s_matrices.reserve(n_steps / record_stride + 1);

    Matrix s = Matrix::Zero(dim, dim);
    sample_h1_checked(problem, t_start);
    traj.t_grid.push_back(t_start);
    traj.s_matrices.push_back(s);

    // dS/dt = -i (H1(t) + E_mn .* S), classic RK4. The equation is linear and
    // preserves anti-hermiticity of S exactly; only roundoff accumulates.
    Matrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), stage(dim, dim);
    auto deriv = [&](double t, const Matrix& state, Matrix& out) {
        out = -kImag * (problem.h1_of_t(t) + emn_c.cwiseProduct(state));
    };
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t = t_start + static_cast<double>(i) * h;
        deriv(t, s, k1);
        stage = s + (0.5 * h) * k1;
        deriv(t + 0.5 * h, stage, k2);
        stage = s + (0.5 * h) * k2;
        deriv(t + 0.5 * h, stage, k3);
        stage = s + h * k3;
        deriv(t + h, stage, k4);
        s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if ((i + 1) % record_stride == 0) {
            const double t_next = t_start + static_cast<double>(i + 1) * h;
            sample_h1_checked(problem, t_next);
            traj.t_grid.push_back(t_next);
            traj.s_matrices.push_back(s);
        }
    }
    return traj;
}

double generator_residual(const TdftProblem& problem, const GeneratorTrajectory& traj) {
    if (traj.t_grid.size() < 3) {
        throw std::invalid_argument("generator_residual: trajectory needs >= 3 grid points");
    }
    const Matrix emn_c = level_spacing_matrix(problem).cast<cplx>();
    const double h = traj.grid_step();
    double residual = 0.0;
    for (std::size_t i = 1; i + 1 < traj.t_grid.size(); ++i) {
        const Matrix ds = (traj.s_matrices[i + 1] - traj.s_matrices[i - 1]) / (2.0 * h);
        const Matrix r = problem.h1_of_t(traj.t_grid[i]) +
                         emn_c.cwiseProduct(traj.s_matrices[i]) - kImag * ds;
        residual = std::max(residual, r.norm());
    }
    return residual;
}

Matrix effective_hamiltonian(const TdftProblem& problem, const GeneratorTrajectory& traj,
                             double t) {
    const Matrix s = traj.at(t);
    Matrix h_eff = qm::commutator(problem.h1_of_t(t), s) * 0.5;
    for (Index m = 0; m < problem.dim(); ++m) {
        h_eff(m, m) += problem.energies[static_cast<std::size_t>(m)];
    }
    return h_eff;
}

PerturbationCoefficients perturbation_order0(Index dim, Index initial_index) {
    if (initial_index < 0 || initial_index >= dim) {
        throw std::out_of_range("initial_index out of range");
    }
    PerturbationCoefficients out;
    out.order = 0;
    out.c = Vector::Zero(dim);
    out.c(initial_index) = 1.0;
    return out;
}

PerturbationCoefficients perturbation_order1(const TdftProblem& problem, Index initial_index,
                                             double t_start, double t, double step) {
    check_initial_index(problem, initial_index);
    check_step_bound(problem, step);
    const auto grid = make_even_grid(t_start, t, step);
    const Index dim = problem.dim();
    const Index k = initial_index;

    Vector accum = Vector::Zero(dim);
    for (std::size_t i = 0; i <= grid.n_intervals; ++i) {
        const double ti = grid.t0 + static_cast<double>(i) * grid.h;
        const Matrix h1 = problem.h1_of_t(ti);
        const double w = simpson_weight(i, grid.n_intervals);
        for (Index m = 0; m < dim; ++m) {
            const double emk = problem.energies[static_cast<std::size_t>(m)] -
                               problem.energies[static_cast<std::size_t>(k)];
            accum(m) += w * std::exp(kImag * emk * ti) * h1(m, k);
        }
    }
    PerturbationCoefficients out;
    out.order = 1;
    out.c = -kImag * (grid.h / 3.0) * accum;
    return out;
}

PerturbationCoefficients perturbation_order2(const TdftProblem& problem, Index initial_index,
                                             double t_start, double t, double step) {
    check_initial_index(problem, initial_index);
    check_step_bound(problem, step);
    const auto grid = make_even_grid(t_start, t, step);
    const Index dim = problem.dim();
    const Index k = initial_index;
    const Eigen::MatrixXd emn = level_spacing_matrix(problem);

    // Inner integrals J_n(t') = int_{t0}^{t'} e^{i E_nk t''} H1_nk(t'') dt''
    // advance one interval at a time (Simpson with midpoint), while the outer
    // composite Simpson accumulates sum_n e^{i E_mn t'} H1_mn(t') J_n(t').
    Vector inner = Vector::Zero(dim);
    Vector accum = Vector::Zero(dim);

    auto inner_integrand = [&](double tt, Vector& out) {
        const Matrix h1 = problem.h1_of_t(tt);
        for (Index n = 0; n < dim; ++n) {
            out(n) = std::exp(kImag * emn(n, k) * tt) * h1(n, k);
        }
    };

    Vector f_lo(dim), f_mid(dim), f_hi(dim);
    inner_integrand(grid.t0, f_lo);
    for (std::size_t i = 0; i <= grid.n_intervals; ++i) {
        const double ti = grid.t0 + static_cast<double>(i) * grid.h;
        const Matrix h1 = problem.h1_of_t(ti);
        const double w = simpson_weight(i, grid.n_intervals);
        for (Index m = 0; m < dim; ++m) {
            cplx g(0.0, 0.0);
            for (Index n = 0; n < dim; ++n) {
                g += std::exp(kImag * emn(m, n) * ti) * h1(m, n) * inner(n);
            }
            accum(m) += w * g;
        }
        if (i == grid.n_intervals) break;
        inner_integrand(ti + 0.5 * grid.h, f_mid);
        inner_integrand(ti + grid.h, f_hi);
        inner += (grid.h / 6.0) * (f_lo + 4.0 * f_mid + f_hi);
        f_lo.swap(f_hi);
    }
    PerturbationCoefficients out;
    out.order = 2;
    out.c = -(grid.h / 3.0) * accum;
    return out;
}

PerturbationCoefficients tdft_order2(const TdftProblem& problem, const GeneratorTrajectory& traj,
                                     Index initial_index, double t) {
    check_initial_index(problem, initial_index);
    const std::size_t i_t = traj.nearest_index(t);
    if (i_t == 0) throw std::invalid_argument("tdft_order2: t coincides with trajectory start");
    const Index dim = problem.dim();
    const Index k = initial_index;
    const Eigen::MatrixXd emn = level_spacing_matrix(problem);
    const double h = traj.grid_step();

    auto integrand = [&](std::size_t i, Vector& out) {
        const Matrix comm = qm::commutator(problem.h1_of_t(traj.t_grid[i]), traj.s_matrices[i]);
        for (Index m = 0; m < dim; ++m) {
            out(m) = std::exp(kImag * emn(m, k) * traj.t_grid[i]) * comm(m, k);
        }
    };

    // Composite Simpson over the trajectory nodes; 3/8 tail (or a single
    // trapezoid for a 1-interval range) when the interval count is odd.
    Vector accum = Vector::Zero(dim);
    Vector node(dim);
    std::size_t simpson_end = (i_t % 2 == 0) ? i_t : (i_t >= 3 ? i_t - 3 : 0);
    for (std::size_t i = 0; i <= simpson_end && simpson_end > 0; ++i) {
        integrand(i, node);
        accum += (h / 3.0) * simpson_weight(i, simpson_end) * node;
    }
    if (i_t % 2 != 0) {
        if (i_t >= 3) {
            static constexpr double w38[4] = {1.0, 3.0, 3.0, 1.0};
            for (std::size_t j = 0; j <= 3; ++j) {
                integrand(simpson_end + j, node);
                accum += (3.0 * h / 8.0) * w38[j] * node;
            }
        } else {
            integrand(0, node);
            accum += (h / 2.0) * node;
            integrand(1, node);
            accum += (h / 2.0) * node;
        }
    }

    // The S^2/2 term lives in the Schroedinger picture; the e^{i E_mk t} phase
    // maps it onto the interaction-picture coefficients used throughout.
    const Matrix& s_t = traj.s_matrices[i_t];
    const Matrix s_sq = s_t * s_t;
    const double t_snap = traj.t_grid[i_t];
    PerturbationCoefficients out;
    out.order = 2;
    out.c = -(kImag * 0.5) * accum;
    for (Index m = 0; m < dim; ++m) {
        out.c(m) += 0.5 * s_sq(m, k) * std::exp(kImag * emn(m, k) * t_snap);
    }
    return out;
}

}  // namespace tdft
