#include "tdft/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <thread>

#include <json.hpp>

#include "tdft/cavity.hpp"
#include "tdft/engine.hpp"
#include "tdft/exact.hpp"
#include "tdft/quantum.hpp"

namespace tdft::cli {

namespace {

using cavity::CavityParams;
using cavity::CouplingMode;
using cavity::ThetaMethod;

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    unsigned n_threads = threads > 0 ? static_cast<unsigned>(threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, count));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned w = 0; w < n_threads; ++w) {
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

ThetaMethod theta_method(const Config& config) {
    return config.mode == RunMode::quadrature ? ThetaMethod::quadrature
                                              : ThetaMethod::closed_form;
}

// Entanglement entropy of atom 1 for the pure two-atom state, through the
// generic reduced-state machinery.
double state_entropy(const cavity::ReducedState& state) {
    qm::Vector psi(4);
    psi << state.c_gg, state.c_ge, state.c_eg, state.c_ee;
    const qm::Matrix rho1 = qm::partial_trace_first(qm::projector(psi), 2, 2);
    return qm::von_neumann_entropy(rho1);
}

struct Check {
    double value = 0.0;
    bool passed = false;
};

constexpr double kSentinel = 1e300;

double sanitize(double value) { return std::isfinite(value) ? value : kSentinel; }

}  // namespace

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

int cmd_evolve(const Config& config, std::ostream& out, int rows) {
    if (rows < 2) throw ConfigError("evolve requires at least 2 output rows");
    config.validate();
    const CavityParams params = config.params();
    const double t_end = cavity::window_end(params, config.window_sigmas);

    std::vector<double> times(static_cast<std::size_t>(rows));
    for (int i = 0; i < rows; ++i) {
        times[static_cast<std::size_t>(i)] = t_end * static_cast<double>(i) / (rows - 1);
    }

    std::vector<qm::Vector> exact_states;
    if (config.mode == RunMode::exact) {
        const exact::ExcitationBlock block{0};
        exact_states = exact::integrate_exact_samples(
            params, block, qm::basis_ket(block.dim(), exact::ExcitationBlock::idx_ge),
            config.step_factor / std::abs(params.delta), times, config.window_sigmas);
    }

    out << "t_us,g1,g2,f,theta,p_ge,p_eg,entropy\n";
    const cavity::ReducedState initial{{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
    double theta = 0.0;
    for (int i = 0; i < rows; ++i) {
        const double t = times[static_cast<std::size_t>(i)];
        if (i > 0) {
            theta += cavity::theta_increment(params, times[static_cast<std::size_t>(i - 1)], t);
        }
        const double g1 = cavity::coupling(params, t, 1);
        const double g2 = cavity::coupling(params, t, 2);
        const double f = cavity::effective_coupling(params, t, CouplingMode::simplified).real();

        double p_ge = 0.0, p_eg = 0.0, entropy = 0.0;
        if (config.mode == RunMode::exact) {
            const qm::Vector& psi = exact_states[static_cast<std::size_t>(i)];
            p_ge = std::norm(psi(exact::ExcitationBlock::idx_ge));
            p_eg = std::norm(psi(exact::ExcitationBlock::idx_eg));
            const double atom_norm = std::sqrt(p_ge + p_eg);
            if (atom_norm > 0.0) {
                cavity::ReducedState projected;
                projected.c_ge = psi(exact::ExcitationBlock::idx_ge) / atom_norm;
                projected.c_eg = psi(exact::ExcitationBlock::idx_eg) / atom_norm;
                entropy = state_entropy(projected);
            }
        } else {
            const cavity::ReducedState state = cavity::evolve_reduced(initial, theta);
            p_ge = std::norm(state.c_ge);
            p_eg = std::norm(state.c_eg);
            entropy = state_entropy(state);
        }

        out << format_number(t) << ',' << format_number(g1) << ',' << format_number(g2) << ','
            << format_number(f) << ',' << format_number(theta) << ',' << format_number(p_ge)
            << ',' << format_number(p_eg) << ',' << format_number(entropy) << '\n';
    }
    return 0;
}

std::vector<RunRecord> run_sweep(const Config& config, const SweepGrid& grid, int threads) {
    if (!(grid.v_min > 0.0)) throw ConfigError("sweep grid requires v_min > 0");
    if (grid.nv < 2 || grid.nz < 2) throw ConfigError("sweep grid requires nv, nz >= 2");
    if (!(grid.v_max >= grid.v_min) || !(grid.z0_max >= grid.z0_min)) {
        throw ConfigError("sweep grid bounds are inverted");
    }
    if (config.mode == RunMode::exact) {
        throw ConfigError("mode = exact is not supported for grid sweeps");
    }
    config.validate();
    const CavityParams base = config.params();
    const ThetaMethod method = theta_method(config);

    const double dv = (grid.v_max - grid.v_min) / (grid.nv - 1);
    const double dz = (grid.z0_max - grid.z0_min) / (grid.nz - 1);
    const auto count = static_cast<std::size_t>(grid.nv) * static_cast<std::size_t>(grid.nz);
    std::vector<RunRecord> records(count);
    parallel_for(count, threads, [&](std::size_t idx) {
        const auto iz = static_cast<int>(idx / static_cast<std::size_t>(grid.nv));
        const auto iv = static_cast<int>(idx % static_cast<std::size_t>(grid.nv));
        const double v = grid.v_min + iv * dv;
        const double z0 = grid.z0_min + iz * dz;
        const CavityParams p = cavity::params_from_reduced(v, z0, base, config.window_sigmas);
        RunRecord rec;
        rec.v_reduced = v;
        rec.z0_reduced = z0;
        rec.theta_inf = cavity::theta_infinity(p, method).theta;
        const double c = std::cos(rec.theta_inf);
        rec.entropy = qm::binary_entropy(c * c);
        rec.method = config.mode;
        records[idx] = rec;
    });
    return records;
}

int cmd_sweep(const Config& config, const SweepGrid& grid, std::ostream& out, int threads) {
    const auto records = run_sweep(config, grid, threads);
    out << "v_reduced,z0_reduced,theta_inf,entropy\n";
    for (const auto& rec : records) {
        out << format_number(rec.v_reduced) << ',' << format_number(rec.z0_reduced) << ','
            << format_number(rec.theta_inf) << ',' << format_number(rec.entropy) << '\n';
    }
    return 0;
}

std::vector<ContourRow> run_contours(const Config& config, int n_max, double z0_min,
                                     double z0_max, int nz, bool allow_large_n) {
    if (n_max < 0) throw ConfigError("contours require n_max >= 0");
    if (n_max > 6 && !allow_large_n) {
        throw ConfigError("contours with n_max > 6 require the large-n flag");
    }
    if (nz < 2) throw ConfigError("contours require nz >= 2");
    if (!(z0_max >= z0_min)) throw ConfigError("contour z0 bounds are inverted");
    config.validate();
    const CavityParams base = config.params();

    std::vector<ContourRow> rows;
    rows.reserve(static_cast<std::size_t>(n_max + 1) * static_cast<std::size_t>(nz));
    const double dz = (z0_max - z0_min) / (nz - 1);
    for (int n = 0; n <= n_max; ++n) {
        for (int iz = 0; iz < nz; ++iz) {
            const double z0 = z0_min + iz * dz;
            const double v = cavity::contour_velocity(n, z0, allow_large_n);
            // Each emitted point must sit on the maximal-entanglement manifold.
            const CavityParams p =
                cavity::params_from_reduced(v, z0, base, config.window_sigmas);
            const double entropy = cavity::entanglement_final(p);
            if (std::abs(entropy - 1.0) > 1e-9) {
                throw std::runtime_error("contour point failed the entanglement check");
            }
            rows.push_back({n, z0, v});
        }
    }
    return rows;
}

int cmd_contours(const Config& config, int n_max, double z0_min, double z0_max, int nz,
                 std::ostream& out, bool allow_large_n) {
    const auto rows = run_contours(config, n_max, z0_min, z0_max, nz, allow_large_n);
    out << "n,z0_reduced,v_reduced\n";
    for (const auto& row : rows) {
        out << row.n << ',' << format_number(row.z0_reduced) << ','
            << format_number(row.v_reduced) << '\n';
    }
    return 0;
}

namespace {

// theta by quadrature must track the closed form across the sweep domain.
Check check_theta_agreement(const Config& config) {
    const CavityParams base = config.params();
    Check check;
    if (base.g0 == 0.0) {
        const double tc = cavity::theta_infinity(base, ThetaMethod::closed_form).theta;
        const double tq = cavity::theta_infinity(base, ThetaMethod::quadrature).theta;
        check.value = std::abs(tq - tc);
        check.passed = check.value <= 1e-3;
        return check;
    }
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> v_dist(0.05, 2.0);
    std::uniform_real_distribution<double> z_dist(-4.0, 4.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const CavityParams p = cavity::params_from_reduced(v_dist(rng), z_dist(rng), base,
                                                           config.window_sigmas);
        const double tc = cavity::theta_infinity(p, ThetaMethod::closed_form).theta;
        const double tq = cavity::theta_infinity(p, ThetaMethod::quadrature).theta;
        if (std::abs(tc) < 1e-15 && std::abs(tq) < 1e-15) continue;
        worst = std::max(worst, std::abs(tq - tc) / std::max(std::abs(tc), 1e-300));
    }
    check.value = worst;
    check.passed = worst <= 1e-3;
    return check;
}

// Sub-window of the transit centered where the coupling acts, capped in step
// count so the check stays cheap at stiff physical parameters.
std::pair<double, double> centered_subwindow(const CavityParams& params, double sigmas,
                                             double step, std::size_t max_steps) {
    const double t_end = cavity::window_end(params, sigmas);
    const double span = std::min(t_end, step * static_cast<double>(max_steps));
    const double mid = 0.5 * t_end;
    const double lo = std::max(0.0, mid - 0.5 * span);
    return {lo, std::min(t_end, lo + span)};
}

struct GeneratorChecks {
    Check residual;
    Check appendix;
};

GeneratorChecks check_generator(const Config& config) {
    const CavityParams params = config.params();
    const exact::ExcitationBlock block{0};
    const TdftProblem problem = exact::make_block_problem(params, block);
    const double step = problem.default_step();

    GeneratorChecks checks;
    {
        const auto [lo, hi] = centered_subwindow(params, config.window_sigmas, step, 200000);
        const GeneratorTrajectory traj = solve_generator(problem, lo, hi, step);
        double max_h1 = 0.0;
        for (double t : traj.t_grid) {
            max_h1 = std::max(max_h1, problem.h1_of_t(t).norm());
        }
        const double residual = generator_residual(problem, traj);
        checks.residual.value = residual;
        checks.residual.passed = residual <= 1e-4 * max_h1;

        const Index k = exact::ExcitationBlock::idx_ge;
        const auto c_tdft = tdft_order2(problem, traj, k, hi);
        const auto c_pt = perturbation_order2(problem, k, lo, hi, traj.grid_step());
        checks.appendix.value = (c_tdft.c - c_pt.c).cwiseAbs().maxCoeff();
        checks.appendix.passed = checks.appendix.value <= 1e-6;
    }
    return checks;
}

}  // namespace

int cmd_verify(const Config& config, std::ostream& out) {
    config.validate();
    const CavityParams params = config.params();

    const Check theta_check = check_theta_agreement(config);
    const GeneratorChecks gen_checks = check_generator(config);
    const exact::OracleReport oracle =
        exact::compare_tdft_exact(params, config.step_factor, config.window_sigmas);

    const double ratio = std::abs(params.delta) > 0.0 ? params.g0 / params.delta : 0.0;
    const double entropy_error = std::abs(oracle.entropy_exact - oracle.entropy_tdft);
    const bool oracle_passed = entropy_error <= 0.02 &&
                               oracle.max_population_error <= 5.0 * ratio * ratio &&
                               oracle.norm_defect <= 1e-9;

    const bool all_passed = theta_check.passed && gen_checks.residual.passed &&
                            gen_checks.appendix.passed && oracle_passed;

    nlohmann::ordered_json report;
    report["generator_residual"] = sanitize(gen_checks.residual.value);
    report["generator_residual_passed"] = gen_checks.residual.passed;
    report["appendix_equivalence_max_error"] = sanitize(gen_checks.appendix.value);
    report["appendix_equivalence_passed"] = gen_checks.appendix.passed;
    report["tdft_vs_exact_entropy_exact"] = sanitize(oracle.entropy_exact);
    report["tdft_vs_exact_entropy_tdft"] = sanitize(oracle.entropy_tdft);
    report["tdft_vs_exact_entropy_error"] = sanitize(entropy_error);
    report["tdft_vs_exact_max_population_error"] = sanitize(oracle.max_population_error);
    report["tdft_vs_exact_norm_defect"] = sanitize(oracle.norm_defect);
    report["tdft_vs_exact_photon_population"] = sanitize(oracle.photon_population);
    report["tdft_vs_exact_final_populations"] = oracle.final_populations;
    report["tdft_vs_exact_photon_reliable"] = oracle.photon_reliable;
    report["tdft_vs_exact_passed"] = oracle_passed;
    report["quadrature_vs_closed_form_theta_error"] = sanitize(theta_check.value);
    report["quadrature_vs_closed_form_passed"] = theta_check.passed;
    report["passed"] = all_passed;

    out << report.dump(2) << '\n';
    return all_passed ? 0 : 1;
}

}  // namespace tdft::cli
