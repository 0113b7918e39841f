#include "tdft/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace tdft::cavity {

namespace {

constexpr cplx kImag(0.0, 1.0);

double position(const CavityParams& p, double t, int atom) {
    const double z0 = (atom == 1) ? p.z1_0 : p.z2_0;
    return z0 + p.v * t;
}

void check_atom(int atom) {
    if (atom != 1 && atom != 2) throw std::invalid_argument("atom must be 1 or 2");
}

void check_x_available(CouplingMode mode, const XTrajectory* x) {
    if (mode == CouplingMode::full && x == nullptr) {
        throw std::invalid_argument("full coupling mode requires an x trajectory");
    }
}

}  // namespace

void validate(const CavityParams& p, bool allow_strong_coupling) {
    if (p.delta == 0.0) throw std::invalid_argument("delta must be nonzero");
    if (!(p.d > 0.0)) throw std::invalid_argument("d must be positive");
    if (!(p.v > 0.0)) throw std::invalid_argument("v must be positive");
    if (p.n_p < 0.0) throw std::invalid_argument("n_p must be >= 0");
    if (std::abs(p.z1_0) < 5.0 * p.d || std::abs(p.z2_0) < 5.0 * p.d) {
        throw std::invalid_argument("initial positions must satisfy |z_j^0| >= 5 d");
    }
    if (!allow_strong_coupling && std::abs(p.g0 / p.delta) > 0.1) {
        std::ostringstream msg;
        msg << "|g0/delta| = " << std::abs(p.g0 / p.delta)
            << " exceeds the weak-coupling gate 0.1 (pass the unsafe flag to override)";
        throw std::invalid_argument(msg.str());
    }
}

double coupling(const CavityParams& p, double t, int atom) {
    check_atom(atom);
    const double z = position(p, t, atom);
    return p.g0 * std::exp(-(z * z) / (p.d * p.d));
}

double window_end(const CavityParams& p, double sigmas) {
    const double t1 = (sigmas * p.d - p.z1_0) / p.v;
    const double t2 = (sigmas * p.d - p.z2_0) / p.v;
    return std::max(t1, t2);
}

cplx XTrajectory::at(double t, int atom) const {
    check_atom(atom);
    const auto& x = (atom == 1) ? x1 : x2;
    const double t0 = t_grid.front();
    const double t1 = t_grid.back();
    const double slack = 1e-9 * std::max(1.0, std::abs(t1));
    if (t < t0 - slack || t > t1 + slack) {
        throw std::out_of_range("time outside x trajectory range");
    }
    if (t_grid.size() == 1) return x.front();
    const double h = t_grid[1] - t_grid[0];
    const double pos = (t - t0) / h;
    auto lo = static_cast<std::size_t>(
        std::clamp(std::floor(pos), 0.0, static_cast<double>(t_grid.size() - 2)));
    const double w = std::clamp(pos - static_cast<double>(lo), 0.0, 1.0);
    return (1.0 - w) * x[lo] + w * x[lo + 1];
}

XTrajectory solve_x(const CavityParams& p, double step, double sigmas,
                    std::size_t record_stride) {
    if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    if (record_stride == 0) throw std::invalid_argument("record_stride must be positive");
    if (step > 0.02 / std::abs(p.delta)) {
        std::ostringstream msg;
        msg << "step " << step << " violates the bound 0.02/|delta| = "
            << 0.02 / std::abs(p.delta);
        throw std::invalid_argument(msg.str());
    }
    const double t_end = window_end(p, sigmas);
    if (!(t_end > 0.0)) throw std::invalid_argument("empty integration window");
    if (p.g0 > 0.0 &&
        (coupling(p, 0.0, 1) >= 1e-10 * p.g0 || coupling(p, 0.0, 2) >= 1e-10 * p.g0)) {
        throw std::invalid_argument("window must start where both couplings are < 1e-10 g0");
    }

    auto n_steps = static_cast<std::size_t>(std::ceil(t_end / step));
    n_steps = std::max<std::size_t>(n_steps, 1);
    n_steps = ((n_steps + record_stride - 1) / record_stride) * record_stride;
    const double h = t_end / static_cast<double>(n_steps);

    XTrajectory traj;
    traj.t_grid.reserve(n_steps / record_stride + 1);
    traj.x1.reserve(n_steps / record_stride + 1);
    traj.x2.reserve(n_steps / record_stride + 1);
    traj.t_grid.push_back(0.0);
    traj.x1.emplace_back(0.0, 0.0);
    traj.x2.emplace_back(0.0, 0.0);

    // dx_j/dt = -i (g_j(t) + delta x_j), classic RK4 for both atoms at once.
    cplx x[2] = {cplx(0.0, 0.0), cplx(0.0, 0.0)};
    auto deriv = [&p](double t, int atom, cplx xv) {
        return -kImag * (coupling(p, t, atom) + p.delta * xv);
    };
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t = static_cast<double>(i) * h;
        for (int a = 0; a < 2; ++a) {
            const cplx k1 = deriv(t, a + 1, x[a]);
            const cplx k2 = deriv(t + 0.5 * h, a + 1, x[a] + 0.5 * h * k1);
            const cplx k3 = deriv(t + 0.5 * h, a + 1, x[a] + 0.5 * h * k2);
            const cplx k4 = deriv(t + h, a + 1, x[a] + h * k3);
            x[a] += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        const double t_next = static_cast<double>(i + 1) * h;
        traj.max_adiabatic_dev1 =
            std::max(traj.max_adiabatic_dev1, std::abs(x[0] - adiabatic_x(p, t_next, 1)));
        traj.max_adiabatic_dev2 =
            std::max(traj.max_adiabatic_dev2, std::abs(x[1] - adiabatic_x(p, t_next, 2)));
        if ((i + 1) % record_stride == 0) {
            traj.t_grid.push_back(t_next);
            traj.x1.push_back(x[0]);
            traj.x2.push_back(x[1]);
        }
    }
    return traj;
}

cplx adiabatic_x(const CavityParams& p, double t, int atom) {
    return cplx(-coupling(p, t, atom) / p.delta, 0.0);
}

double effective_detuning(const CavityParams& p, double t, int atom, CouplingMode mode,
                          const XTrajectory* x) {
    check_atom(atom);
    check_x_available(mode, x);
    const double g = coupling(p, t, atom);
    if (mode == CouplingMode::simplified) {
        return p.delta + 2.0 * (1.0 + 2.0 * p.n_p) * g * g / p.delta;
    }
    const cplx xj = x->at(t, atom);
    return p.delta - (g * xj + g * std::conj(xj)).real() * (1.0 + 2.0 * p.n_p);
}

cplx effective_coupling(const CavityParams& p, double t, CouplingMode mode,
                        const XTrajectory* x) {
    check_x_available(mode, x);
    const double g1 = coupling(p, t, 1);
    const double g2 = coupling(p, t, 2);
    if (mode == CouplingMode::simplified) {
        return cplx(g1 * g2 / p.delta, 0.0);
    }
    return -0.5 * (g1 * x->at(t, 2) + g2 * std::conj(x->at(t, 1)));
}

ThetaResult theta_infinity(const CavityParams& p, ThetaMethod method, int quad_intervals) {
    if (method == ThetaMethod::closed_form) {
        const double z0 = p.z1_0 - p.z2_0;
        const double theta = std::sqrt(std::numbers::pi / 2.0) * p.g0 * p.g0 * p.d /
                             (p.v * p.delta) * std::exp(-z0 * z0 / (2.0 * p.d * p.d));
        return {theta, ThetaMethod::closed_form};
    }
    if (quad_intervals < 2) throw std::invalid_argument("quad_intervals must be >= 2");
    if (quad_intervals % 2 != 0) ++quad_intervals;
    // Window where both atoms sit within 6 d of the center; the product of
    // couplings outside it is below e^-32 of its peak.
    const double t_lo =
        std::max((-6.0 * p.d - p.z1_0) / p.v, (-6.0 * p.d - p.z2_0) / p.v);
    const double t_hi = std::min((6.0 * p.d - p.z1_0) / p.v, (6.0 * p.d - p.z2_0) / p.v);
    if (!(t_hi > t_lo)) return {0.0, ThetaMethod::quadrature};
    const double h = (t_hi - t_lo) / quad_intervals;
    double accum = 0.0;
    for (int i = 0; i <= quad_intervals; ++i) {
        const double t = t_lo + i * h;
        const double w = (i == 0 || i == quad_intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        accum += w * effective_coupling(p, t, CouplingMode::simplified).real();
    }
    return {accum * h / 3.0, ThetaMethod::quadrature};
}

double theta_increment(const CavityParams& p, double t0, double t1, int subdiv) {
    if (subdiv < 1) throw std::invalid_argument("subdiv must be >= 1");
    const int n = 2 * subdiv;  // even interval count for Simpson
    const double h = (t1 - t0) / n;
    double accum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        accum += w * effective_coupling(p, t0 + i * h, CouplingMode::simplified).real();
    }
    return accum * h / 3.0;
}

double ReducedState::squared_norm() const {
    return std::norm(c_gg) + std::norm(c_ge) + std::norm(c_eg) + std::norm(c_ee);
}

ReducedState evolve_reduced(const ReducedState& initial, double theta) {
    if (std::abs(initial.squared_norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("evolve_reduced: initial state is not normalized");
    }
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    ReducedState out = initial;
    out.c_ge = initial.c_ge * c - kImag * initial.c_eg * s;
    out.c_eg = -kImag * initial.c_ge * s + initial.c_eg * c;
    return out;
}

double entanglement_final(const CavityParams& p, ThetaMethod method) {
    const double theta = theta_infinity(p, method).theta;
    const double c = std::cos(theta);
    return qm::binary_entropy(c * c);
}

double contour_velocity(int n, double z0_reduced, bool allow_large_n) {
    if (n < 0) throw std::invalid_argument("contour index n must be >= 0");
    if (n > 6 && !allow_large_n) {
        throw std::invalid_argument("contour index n > 6 requires allow_large_n");
    }
    const double pi = std::numbers::pi;
    return std::sqrt(pi / 2.0) * 4.0 / ((2.0 * n + 1.0) * pi) *
           std::exp(-z0_reduced * z0_reduced / 2.0);
}

CavityParams params_from_reduced(double v_reduced, double z0_reduced, const CavityParams& base,
                                 double sigmas) {
    if (!(v_reduced > 0.0)) throw std::invalid_argument("reduced velocity must be positive");
    CavityParams p = base;
    p.v = v_reduced * base.g0 * base.g0 * base.d / base.delta;
    // Trailing atom starts `sigmas` half-widths out; the other further back so
    // that z1_0 - z2_0 = z0_reduced * d and both satisfy |z| >= sigmas d.
    p.z1_0 = -(sigmas + std::max(0.0, -z0_reduced)) * base.d;
    p.z2_0 = p.z1_0 - z0_reduced * base.d;
    return p;
}

}  // namespace tdft::cavity
