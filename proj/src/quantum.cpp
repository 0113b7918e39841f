#include "tdft/quantum.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace tdft::qm {

bool is_hermitian(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void validate_density(const Matrix& rho) {
    if (rho.rows() != rho.cols()) {
        throw std::invalid_argument("validate_density: matrix is not square");
    }
    if (!is_hermitian(rho, kHermitianTol)) {
        throw std::invalid_argument("validate_density: matrix is not hermitian");
    }
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol) {
        std::ostringstream msg;
        msg << "validate_density: trace " << tr << " deviates from 1 by more than " << kTraceTol;
        throw std::invalid_argument(msg.str());
    }
    const Eigen::VectorXd evs = hermitian_eigenvalues(rho);
    if (evs.minCoeff() < kEigenvalueFloor) {
        std::ostringstream msg;
        msg << "validate_density: eigenvalue " << evs.minCoeff() << " below floor "
            << kEigenvalueFloor;
        throw std::invalid_argument(msg.str());
    }
}

Vector basis_ket(Index dim, Index i) {
    if (dim <= 0) throw std::invalid_argument("basis_ket: dim must be positive");
    if (i < 0 || i >= dim) throw std::out_of_range("basis_ket: index out of range");
    Vector v = Vector::Zero(dim);
    v(i) = 1.0;
    return v;
}

Matrix projector(const Vector& psi) { return psi * psi.adjoint(); }

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m, double tol) {
    if (!is_hermitian(m, tol)) {
        throw std::invalid_argument("hermitian_eigenvalues: matrix is not hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("hermitian_eigenvalues: eigensolver failed");
    }
    return solver.eigenvalues();
}

Matrix expm_antihermitian(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("expm_antihermitian: matrix is not square");
    }
    if ((a + a.adjoint()).cwiseAbs().maxCoeff() > tol) {
        throw std::invalid_argument("expm_antihermitian: matrix is not anti-hermitian");
    }
    // A = -iH with H hermitian; exp(A) = V diag(e^{-i lambda}) V^dagger.
    const Matrix h = cplx(0.0, 1.0) * a;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("expm_antihermitian: eigensolver failed");
    }
    const Eigen::VectorXd lambda = solver.eigenvalues();
    Vector phases(lambda.size());
    for (Index k = 0; k < lambda.size(); ++k) {
        phases(k) = std::exp(cplx(0.0, -lambda(k)));
    }
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

Matrix tensor_product(const Matrix& a, const Matrix& b) {
    if (a.size() == 0 || b.size() == 0) {
        throw std::invalid_argument("tensor_product: empty operand");
    }
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix commutator(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw std::invalid_argument("commutator: operands must be square with equal dims");
    }
    return a * b - b * a;
}

Matrix partial_trace_first(const Matrix& rho, Index dim_a, Index dim_b) {
    if (dim_a <= 0 || dim_b <= 0) {
        throw std::invalid_argument("partial_trace_first: dims must be positive");
    }
    const Index n = dim_a * dim_b;
    if (rho.rows() != n || rho.cols() != n) {
        std::ostringstream msg;
        msg << "partial_trace_first: rho is " << rho.rows() << "x" << rho.cols()
            << " but dim_a*dim_b = " << n;
        throw std::invalid_argument(msg.str());
    }
    Matrix out = Matrix::Zero(dim_a, dim_a);
    for (Index ia = 0; ia < dim_a; ++ia) {
        for (Index ja = 0; ja < dim_a; ++ja) {
            cplx sum(0.0, 0.0);
            for (Index b = 0; b < dim_b; ++b) {
                sum += rho(ia * dim_b + b, ja * dim_b + b);
            }
            out(ia, ja) = sum;
        }
    }
    return out;
}

double von_neumann_entropy(const Matrix& rho) {
    if (!is_hermitian(rho, kHermitianTol)) {
        throw std::invalid_argument("von_neumann_entropy: input is not hermitian");
    }
    const Eigen::VectorXd evs = hermitian_eigenvalues(rho);
    double entropy = 0.0;
    for (Index k = 0; k < evs.size(); ++k) {
        double lambda = evs(k);
        if (lambda < kEigenvalueFloor) {
            std::ostringstream msg;
            msg << "von_neumann_entropy: eigenvalue " << lambda << " below floor "
                << kEigenvalueFloor;
            throw std::invalid_argument(msg.str());
        }
        if (lambda <= 0.0) continue;  // clamp [-1e-10, 0] to zero
        entropy -= lambda * std::log2(lambda);
    }
    return std::max(entropy, 0.0);
}

double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) {
        throw std::invalid_argument("binary_entropy: p must lie in [0, 1]");
    }
    double e = 0.0;
    if (p > 0.0) e -= p * std::log2(p);
    if (p < 1.0) e -= (1.0 - p) * std::log2(1.0 - p);
    return std::max(e, 0.0);
}

}  // namespace tdft::qm
