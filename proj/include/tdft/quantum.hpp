// quantum.hpp — dense complex linear algebra for small Hilbert spaces:
// Kronecker products, commutators, bipartite reduced states, von Neumann entropy.

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace tdft::qm {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Tolerances shared across the library. All Hilbert spaces here have dim <= 8,
// so these are comfortably above accumulated roundoff.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kEigenvalueFloor = -1e-10;

// --------------------------- predicates and checks --------------------------

bool is_hermitian(const Matrix& m, double tol = kHermitianTol);

// Throws std::invalid_argument unless rho is square, hermitian (1e-12),
// unit trace (1e-9) and positive semidefinite down to the -1e-10 floor.
void validate_density(const Matrix& rho);

// --------------------------- basic constructions ----------------------------

// Basis ket |i> in a dim-dimensional space.
Vector basis_ket(Index dim, Index i);

// Pure-state projector |psi><psi| (input assumed normalized).
Matrix projector(const Vector& psi);

// Eigenvalues of a hermitian matrix, ascending. Throws on non-hermitian input.
Eigen::VectorXd hermitian_eigenvalues(const Matrix& m, double tol = kHermitianTol);

// exp(A) for anti-hermitian A, via the eigendecomposition of iA. The result is
// unitary up to roundoff. Throws if A is not anti-hermitian.
Matrix expm_antihermitian(const Matrix& a, double tol = 1e-10);

// --------------------------- spec operations --------------------------------

// Kronecker product; (A (x) B)(C (x) D) = AC (x) BD. Index convention:
// row (i_a, i_b) of the product maps to i_a * rows(B) + i_b.
Matrix tensor_product(const Matrix& a, const Matrix& b);

// AB - BA. Throws on non-square or mismatched dimensions.
Matrix commutator(const Matrix& a, const Matrix& b);

// Reduced state of the first factor of a bipartite system: contracts the second
// index pair of rho (dim_a*dim_b square) and returns a dim_a x dim_a matrix.
// Trace is preserved. Throws on dimension mismatch.
Matrix partial_trace_first(const Matrix& rho, Index dim_a, Index dim_b);

// -sum_i lambda_i log2 lambda_i over the eigenvalues of rho, with 0 log 0 := 0.
// Eigenvalues in [-1e-10, 0] are clamped to zero; anything below that floor
// signals upstream corruption and throws. Result lies in [0, log2 dim].
double von_neumann_entropy(const Matrix& rho);

// Binary entropy H2(p) = -p log2 p - (1-p) log2 (1-p), in bits.
double binary_entropy(double p);

}  // namespace tdft::qm
