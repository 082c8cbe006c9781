// linalg.hpp - Small dense complex linear algebra: Kronecker products,
// Hermitian matrix exponentials, Haar-random unitaries, unitary logarithms.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

#include "rcnoise/errors.hpp"

namespace rcnoise {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Tolerance constants used by the validation checks below. All dense
// operations share this one record.
struct Tolerances {
    double hermiticity = 1e-12;
    double unitarity = 1e-10;
    double round_trip = 1e-9;
};

inline const Tolerances& default_tol() {
    static const Tolerances t{};
    return t;
}

// --------------------------- constant matrices ------------------------------

Matrix identity(Eigen::Index n);
Matrix sigma_x();
Matrix sigma_y();
Matrix sigma_z();

// sigma(0) = I, sigma(1..3) = x, y, z
Matrix sigma(int i);

// --------------------------- checks ------------------------------------------

bool is_hermitian(const Matrix& m, double tol = default_tol().hermiticity);
bool is_unitary(const Matrix& m, double tol = default_tol().unitarity);

void require_hermitian(const Matrix& m, double tol = default_tol().hermiticity);
void require_unitary(const Matrix& m, double tol = default_tol().unitarity);

// --------------------------- operations -------------------------------------

// Kronecker product, dimensions multiply.
Matrix kron(const Matrix& a, const Matrix& b);

// exp(-i h t) via eigendecomposition of the Hermitian matrix h.
Matrix expm_hermitian(const Matrix& h, double t);

// Haar-distributed member of SU(n): QR of a complex Ginibre matrix with the
// R-diagonal phase correction, then global phase fixed so det = 1.
// Deterministic for a fixed seed.
Matrix haar_random_unitary(Eigen::Index n, std::uint64_t seed);

struct Eigenphases {
    Eigen::VectorXd phases;  // d_j in (-pi, pi], exact pi mapped to +pi
    Matrix vectors;          // orthonormal columns, u = sum_j e^{-i d_j} |j><j|
};

Eigenphases eigenphases(const Matrix& u);

// Hermitian h with expm_hermitian(h, 1) == u, eigenvalues in (-pi, pi].
Matrix log_unitary(const Matrix& u);

// Random full-rank density matrix G G^dag / Tr from a complex Ginibre draw.
Matrix random_density(Eigen::Index n, std::uint64_t seed);

// --------------------------- seeding helpers --------------------------------

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic per-sample substream seed; results independent of how samples
// are distributed over workers.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 0x9e3779b97f4a7c15ULL));
}

} // namespace rcnoise
