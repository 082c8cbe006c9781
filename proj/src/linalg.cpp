#include "rcnoise/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace rcnoise {

namespace {
constexpr double kPi = std::numbers::pi;
}

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

Matrix sigma_y() {
    Matrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0),
         Complex(0.0, 1.0), 0.0;
    return m;
}

Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1.0, 0.0,
         0.0, -1.0;
    return m;
}

Matrix sigma(int i) {
    switch (i) {
        case 0: return identity(2);
        case 1: return sigma_x();
        case 2: return sigma_y();
        case 3: return sigma_z();
        default: throw validation_error("sigma: index must be in 0..3");
    }
}

bool is_hermitian(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    Matrix d = m * m.adjoint() - Matrix::Identity(m.rows(), m.cols());
    return d.cwiseAbs().maxCoeff() <= tol;
}

void require_hermitian(const Matrix& m, double tol) {
    if (!is_hermitian(m, tol)) {
        std::ostringstream os;
        os << "matrix is not Hermitian within " << tol;
        throw validation_error(os.str());
    }
}

void require_unitary(const Matrix& m, double tol) {
    if (!is_unitary(m, tol)) {
        std::ostringstream os;
        os << "matrix is not unitary within " << tol;
        throw validation_error(os.str());
    }
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix expm_hermitian(const Matrix& h, double t) {
    require_hermitian(h);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success)
        throw numerical_error("expm_hermitian: eigendecomposition failed");
    Vector phases(h.rows());
    for (Eigen::Index j = 0; j < h.rows(); ++j)
        phases(j) = std::exp(Complex(0.0, -es.eigenvalues()(j) * t));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix haar_random_unitary(Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw validation_error("haar_random_unitary: dimension must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double re = gauss(rng);
            double im = gauss(rng);
            g(i, j) = Complex(re, im);
        }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // phase correction on the R diagonal makes the distribution Haar
    for (Eigen::Index j = 0; j < n; ++j) {
        Complex d = r(j, j);
        double a = std::abs(d);
        q.col(j) *= (a > 0.0) ? d / a : Complex(1.0, 0.0);
    }
    // fix the global phase: det = 1
    Complex det = q.determinant();
    q *= std::exp(Complex(0.0, -std::arg(det) / static_cast<double>(n)));
    return q;
}

Eigenphases eigenphases(const Matrix& u) {
    require_unitary(u);
    // Schur form of a normal matrix is diagonal; Q stays unitary under
    // eigenvalue degeneracy, unlike raw eigenvector extraction.
    Eigen::ComplexSchur<Matrix> schur(u, /*computeU=*/true);
    if (schur.info() != Eigen::Success)
        throw numerical_error("eigenphases: Schur decomposition failed");
    Eigenphases out;
    out.vectors = schur.matrixU();
    out.phases.resize(u.rows());
    for (Eigen::Index j = 0; j < u.rows(); ++j) {
        // eigenvalue e^{-i d}, so d = -arg(lambda) in [-pi, pi)
        double d = -std::arg(schur.matrixT()(j, j));
        if (d <= -kPi) d = kPi;  // half-open interval (-pi, pi]
        out.phases(j) = d;
    }
    return out;
}

Matrix log_unitary(const Matrix& u) {
    Eigenphases ep = eigenphases(u);
    return ep.vectors * ep.phases.cast<Complex>().asDiagonal() * ep.vectors.adjoint();
}

Matrix random_density(Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw validation_error("random_density: dimension must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double re = gauss(rng);
            double im = gauss(rng);
            g(i, j) = Complex(re, im);
        }
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    // symmetrize away the last bits of roundoff
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return rho;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace rcnoise
