#include "rcnoise/bloch.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace rcnoise {

void require_density(const Matrix& rho) {
    if (rho.rows() != rho.cols())
        throw validation_error("density matrix must be square");
    require_hermitian(rho);
    double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > 1e-12)
        throw validation_error("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    if (es.eigenvalues().minCoeff() < -kDensityPositivitySlack) {
        std::ostringstream os;
        os << "density matrix has negative eigenvalue " << es.eigenvalues().minCoeff();
        throw validation_error(os.str());
    }
}

double ExpandedBloch::norm3() const { return std::sqrt(x * x + y * y + z * z); }

ExpandedBloch density_to_bloch(const Matrix& rho) {
    if (rho.rows() != 2 || rho.cols() != 2)
        throw validation_error("density_to_bloch: expected a 2x2 matrix");
    require_density(rho);
    ExpandedBloch n;
    n.n0 = rho.trace().real();
    n.x = (sigma_x() * rho).trace().real();
    n.y = (sigma_y() * rho).trace().real();
    n.z = (sigma_z() * rho).trace().real();
    return n;
}

Matrix bloch_to_density(const ExpandedBloch& n) {
    if (std::abs(n.n0 - 1.0) > 1e-12)
        throw validation_error("bloch_to_density: n0 must be 1");
    if (n.norm3() > 1.0 + 1e-10)
        throw validation_error("bloch_to_density: Bloch norm exceeds 1");
    return 0.5 * (n.n0 * identity(2) + n.x * sigma_x() + n.y * sigma_y() + n.z * sigma_z());
}

ExpandedBloch TransferMatrix4::apply(const ExpandedBloch& n) const {
    Eigen::Vector4d v(n.n0, n.x, n.y, n.z);
    Eigen::Vector4d w = m * v;
    return ExpandedBloch{w(0), w(1), w(2), w(3)};
}

Matrix TransferMatrix4::apply(const Matrix& rho) const {
    return bloch_to_density(apply(density_to_bloch(rho)));
}

Matrix partial_trace_bath(const Matrix& rho, Eigen::Index bath_dim) {
    if (bath_dim < 1 || rho.rows() != rho.cols() || rho.rows() % bath_dim != 0)
        throw validation_error("partial_trace_bath: dimension mismatch");
    Eigen::Index sys_dim = rho.rows() / bath_dim;
    Matrix out = Matrix::Zero(sys_dim, sys_dim);
    for (Eigen::Index i = 0; i < sys_dim; ++i)
        for (Eigen::Index j = 0; j < sys_dim; ++j)
            for (Eigen::Index b = 0; b < bath_dim; ++b)
                out(i, j) += rho(i * bath_dim + b, j * bath_dim + b);
    return out;
}

TransferMatrix4 transfer_from_unitary(const Matrix& u_total, const Matrix& rho_b0) {
    Eigen::Index dim = u_total.rows();
    if (dim % 2 != 0 || rho_b0.rows() != dim / 2 || rho_b0.cols() != dim / 2)
        throw validation_error("transfer_from_unitary: dimension mismatch");
    Eigen::Index bath_dim = dim / 2;
    require_density(rho_b0);
    require_unitary(u_total);

    // Evolve the four basis initial conditions (1,0,0,0), (1,e_k) and solve
    // for the affine map column by column.
    auto evolve = [&](const ExpandedBloch& n) {
        Matrix rho0 = kron(bloch_to_density(n), rho_b0);
        Matrix rho_t = u_total * rho0 * u_total.adjoint();
        Matrix rho_s = partial_trace_bath(rho_t, bath_dim);
        Eigen::Vector4d out;
        out(0) = rho_s.trace().real();
        out(1) = (sigma_x() * rho_s).trace().real();
        out(2) = (sigma_y() * rho_s).trace().real();
        out(3) = (sigma_z() * rho_s).trace().real();
        return out;
    };

    Eigen::Vector4d base = evolve(ExpandedBloch{1, 0, 0, 0});
    TransferMatrix4 t;
    t.m.col(0) = base;
    ExpandedBloch probes[3] = {{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 1}};
    for (int k = 0; k < 3; ++k)
        t.m.col(k + 1) = evolve(probes[k]) - base;
    return t;
}

TransferMatrix4 quantum_transfer_matrix(const Matrix& h_total,
                                        const Matrix& rho_b0,
                                        double t) {
    if (h_total.rows() != 2 * rho_b0.rows())
        throw validation_error("quantum_transfer_matrix: dimension mismatch");
    return transfer_from_unitary(expm_hermitian(h_total, t), rho_b0);
}

UVPair uv_decompose(const Matrix& u_total) {
    Eigen::Index dim = u_total.rows();
    if (dim % 2 != 0 || u_total.cols() != dim)
        throw validation_error("uv_decompose: expected even square dimension");
    require_unitary(u_total);
    Eigen::Index d = dim / 2;

    Matrix sz_i = kron(sigma_z(), identity(d));
    if ((u_total * sz_i - sz_i * u_total).cwiseAbs().maxCoeff() > 1e-10)
        throw structural_error(
            "uv_decompose: unitary does not commute with sigma_z (x) I "
            "(sigma_x/sigma_y components present; not a dephasing evolution)");

    // u = Tr_S[U]/2, v = Tr_S[sigma_z U]/2: half-sum and half-difference of
    // the diagonal system blocks.
    Matrix b00 = u_total.topLeftCorner(d, d);
    Matrix b11 = u_total.bottomRightCorner(d, d);
    UVPair uv;
    uv.u = 0.5 * (b00 + b11);
    uv.v = 0.5 * (b00 - b11);

    Matrix recon = kron(identity(2), uv.u) + kron(sigma_z(), uv.v);
    if ((recon - u_total).cwiseAbs().maxCoeff() > 1e-10)
        throw structural_error("uv_decompose: reconstruction failed");
    return uv;
}

std::pair<double, double> cs_from_uv(const UVPair& uv, const Matrix& rho_b0) {
    const Matrix& u = uv.u;
    const Matrix& v = uv.v;
    if (u.rows() != v.rows() || u.rows() != rho_b0.rows())
        throw validation_error("cs_from_uv: dimension mismatch");
    if ((u * u.adjoint() + v * v.adjoint() - identity(u.rows())).cwiseAbs().maxCoeff() > 1e-9 ||
        (u * v.adjoint() + v * u.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
        throw structural_error("cs_from_uv: u/v unitarity relations violated");
    require_density(rho_b0);

    // rho_10 is multiplied by c + i s; the real and imaginary parts come from
    // the Hermitian and anti-Hermitian bath traces respectively.
    Complex cz = ((u.adjoint() * u - v.adjoint() * v) * rho_b0).trace();
    Complex sz = ((v.adjoint() * u - u.adjoint() * v) * rho_b0).trace();
    double c = cz.real();
    double s = sz.imag();
    double r2 = c * c + s * s;
    if (r2 > 1.0 + 1e-9)
        throw structural_error("cs_from_uv: c^2 + s^2 exceeds 1");
    return {c, s};
}

} // namespace rcnoise
