// bloch.hpp - Density-matrix <-> expanded-Bloch-vector conversions, quantum
// transfer-matrix extraction, and the u/v split of dephasing evolutions.
#pragma once

#include <Eigen/Dense>

#include <utility>

#include "rcnoise/linalg.hpp"

namespace rcnoise {

// Eigenvalue slack absorbs floating-point drift after long evolutions.
inline constexpr double kDensityPositivitySlack = 1e-10;

// Throws validation_error unless rho is Hermitian, trace-1 and positive
// semidefinite (within tolerances).
void require_density(const Matrix& rho);

// Expanded Bloch vector (n0, nx, ny, nz) with n0 = 1. Convention:
// rho = (n0 I + nx sx + ny sy + nz sz) / 2, n_i = Tr(sigma_i rho).
struct ExpandedBloch {
    double n0 = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm3() const;
};

ExpandedBloch density_to_bloch(const Matrix& rho);
Matrix bloch_to_density(const ExpandedBloch& n);

// 4x4 real map on expanded Bloch vectors, row/column order (0, x, y, z).
struct TransferMatrix4 {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();

    ExpandedBloch apply(const ExpandedBloch& n) const;
    Matrix apply(const Matrix& rho) const;
};

// Partial trace over the bath factor of a bipartite state, system first.
Matrix partial_trace_bath(const Matrix& rho, Eigen::Index bath_dim);

// Transfer matrix of evolving rho_S (x) rho_b0 under exp(-i h_total t) and
// tracing out the bath. Computed operationally from four basis initial
// conditions, so no generator normalization enters.
TransferMatrix4 quantum_transfer_matrix(const Matrix& h_total,
                                        const Matrix& rho_b0,
                                        double t);

// Same, but from an already-evolved total unitary.
TransferMatrix4 transfer_from_unitary(const Matrix& u_total, const Matrix& rho_b0);

// Bath operators of a dephasing evolution U = I (x) u + sigma_z (x) v.
struct UVPair {
    Matrix u;
    Matrix v;
};

// Throws structural_error if u_total has sigma_x / sigma_y components
// (does not commute with sigma_z (x) I).
UVPair uv_decompose(const Matrix& u_total);

// (c, s) block entries of the dephasing transfer matrix from the u/v pair:
// the (x, y) block is [[c, -s], [s, c]].
std::pair<double, double> cs_from_uv(const UVPair& uv, const Matrix& rho_b0);

} // namespace rcnoise
