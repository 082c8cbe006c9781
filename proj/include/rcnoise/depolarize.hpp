// depolarize.hpp - Depolarization: Kraus reference channel, Haar-measure
// Monte Carlo classical model, the analytic single-qubit curve, and the
// Clifford-group finite model.
#pragma once

#include <cstdint>
#include <vector>

#include "rcnoise/dephasing.hpp"
#include "rcnoise/linalg.hpp"

namespace rcnoise {

// (1 - p) rho + p I / N. For qubit arrays (N = 2^n) computed through the
// Pauli Kraus sum; other dimensions use the convex form directly.
Matrix kraus_depolarize(const Matrix& rho0, double p);

// The Pauli Kraus operators of the depolarizing channel on n qubits.
KrausSet depolarize_kraus_set(int n_qubits, double p);

// One Monte Carlo point of rho(t) = avg over Haar U of e^{-i H_U t} rho0
// e^{i H_U t}, H_U the principal log of U. Deterministic for fixed seed and
// sample count.
struct HaarMcPoint {
    Matrix state;
    // polarization components and standard errors; for N = 2 these are the
    // Bloch components (x, y, z)
    Eigen::Vector3d bloch = Eigen::Vector3d::Zero();
    Eigen::Vector3d bloch_err = Eigen::Vector3d::Zero();
};

HaarMcPoint haar_mc_depolarize(const Matrix& rho0, double t, std::size_t samples,
                               std::uint64_t seed);

// n_z(t) = 1/3 + sin(2 pi t) / (3 pi (t - t^3)), removable singularities at
// t = 0 and t = 1 evaluated by series.
double analytic_nz(double t);

// Bisection root of analytic_nz in (0.5, 1), accurate to 1e-10.
double find_nz_root();

// Single-qubit Clifford group modulo global phase, generated by closure of
// {H, S}: exactly 24 elements.
std::vector<Matrix> clifford_table(int n);

// Exact finite average (1/|C|) sum C rho C^dag; equals I/N by the 2-design
// property.
Matrix clifford_average(const Matrix& rho0, const std::vector<Matrix>& table);

// MC check that the averaged polarization stays parallel to the initial one.
struct IsotropyReport {
    Eigen::Vector3d initial_axis = Eigen::Vector3d::Zero();
    double parallel_component = 0.0;
    double transverse_norm = 0.0;
    double transverse_limit = 0.0;  // 3 sigma bound
    bool pass = false;
};

IsotropyReport haar_isotropy_check(const Matrix& rho0, double t,
                                   std::size_t samples, std::uint64_t seed);

} // namespace rcnoise
