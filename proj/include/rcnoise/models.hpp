// models.hpp - Decoherence-trace generators: spin-boson (quadrature and ohmic
// closed form), central spin, tabulated external data, and exact finite-bath
// dephasing models.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rcnoise/dephasing.hpp"
#include "rcnoise/linalg.hpp"

namespace rcnoise {

// ---------------------------- spin-boson -------------------------------------

// Closed-form ohmic decoherence exponent, overall scale 1:
//   Gamma(t) = -ln(1 + Omega^2 t^2)/2 - ln(sinh(t/tau) / (t/tau))
double gamma_ohmic(double t, double omega_cutoff, double thermal_time);

// General-coupling exponent by adaptive quadrature:
//   Gamma(t) = -int_0^inf dw J(w) coth(beta w / 2) (1 - cos wt) / w^2
// The removable w -> 0 singularity is evaluated by series. omega_max <= 0
// selects an automatic cutoff.
double gamma_quadrature(double t, const std::function<double(double)>& coupling,
                        double beta_th, double omega_max = 0.0,
                        double abs_tol = 1e-10);

struct OhmicCoupling {
    double amplitude = 1.0;     // scale factor on Gamma
    double cutoff = 1.0;        // Omega
    double thermal_time = 1.0;  // tau = 1 / (pi T)
};

struct SpinBosonParams {
    double B = 0.0;
    OhmicCoupling ohmic;
};

// c = e^Gamma cos Bt, s = -e^Gamma sin Bt on the given grid.
DecoherenceTrace spin_boson_trace(const SpinBosonParams& params,
                                  const std::vector<double>& grid);

// ---------------------------- central spin -----------------------------------

struct CentralSpinParams {
    double alpha = 1.0;  // inverse-time scale; model validity needs alpha t << 1
    double B = 0.0;
};

struct CentralSpinTrace {
    DecoherenceTrace trace;
    std::vector<std::size_t> flagged;  // grid indices with alpha t > 1
};

// D(t) = e^{i arctan(alpha t) - i B t} / sqrt(1 + alpha^2 t^2); points outside
// the validity window are computed anyway and flagged.
CentralSpinTrace central_spin_trace(const CentralSpinParams& params,
                                    const std::vector<double>& grid);

// Closed-form branch angles Phi_i = -B t + phi(t) +/- acos(r(t)); exact, no
// finite differences.
PhaseAngles central_spin_angles(const CentralSpinParams& params,
                                const std::vector<double>& grid);

// ---------------------------- tabulated data ---------------------------------

struct TabulatedDecoherence {
    std::vector<double> times;
    std::vector<double> r;    // in [0, 1]
    std::vector<double> phi;  // radians
    double B = 0.0;

    void validate() const;
};

// CSV schema: header "t,r,phi", one row per grid point. Parse errors name the
// offending line.
TabulatedDecoherence load_decoherence_csv(const std::string& path);

// (c, s) trace from r e^{i phi}: c + i s = r e^{i (phi - B t)}.
DecoherenceTrace trace_from_tabulated(const TabulatedDecoherence& tab);

// Exact branch angles Phi_i = -B t + phi +/- acos(r), unwrapped.
PhaseAngles angles_from_tabulated(const TabulatedDecoherence& tab);

// ---------------------------- finite baths -----------------------------------

struct FiniteBathModel {
    Eigen::Index bath_dim = 2;
    Matrix h_bath;      // bath Hamiltonian
    Matrix h_coupling;  // bath operator multiplying sigma_z
    double B = 0.0;
    Matrix rho_b0;

    void validate() const;
};

// H = -B/2 sigma_z (x) I + I (x) h_bath + sigma_z (x) h_coupling
Matrix total_hamiltonian(const FiniteBathModel& model);

// Time-independent H: one Hermitian exponential (steps reserved for a future
// time-dependent Trotter path).
Matrix finite_bath_unitary(const FiniteBathModel& model, double t, int steps = 1);

// Random dephasing instance with Gaussian Hermitian bath operators, seeded.
FiniteBathModel random_finite_bath_model(Eigen::Index bath_dim, double B,
                                         std::uint64_t seed);

// (c, s) trace of a finite-bath model over the grid, via u/v decomposition.
DecoherenceTrace finite_bath_trace(const FiniteBathModel& model,
                                   const std::vector<double>& grid);

} // namespace rcnoise
