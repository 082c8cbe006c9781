// dephasing.hpp - Synthesis of the two-branch classical field pair from a
// decoherence trace, random-unitary simulation, equivalence verification, and
// the Kraus-set dilation construction.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rcnoise/bloch.hpp"
#include "rcnoise/linalg.hpp"

namespace rcnoise {

// Below this coherence the branch angles rotate arbitrarily fast and the
// synthesis aborts instead of emitting garbage.
inline constexpr double kDefaultRMin = 1e-6;

// Sampled off-diagonal evolution: c(t) + i s(t) multiplies rho_10.
struct DecoherenceTrace {
    std::vector<double> times;  // strictly increasing, times[0] == 0
    std::vector<double> c;
    std::vector<double> s;

    void validate() const;
    std::size_t size() const { return times.size(); }
};

// beta = sqrt(1 - r^2) / r with r^2 = c^2 + s^2 (clamped to 1 within 1e-9).
// Throws singularity_error if r < r_min.
double beta_of(double c, double s, double r_min = kDefaultRMin);

// Continuously unwrapped branch angles with Phi_i(0) = 0. Branch 1 carries
// (c - beta s, s + beta c), branch 2 the conjugate choice, so the convex
// reconstruction (cos Phi_1 + cos Phi_2)/2 = c holds pointwise.
struct PhaseAngles {
    std::vector<double> times;
    std::vector<double> phi1;
    std::vector<double> phi2;
};

PhaseAngles phase_angles(const DecoherenceTrace& trace, double r_min = kDefaultRMin);

// The synthesized classical noise: h(t) = h_i(t) with probability 1/2 each,
// Phi_i(t) = integral of (-B + h_i).
struct FieldPair {
    std::vector<double> times;
    std::vector<double> h1;
    std::vector<double> h2;
    std::vector<double> phi1;
    std::vector<double> phi2;
    double B = 0.0;

    std::size_t size() const { return times.size(); }
};

// Fields by second-order central differences (one-sided at the endpoints).
// Requires at least 3 grid points.
FieldPair fields_from_angles(const PhaseAngles& phi, double B);

// phase_angles + fields_from_angles in one step.
FieldPair synthesize_fields(const DecoherenceTrace& trace, double B,
                            double r_min = kDefaultRMin);

// Linearly interpolated branch angles at time t (range error outside grid).
std::pair<double, double> angles_at(const FieldPair& fields, double t);

// Two-branch random-unitary evolution; populations of rho0 are preserved
// exactly. Evaluation runs on the stored angles, not the differentiated
// fields.
Matrix classical_evolve(const Matrix& rho0, const FieldPair& fields, double t);

TransferMatrix4 classical_transfer_matrix(const FieldPair& fields, double t);

// Extract (c, s) after validating the dephasing block structure; affine or
// population-mixing transfer matrices are rejected with structural_error.
std::pair<double, double> trace_point_from_transfer(const TransferMatrix4& t,
                                                    double tol = 1e-10);

struct EquivalenceReport {
    std::vector<double> times;
    std::vector<double> trace_distance;
    double max_trace_distance = 0.0;
    double tolerance = 0.0;
    bool pass = false;

    std::string to_json() const;
};

// Per-time trace distance between the quantum states and the classical
// two-branch evolution started from the same initial state.
EquivalenceReport verify_equivalence(const std::vector<double>& times,
                                     const std::vector<Matrix>& quantum_states,
                                     const Matrix& rho0,
                                     const FieldPair& fields,
                                     double tolerance = 1e-6);

double trace_distance(const Matrix& a, const Matrix& b);

// Kraus operators M_a with sum M_a^dag M_a = I.
struct KrausSet {
    std::vector<Matrix> ops;

    void validate(double tol = 1e-10) const;
    Matrix apply(const Matrix& rho) const;
};

// SD x SD unitary with U_T(|n>_S (x) |0>_B) = sum_a M_a |n>_S (x) |a>_B,
// remaining columns completed by Gram-Schmidt. System factor first.
Matrix dilation_build(const KrausSet& kraus);

// CSV with header t,h1,h2,phi1,phi2, 17 significant digits.
void write_fields_csv(const FieldPair& fields, const std::string& path);

} // namespace rcnoise
