// multiqubit.hpp - Diagonal dephasing in a simultaneous eigenbasis of a
// commuting Pauli set, characteristic-function reconstruction r_ij =
// p~(gamma_ij), and transitivity checks.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rcnoise/linalg.hpp"

namespace rcnoise {

// ------------------------------ Pauli strings --------------------------------

struct PauliString {
    int n = 0;
    std::vector<int> letters;  // 0 = I, 1 = X, 2 = Y, 3 = Z

    static PauliString parse(const std::string& text);
    Matrix to_matrix() const;
    std::string str() const;
    bool is_identity() const;
};

// True iff the strings anticommute at an even number of positions.
bool pauli_commutes(const PauliString& a, const PauliString& b);

struct CommutingSet {
    int n = 0;
    std::vector<PauliString> members;  // 2^n - 1 pairwise commuting, no identity

    void validate() const;
};

// Partition of all 4^n - 1 non-identity strings into 2^n + 1 disjoint
// pairwise-commuting sets (search-based, n <= 3).
std::vector<CommutingSet> partition_commuting_sets(int n);

// Unitary whose columns simultaneously diagonalize every member, built by
// recursive common-eigenspace splitting.
Matrix simultaneous_eigenbasis(const CommutingSet& set);

// ------------------------------ phase bookkeeping ----------------------------

// gamma_ij = theta_i - theta_j
Eigen::MatrixXd gamma_matrix(const std::vector<double>& theta);

struct TransitivityResult {
    bool ok = false;
    double worst_violation = 0.0;
};

// gamma_ij = gamma_ik + gamma_kj for all triples, within 1e-10.
TransitivityResult check_transitivity(const Eigen::MatrixXd& gamma);

// ------------------------------ noise distribution ---------------------------

// Distribution of the single noise parameter alpha, with closed-form
// characteristic function p~(x) = E[e^{-i alpha x}].
struct AlphaDistribution {
    enum class Kind { Gaussian, Uniform, Discrete };

    Kind kind = Kind::Gaussian;
    double sigma = 1.0;                // Gaussian
    double a = -1.0, b = 1.0;          // Uniform on [a, b]
    std::vector<double> points;        // Discrete support
    std::vector<double> weights;       // Discrete weights, sum to 1

    static AlphaDistribution gaussian(double sigma);
    static AlphaDistribution uniform(double a, double b);
    static AlphaDistribution discrete(std::vector<double> points,
                                      std::vector<double> weights);

    void validate() const;
    Complex char_fn(double x) const;
    double sample(std::mt19937_64& rng) const;
};

// ------------------------------ the model ------------------------------------

// Diagonal multiqubit dephasing: per-level phase integrals theta_i(t) sampled
// on a grid plus a noise-parameter distribution. States are expressed in the
// simultaneous eigenbasis of the chosen commuting set.
struct BellBasisModel {
    int n = 0;
    Matrix basis;                            // columns = simultaneous eigenbasis
    std::vector<double> grid;
    std::vector<std::vector<double>> theta;  // [level][time], 2^n levels
    AlphaDistribution dist;

    void validate() const;
    std::vector<double> theta_at(double t) const;  // linear interpolation
};

BellBasisModel bell_basis_model_from_json(const std::string& text);

// rho_ij(t) = rho_ij(0) p~(gamma_ij(t)) in the model basis; diagonal exactly
// preserved. Throws model_error on positivity loss beyond 1e-8.
Matrix classical_multiqubit_evolve(const Matrix& rho0, const BellBasisModel& model,
                                   double t);

// r_ij(t) = p~(gamma_ij(t)): Hermitian, unit diagonal, |r_ij| <= 1.
Matrix r_matrix(const BellBasisModel& model, double t);

// Monte Carlo oracle of the same evolution: sample alpha, apply diagonal
// phases e^{-i alpha theta_i}, average. Per-sample deterministic substreams.
struct McEvolveResult {
    Matrix mean;
    Eigen::MatrixXd stderr_re;
    Eigen::MatrixXd stderr_im;
};

McEvolveResult mc_multiqubit_evolve(const Matrix& rho0, const BellBasisModel& model,
                                    double t, std::size_t samples,
                                    std::uint64_t seed);

} // namespace rcnoise
