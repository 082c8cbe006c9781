#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rcnoise/depolarize.hpp"

using namespace rcnoise;

namespace {
constexpr double kPi = std::numbers::pi;

Matrix ket0_proj() {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    return rho;
}
} // namespace

TEST_CASE("depolarize kraus set and convex form agree") {
    KrausSet ks = depolarize_kraus_set(1, 0.5);
    CHECK(ks.ops.size() == 4);
    ks.validate();

    Matrix out = kraus_depolarize(ket0_proj(), 0.5);
    CHECK(out(0, 0).real() == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(out(1, 1).real() == doctest::Approx(0.25).epsilon(1e-14));

    CHECK((kraus_depolarize(ket0_proj(), 0.0) - ket0_proj()).cwiseAbs().maxCoeff() <
          1e-14);
    CHECK((kraus_depolarize(ket0_proj(), 1.0) - 0.5 * identity(2))
              .cwiseAbs()
              .maxCoeff() < 1e-14);

    // two qubits: Kraus sum equals (1-p) rho + p I/4 on a random state
    Matrix rho = random_density(4, 13);
    KrausSet ks2 = depolarize_kraus_set(2, 0.3);
    CHECK(ks2.ops.size() == 16);
    ks2.validate();
    Matrix expect = 0.7 * rho + 0.3 * 0.25 * identity(4);
    CHECK((ks2.apply(rho) - expect).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((kraus_depolarize(rho, 0.3) - expect).cwiseAbs().maxCoeff() < 1e-12);

    // non-power-of-2 dimension falls back to the convex form
    Matrix rho3 = random_density(3, 14);
    Matrix expect3 = 0.6 * rho3 + 0.4 * identity(3) / 3.0;
    CHECK((kraus_depolarize(rho3, 0.4) - expect3).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(kraus_depolarize(rho, -0.1), validation_error);
    CHECK_THROWS_AS(kraus_depolarize(rho, 1.1), validation_error);
}

TEST_CASE("analytic_nz pinned values") {
    CHECK(analytic_nz(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(analytic_nz(1.0) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(analytic_nz(0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    // generic point: direct formula
    double t = 0.3;
    double direct = 1.0 / 3.0 + std::sin(2.0 * kPi * t) / (3.0 * kPi * (t - t * t * t));
    CHECK(analytic_nz(t) == doctest::Approx(direct).epsilon(1e-14));
    // series patches join smoothly
    CHECK(analytic_nz(1e-6) == doctest::Approx(analytic_nz(2e-5)).epsilon(1e-6));
    // large-t limit
    CHECK(analytic_nz(50.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("nz root near 0.77") {
    double root = find_nz_root();
    CHECK(root > 0.76);
    CHECK(root < 0.78);
    CHECK(std::abs(analytic_nz(root)) < 1e-9);
}

TEST_CASE("haar_mc_depolarize reproduces the analytic curve") {
    Matrix rho0 = ket0_proj();

    HaarMcPoint at0 = haar_mc_depolarize(rho0, 0.0, 100, 1);
    CHECK((at0.state - rho0).cwiseAbs().maxCoeff() < 1e-12);

    const std::size_t samples = 20000;
    for (double t : {0.5, 1.0}) {
        HaarMcPoint p = haar_mc_depolarize(rho0, t, samples, 11);
        require_density(p.state);
        double expect = analytic_nz(t);
        CHECK(std::abs(p.bloch(2) - expect) < 3.0 * p.bloch_err(2) + 1e-12);
        CHECK(p.bloch_err(2) > 0.0);
        CHECK(p.bloch_err(2) < 0.02);
    }

    // determinism
    HaarMcPoint a = haar_mc_depolarize(rho0, 0.7, 500, 42);
    HaarMcPoint b = haar_mc_depolarize(rho0, 0.7, 500, 42);
    CHECK((a.state.array() == b.state.array()).all());
}

TEST_CASE("haar average at t = 1 is maximally mixed for N = 3") {
    Matrix rho0 = random_density(3, 8);
    HaarMcPoint p = haar_mc_depolarize(rho0, 1.0, 20000, 5);
    CHECK((p.state - identity(3) / 3.0).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("isotropy of the Haar average") {
    // polarization along a tilted axis stays on that axis
    Eigen::Vector3d axis(0.3, -0.2, 0.6);
    Matrix rho0 = 0.5 * (identity(2) + axis(0) * sigma_x() + axis(1) * sigma_y() +
                         axis(2) * sigma_z());
    IsotropyReport rep = haar_isotropy_check(rho0, 0.4, 20000, 19);
    CHECK(rep.pass);
    CHECK(rep.transverse_norm < rep.transverse_limit);

    IsotropyReport mixed = haar_isotropy_check(Matrix(0.5 * identity(2)), 0.4,
                                               5000, 19);
    CHECK(mixed.pass);
    CHECK(std::abs(mixed.parallel_component) < 1e-10);
}

TEST_CASE("clifford table closure properties") {
    auto table = clifford_table(1);
    CHECK(table.size() == 24);
    CHECK_THROWS_AS(clifford_table(2), validation_error);

    // every element unitary; exactly one is the identity up to phase
    // (|tr U| = 2 iff U is a phase times I)
    int id_hits = 0;
    for (const auto& u : table) {
        CHECK(is_unitary(u));
        if (std::abs(std::abs(u.trace()) - 2.0) < 1e-9) ++id_hits;
    }
    CHECK(id_hits == 1);

    // every element permutes the signed Pauli axes under conjugation
    std::vector<Matrix> paulis = {sigma_x(), sigma_y(), sigma_z()};
    for (const auto& u : table) {
        for (const auto& p : paulis) {
            Matrix conj = u * p * u.adjoint();
            bool matched = false;
            for (const auto& q : paulis) {
                if ((conj - q).cwiseAbs().maxCoeff() < 1e-9 ||
                    (conj + q).cwiseAbs().maxCoeff() < 1e-9)
                    matched = true;
            }
            CHECK(matched);
        }
    }

    // closure under multiplication modulo phase: U V is in the table
    auto in_table = [&](const Matrix& m) {
        for (const auto& u : table) {
            Complex ip = (u.adjoint() * m).trace() / 2.0;
            if (std::abs(std::abs(ip) - 1.0) < 1e-9) return true;
        }
        return false;
    };
    for (std::size_t i = 0; i < table.size(); i += 5)
        for (std::size_t j = 0; j < table.size(); j += 7)
            CHECK(in_table(table[i] * table[j]));
}

TEST_CASE("clifford_average is the exact depolarizer") {
    auto table = clifford_table(1);
    CHECK((clifford_average(Matrix(0.5 * identity(2)), table) - 0.5 * identity(2))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    CHECK((clifford_average(ket0_proj(), table) - 0.5 * identity(2))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    Matrix tilted = 0.5 * (identity(2) + 0.3 * sigma_x() + 0.4 * sigma_z());
    CHECK((clifford_average(tilted, table) - 0.5 * identity(2))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK_THROWS_AS(clifford_average(random_density(3, 2), table),
                    validation_error);
}

TEST_CASE("clifford degree-2 moments match Haar sampling") {
    // 2-design check: average of (U x U)(rho x rho)(U x U)^dag over the table
    // equals the Haar MC average of the same expression
    auto table = clifford_table(1);
    Matrix rho = random_density(2, 23);
    Matrix rr = kron(rho, rho);

    Matrix cliff = Matrix::Zero(4, 4);
    for (const auto& u : table) {
        Matrix uu = kron(u, u);
        cliff += uu * rr * uu.adjoint();
    }
    cliff /= static_cast<double>(table.size());

    const std::size_t samples = 20000;
    Matrix haar = Matrix::Zero(4, 4);
    for (std::size_t k = 0; k < samples; ++k) {
        Matrix u = haar_random_unitary(2, substream_seed(321, k));
        Matrix uu = kron(u, u);
        haar += uu * rr * uu.adjoint();
    }
    haar /= static_cast<double>(samples);

    // entries are bounded by 1, so MC error per entry is < ~1/sqrt(samples);
    // allow a generous 5 sigma
    CHECK((cliff - haar).cwiseAbs().maxCoeff() < 5.0 / std::sqrt((double)samples));
}
