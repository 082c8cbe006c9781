#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "rcnoise/dephasing.hpp"
#include "rcnoise/models.hpp"

using namespace rcnoise;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}
} // namespace

TEST_CASE("beta_of pinned values") {
    CHECK(beta_of(1.0, 0.0) == doctest::Approx(0.0));
    CHECK(beta_of(0.6, 0.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(beta_of(0.6, 0.8) == doctest::Approx(0.0));  // r = 1 exactly
    CHECK_THROWS_AS(beta_of(1e-9, 0.0), singularity_error);
}

TEST_CASE("phase_angles pinned values") {
    DecoherenceTrace trace;
    trace.times = {0.0, 1.0, 2.0};
    trace.c = {1.0, 0.5, 0.0};
    trace.s = {0.0, 0.0, 1.0};
    PhaseAngles pa = phase_angles(trace);
    CHECK(pa.phi1[0] == doctest::Approx(0.0));
    CHECK(pa.phi2[0] == doctest::Approx(0.0));
    // (c, s) = (1/2, 0): branch 1 takes the +acos(r) rotation
    CHECK(pa.phi1[1] == doctest::Approx(kPi / 3.0).epsilon(1e-12));
    CHECK(pa.phi2[1] == doctest::Approx(-kPi / 3.0).epsilon(1e-12));
    // (c, s) = (0, 1): r = 1, both branches coincide at pi/2
    CHECK(pa.phi1[2] == doctest::Approx(kPi / 2.0).epsilon(1e-12));
    CHECK(pa.phi2[2] == doctest::Approx(kPi / 2.0).epsilon(1e-12));
}

TEST_CASE("phase_angles singularity reports the offending time") {
    DecoherenceTrace trace;
    trace.times = {0.0, 1.0, 2.0};
    trace.c = {1.0, 0.5, 1e-9};
    trace.s = {0.0, 0.0, 0.0};
    try {
        phase_angles(trace);
        FAIL("expected singularity_error");
    } catch (const singularity_error& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("convexity identity on random (c, s) points") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ur(1e-4, 1.0), uphi(-kPi, kPi);
    for (int k = 0; k < 2000; ++k) {
        double r = ur(rng), phi = uphi(rng);
        double c = r * std::cos(phi), s = r * std::sin(phi);
        double beta = beta_of(c, s);
        double p1 = std::atan2(s + beta * c, c - beta * s);
        double p2 = std::atan2(s - beta * c, c + beta * s);
        CHECK(0.5 * (std::cos(p1) + std::cos(p2)) == doctest::Approx(c).epsilon(1e-10));
        CHECK(0.5 * (std::sin(p1) + std::sin(p2)) == doctest::Approx(s).epsilon(1e-10));
    }
}

TEST_CASE("unwrapping keeps angles continuous across branch cuts") {
    // a slowly decohering precession sweeps phi_tot well past pi
    auto grid = linspace(0.0, 10.0, 1001);
    DecoherenceTrace trace;
    trace.times = grid;
    for (double t : grid) {
        double r = std::exp(-0.05 * t * t);
        trace.c.push_back(r * std::cos(2.0 * t));
        trace.s.push_back(r * std::sin(2.0 * t));
    }
    PhaseAngles pa = phase_angles(trace);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(std::abs(pa.phi1[i] - pa.phi1[i - 1]) < kPi);
        CHECK(std::abs(pa.phi2[i] - pa.phi2[i - 1]) < kPi);
    }
    // phi_tot = 2t: the mean of the two branches tracks it
    std::size_t last = grid.size() - 1;
    CHECK(0.5 * (pa.phi1[last] + pa.phi2[last]) ==
          doctest::Approx(2.0 * grid[last]).epsilon(1e-8));
}

TEST_CASE("fields_from_angles constant and linear cases") {
    auto grid = linspace(0.0, 2.0, 201);
    PhaseAngles pa;
    pa.times = grid;
    pa.phi1.assign(grid.size(), 0.0);
    pa.phi2.assign(grid.size(), 0.0);
    FieldPair f0 = fields_from_angles(pa, 1.0);
    for (double h : f0.h1) CHECK(h == doctest::Approx(1.0).epsilon(1e-10));
    for (double h : f0.h2) CHECK(h == doctest::Approx(1.0).epsilon(1e-10));

    double B = 0.7;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        pa.phi1[i] = -B * grid[i];
        pa.phi2[i] = -B * grid[i];
    }
    FieldPair ffree = fields_from_angles(pa, B);
    for (double h : ffree.h1) CHECK(std::abs(h) < 1e-10);

    PhaseAngles tiny;
    tiny.times = {0.0, 1.0};
    tiny.phi1 = {0.0, 0.0};
    tiny.phi2 = {0.0, 0.0};
    CHECK_THROWS_AS(fields_from_angles(tiny, 0.0), validation_error);
}

TEST_CASE("angle -> field -> angle round trip by trapezoid integration") {
    CentralSpinParams params{1.0, 0.4};
    auto grid = linspace(0.0, 3.0, 2001);
    PhaseAngles pa = central_spin_angles(params, grid);
    FieldPair f = fields_from_angles(pa, params.B);
    double acc1 = 0.0, acc2 = 0.0;
    double worst = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double dt = grid[i] - grid[i - 1];
        acc1 += 0.5 * dt * ((f.h1[i] - params.B) + (f.h1[i - 1] - params.B));
        acc2 += 0.5 * dt * ((f.h2[i] - params.B) + (f.h2[i - 1] - params.B));
        worst = std::max({worst, std::abs(acc1 - pa.phi1[i]),
                          std::abs(acc2 - pa.phi2[i])});
    }
    double scale = std::abs(pa.phi1.back()) + std::abs(pa.phi2.back()) + 1.0;
    CHECK(worst / scale < 1e-6);
}

TEST_CASE("classical_evolve pinned behavior") {
    FieldPair f;
    f.times = {0.0, 1.0, 2.0};
    f.h1 = {0.0, 0.0, 0.0};
    f.h2 = {0.0, 0.0, 0.0};
    f.phi1 = {0.0, kPi / 3.0, kPi / 2.0};
    f.phi2 = {0.0, -kPi / 3.0, -kPi / 2.0};

    Matrix ket0 = Matrix::Zero(2, 2);
    ket0(0, 0) = 1.0;
    CHECK((classical_evolve(ket0, f, 2.0) - ket0).cwiseAbs().maxCoeff() < 1e-14);

    Matrix plus = 0.5 * (identity(2) + sigma_x());
    // off-diagonal multiplied by (e^{i pi/3} + e^{-i pi/3})/2 = 1/2
    Matrix at1 = classical_evolve(plus, f, 1.0);
    CHECK(at1(1, 0).real() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::abs(at1(1, 0).imag()) < 1e-14);
    // +/- pi/2 branches cancel entirely
    Matrix at2 = classical_evolve(plus, f, 2.0);
    CHECK(std::abs(at2(1, 0)) < 1e-14);
    CHECK(at2(0, 0).real() == doctest::Approx(0.5));

    CHECK_THROWS_AS(classical_evolve(plus, f, 3.0), std::out_of_range);
}

TEST_CASE("classical_transfer_matrix structure and swap invariance") {
    FieldPair f;
    f.times = {0.0, 0.5, 1.0};
    f.h1 = {0.0, 0.0, 0.0};
    f.h2 = {0.0, 0.0, 0.0};
    f.phi1 = {0.0, kPi / 6.0, kPi / 3.0};
    f.phi2 = {0.0, -kPi / 6.0, -kPi / 3.0};
    TransferMatrix4 tm = classical_transfer_matrix(f, 1.0);
    CHECK(tm.m(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tm.m(2, 2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(tm.m(1, 2)) < 1e-12);
    CHECK(tm.m(3, 3) == doctest::Approx(1.0));
    CHECK(std::abs(tm.m(1, 0)) < 1e-14);

    // swapping the branches gives a different field pair, same channel
    FieldPair swapped = f;
    std::swap(swapped.phi1, swapped.phi2);
    std::swap(swapped.h1, swapped.h2);
    TransferMatrix4 tm2 = classical_transfer_matrix(swapped, 1.0);
    CHECK((tm.m - tm2.m).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("synthesized transfer matrix reproduces the input trace") {
    auto grid = linspace(0.0, 2.0, 401);
    DecoherenceTrace trace;
    trace.times = grid;
    for (double t : grid) {
        double r = std::exp(-0.3 * t * t);
        trace.c.push_back(r * std::cos(1.1 * t));
        trace.s.push_back(r * std::sin(1.1 * t));
    }
    FieldPair f = synthesize_fields(trace, 0.0);
    for (std::size_t i : {100u, 250u, 400u}) {
        TransferMatrix4 tm = classical_transfer_matrix(f, grid[i]);
        CHECK(tm.m(1, 1) == doctest::Approx(trace.c[i]).epsilon(1e-10));
        CHECK(tm.m(2, 1) == doctest::Approx(trace.s[i]).epsilon(1e-10));
    }
}

TEST_CASE("trace_point_from_transfer rejects affine cooling maps") {
    // relaxation toward |0><0|: z column picks up an affine term T_z0 != 0
    TransferMatrix4 cooling;
    cooling.m = Eigen::Matrix4d::Identity();
    double lam = 0.4;
    cooling.m(3, 3) = 1.0 - lam;
    cooling.m(3, 0) = lam;
    cooling.m(1, 1) = std::sqrt(1.0 - lam);
    cooling.m(2, 2) = std::sqrt(1.0 - lam);
    CHECK_THROWS_AS(trace_point_from_transfer(cooling), structural_error);

    TransferMatrix4 ok;
    ok.m = Eigen::Matrix4d::Identity();
    ok.m(1, 1) = 0.5;
    ok.m(2, 2) = 0.5;
    ok.m(1, 2) = -0.1;
    ok.m(2, 1) = 0.1;
    auto [c, s] = trace_point_from_transfer(ok);
    CHECK(c == doctest::Approx(0.5));
    CHECK(s == doctest::Approx(0.1));
}

TEST_CASE("trace_distance basics") {
    Matrix a = 0.5 * identity(2);
    CHECK(trace_distance(a, a) == doctest::Approx(0.0));
    Matrix ket0 = Matrix::Zero(2, 2), ket1 = Matrix::Zero(2, 2);
    ket0(0, 0) = 1.0;
    ket1(1, 1) = 1.0;
    CHECK(trace_distance(ket0, ket1) == doctest::Approx(1.0));
    CHECK(trace_distance(ket0, a) == doctest::Approx(0.5));
}

TEST_CASE("verify_equivalence end to end on a finite bath") {
    FiniteBathModel model = random_finite_bath_model(4, 0.8, 2024);
    auto grid = linspace(0.0, 1.5, 201);
    DecoherenceTrace trace = finite_bath_trace(model, grid);
    FieldPair f = synthesize_fields(trace, model.B);

    Matrix rho0 = 0.5 * (identity(2) + 0.7 * sigma_x() + 0.2 * sigma_y() +
                         0.5 * sigma_z());
    std::vector<Matrix> quantum;
    quantum.reserve(grid.size());
    for (double t : grid) {
        Matrix u = finite_bath_unitary(model, t);
        quantum.push_back(
            partial_trace_bath(u * kron(rho0, model.rho_b0) * u.adjoint(),
                               model.bath_dim));
    }
    EquivalenceReport rep = verify_equivalence(grid, quantum, rho0, f, 1e-6);
    CHECK(rep.pass);
    CHECK(rep.max_trace_distance < 1e-6);

    // corrupting one branch breaks the equivalence with growing distance
    FieldPair bad = f;
    for (auto& p : bad.phi1) p *= 1.1;
    EquivalenceReport brep = verify_equivalence(grid, quantum, rho0, bad, 1e-6);
    CHECK_FALSE(brep.pass);
    // the phase distortion accumulates: early times are barely affected while
    // the overall maximum is large
    double early = *std::max_element(brep.trace_distance.begin(),
                                     brep.trace_distance.begin() + 20);
    CHECK(brep.max_trace_distance > 1e-3);
    CHECK(early < brep.max_trace_distance);
}

TEST_CASE("equivalence report serializes to json") {
    EquivalenceReport rep;
    rep.times = {0.0, 1.0};
    rep.trace_distance = {0.0, 2e-7};
    rep.max_trace_distance = 2e-7;
    rep.tolerance = 1e-6;
    rep.pass = true;
    std::string j = rep.to_json();
    CHECK(j.find("\"max_trace_distance\"") != std::string::npos);
    CHECK(j.find("\"per_time\"") != std::string::npos);
    CHECK(j.find("\"pass\"") != std::string::npos);
    CHECK(j.find("\"tolerance\"") != std::string::npos);
}

TEST_CASE("kraus validation and dilation pinned cases") {
    KrausSet id;
    id.ops = {identity(2)};
    Matrix u_id = dilation_build(id);
    CHECK((u_id - identity(2)).cwiseAbs().maxCoeff() < 1e-12);

    KrausSet incomplete;
    incomplete.ops = {Matrix(0.5 * identity(2))};
    CHECK_THROWS_AS(dilation_build(incomplete), validation_error);

    // p = 1/2 phase flip
    double root_half = std::sqrt(0.5);
    KrausSet flip;
    flip.ops = {root_half * identity(2), Matrix(root_half * sigma_z())};
    Matrix u = dilation_build(flip);
    CHECK(is_unitary(u));
    for (std::uint64_t seed : {3ULL, 4ULL, 5ULL}) {
        Matrix rho = random_density(2, seed);
        Matrix bath0 = Matrix::Zero(2, 2);
        bath0(0, 0) = 1.0;
        Matrix out = partial_trace_bath(u * kron(rho, bath0) * u.adjoint(), 2);
        Matrix expect = 0.5 * rho + 0.5 * sigma_z() * rho * sigma_z();
        CHECK((out - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("dilation reproduces random channels") {
    std::mt19937_64 rng(314);
    std::normal_distribution<double> gauss;
    for (int rep = 0; rep < 8; ++rep) {
        int s_dim = 2 + static_cast<int>(rep % 3);  // 2..4
        int d = 2 + static_cast<int>(rng() % 5);    // 2..6 Kraus operators
        // random Kraus set: Gaussian blocks of an isometry, via QR
        Matrix big(s_dim * d, s_dim);
        for (int i = 0; i < big.rows(); ++i)
            for (int j = 0; j < big.cols(); ++j)
                big(i, j) = Complex(gauss(rng), gauss(rng));
        Eigen::HouseholderQR<Matrix> qr(big);
        Matrix q = qr.householderQ() * Matrix::Identity(s_dim * d, s_dim);
        KrausSet ks;
        for (int a = 0; a < d; ++a)
            ks.ops.push_back(q.block(a * s_dim, 0, s_dim, s_dim));
        ks.validate();

        Matrix u = dilation_build(ks);
        CHECK(is_unitary(u));
        Matrix bath0 = Matrix::Zero(d, d);
        bath0(0, 0) = 1.0;
        for (std::uint64_t seed : {11ULL, 12ULL}) {
            Matrix rho = random_density(s_dim, seed + rep);
            Matrix out =
                partial_trace_bath(u * kron(rho, bath0) * u.adjoint(), d);
            CHECK((out - ks.apply(rho)).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("dilation of a field pair snapshot matches classical_evolve") {
    auto grid = linspace(0.0, 1.0, 101);
    DecoherenceTrace trace;
    trace.times = grid;
    for (double t : grid) {
        trace.c.push_back(std::exp(-t) * std::cos(0.5 * t));
        trace.s.push_back(std::exp(-t) * std::sin(0.5 * t));
    }
    FieldPair f = synthesize_fields(trace, 0.0);
    double t = 0.6;
    auto [p1, p2] = angles_at(f, t);
    double root_half = std::sqrt(0.5);
    KrausSet ks;
    ks.ops = {root_half * expm_hermitian(Matrix(0.5 * sigma_z()), p1),
              root_half * expm_hermitian(Matrix(0.5 * sigma_z()), p2)};
    Matrix u = dilation_build(ks);
    Matrix rho0 = random_density(2, 60);
    Matrix bath0 = Matrix::Zero(2, 2);
    bath0(0, 0) = 1.0;
    Matrix via_dilation =
        partial_trace_bath(u * kron(rho0, bath0) * u.adjoint(), 2);
    CHECK((via_dilation - classical_evolve(rho0, f, t)).cwiseAbs().maxCoeff() <
          1e-10);
}

TEST_CASE("fields csv writer emits the documented schema") {
    FieldPair f;
    f.times = {0.0, 0.5};
    f.h1 = {1.0, 0.25};
    f.h2 = {0.0, -0.125};
    f.phi1 = {0.0, 0.1};
    f.phi2 = {0.0, -0.1};
    std::string path = "fields_test.csv";
    write_fields_csv(f, path);
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "t,h1,h2,phi1,phi2");
    std::getline(in, row);
    CHECK(row.substr(0, 2) == "0,");
    std::getline(in, row);
    CHECK(row.find("0.25") != std::string::npos);
    in.close();
    std::remove(path.c_str());
}
