#include "rcnoise/models.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace rcnoise {

namespace {

// ln(sinh(x)/x), stable for both tiny and large x
double log_sinhc(double x) {
    if (x == 0.0) return 0.0;
    x = std::abs(x);
    if (x < 1e-4) return x * x / 6.0 - x * x * x * x / 180.0;
    if (x > 350.0) return x - std::log(2.0 * x);  // sinh(x) ~ e^x / 2
    return std::log(std::sinh(x) / x);
}

double simpson(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, m, fa, flm, fm);
    double right = simpson(f, m, b, fm, frm, fb);
    double delta = left + right - whole;
    if (depth <= 0)
        throw numerical_error("gamma_quadrature: adaptive quadrature did not converge");
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb),
                            tol, 48);
}

} // namespace

double gamma_ohmic(double t, double omega_cutoff, double thermal_time) {
    if (t < 0.0) throw validation_error("gamma_ohmic: t must be >= 0");
    if (omega_cutoff <= 0.0 || thermal_time <= 0.0)
        throw validation_error("gamma_ohmic: cutoff and thermal time must be positive");
    double wt = omega_cutoff * t;
    return -0.5 * std::log1p(wt * wt) - log_sinhc(t / thermal_time);
}

double gamma_quadrature(double t, const std::function<double(double)>& coupling,
                        double beta_th, double omega_max, double abs_tol) {
    if (t < 0.0) throw validation_error("gamma_quadrature: t must be >= 0");
    if (beta_th <= 0.0) throw validation_error("gamma_quadrature: beta must be positive");
    if (t == 0.0) return 0.0;

    auto integrand = [&](double w) -> double {
        if (w < 1e-12) {
            // removable singularity: J(w) coth(bw/2)(1-cos wt)/w^2 -> J'(0) t^2 / b
            double h = 1e-8;
            return coupling(h) / h * t * t / beta_th;
        }
        double sn = std::sin(0.5 * w * t);
        double osc = 2.0 * sn * sn / (w * w);  // (1 - cos wt)/w^2
        return coupling(w) / std::tanh(0.5 * beta_th * w) * osc;
    };

    double total = 0.0;
    if (omega_max > 0.0) {
        total = integrate(integrand, 0.0, omega_max, abs_tol);
    } else {
        // doubling windows until the tail contribution is negligible
        double w = std::max({1.0, 10.0 / t, 10.0 / beta_th});
        total = integrate(integrand, 0.0, w, abs_tol);
        int doublings = 0;
        for (;; ++doublings) {
            if (doublings > 60)
                throw numerical_error("gamma_quadrature: tail did not converge");
            double piece = integrate(integrand, w, 2.0 * w, abs_tol);
            total += piece;
            w *= 2.0;
            if (std::abs(piece) < 0.5 * abs_tol) break;
        }
    }
    return -total;
}

DecoherenceTrace spin_boson_trace(const SpinBosonParams& params,
                                  const std::vector<double>& grid) {
    DecoherenceTrace trace;
    trace.times = grid;
    trace.c.resize(grid.size());
    trace.s.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = grid[i];
        double g = params.ohmic.amplitude *
                   gamma_ohmic(t, params.ohmic.cutoff, params.ohmic.thermal_time);
        double r = std::exp(g);
        trace.c[i] = r * std::cos(params.B * t);
        trace.s[i] = -r * std::sin(params.B * t);
    }
    trace.validate();
    return trace;
}

CentralSpinTrace central_spin_trace(const CentralSpinParams& params,
                                    const std::vector<double>& grid) {
    if (params.alpha <= 0.0)
        throw validation_error("central_spin_trace: alpha must be positive");
    CentralSpinTrace out;
    out.trace.times = grid;
    out.trace.c.resize(grid.size());
    out.trace.s.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = grid[i];
        double at = params.alpha * t;
        double r = 1.0 / std::sqrt(1.0 + at * at);
        double phase = std::atan(at) - params.B * t;
        out.trace.c[i] = r * std::cos(phase);
        out.trace.s[i] = r * std::sin(phase);
        if (at > 1.0) out.flagged.push_back(i);
    }
    out.trace.validate();
    return out;
}

PhaseAngles central_spin_angles(const CentralSpinParams& params,
                                const std::vector<double>& grid) {
    PhaseAngles out;
    out.times = grid;
    out.phi1.resize(grid.size());
    out.phi2.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = grid[i];
        // acos(r) = arctan(alpha t) for t >= 0, so the branches are
        // -Bt + 2 arctan(alpha t) and -Bt
        out.phi1[i] = -params.B * t + 2.0 * std::atan(params.alpha * t);
        out.phi2[i] = -params.B * t;
    }
    return out;
}

void TabulatedDecoherence::validate() const {
    if (times.empty() || r.size() != times.size() || phi.size() != times.size())
        throw validation_error("tabulated decoherence: array length mismatch");
    if (times.front() != 0.0 || std::abs(r.front() - 1.0) > 1e-9 ||
        std::abs(phi.front()) > 1e-9)
        throw validation_error("tabulated decoherence: must start at t=0, r=1, phi=0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw validation_error("tabulated decoherence: non-monotone time grid");
    for (double v : r)
        if (v < 0.0 || v > 1.0 + 1e-9)
            throw validation_error("tabulated decoherence: r outside [0, 1]");
}

TabulatedDecoherence load_decoherence_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open file: " + path);
    std::string line;
    std::size_t lineno = 0;

    auto fail = [&](const std::string& what) {
        std::ostringstream os;
        os << path << ":" << lineno << ": " << what;
        throw validation_error(os.str());
    };

    if (!std::getline(in, line)) fail("empty file");
    ++lineno;
    std::string header = line;
    header.erase(std::remove_if(header.begin(), header.end(),
                                [](char c) { return c == ' ' || c == '\r'; }),
                 header.end());
    if (header != "t,r,phi") fail("expected header 't,r,phi'");

    TabulatedDecoherence tab;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        double vals[3];
        std::string cell;
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(row, cell, ',')) fail("expected 3 comma-separated values");
            try {
                std::size_t used = 0;
                vals[k] = std::stod(cell, &used);
            } catch (const std::exception&) {
                fail("cannot parse number '" + cell + "'");
            }
        }
        if (tab.times.empty() && vals[0] != 0.0) fail("first row must have t = 0");
        if (!tab.times.empty() && vals[0] <= tab.times.back())
            fail("non-monotone time value");
        if (vals[1] < 0.0) fail("r must be non-negative");
        if (vals[1] > 1.0 + 1e-9) fail("r exceeds 1 beyond tolerance");
        tab.times.push_back(vals[0]);
        tab.r.push_back(std::min(vals[1], 1.0));
        tab.phi.push_back(vals[2]);
    }
    tab.validate();
    return tab;
}

DecoherenceTrace trace_from_tabulated(const TabulatedDecoherence& tab) {
    tab.validate();
    DecoherenceTrace trace;
    trace.times = tab.times;
    trace.c.resize(tab.times.size());
    trace.s.resize(tab.times.size());
    for (std::size_t i = 0; i < tab.times.size(); ++i) {
        double phase = tab.phi[i] - tab.B * tab.times[i];
        trace.c[i] = tab.r[i] * std::cos(phase);
        trace.s[i] = tab.r[i] * std::sin(phase);
    }
    trace.validate();
    return trace;
}

PhaseAngles angles_from_tabulated(const TabulatedDecoherence& tab) {
    tab.validate();
    PhaseAngles out;
    out.times = tab.times;
    out.phi1.resize(tab.times.size());
    out.phi2.resize(tab.times.size());
    for (std::size_t i = 0; i < tab.times.size(); ++i) {
        double base = -tab.B * tab.times[i] + tab.phi[i];
        double gap = std::acos(std::clamp(tab.r[i], -1.0, 1.0));
        out.phi1[i] = base + gap;
        out.phi2[i] = base - gap;
    }
    return out;
}

void FiniteBathModel::validate() const {
    if (bath_dim < 1) throw validation_error("finite bath: bath_dim must be >= 1");
    if (h_bath.rows() != bath_dim || h_bath.cols() != bath_dim ||
        h_coupling.rows() != bath_dim || h_coupling.cols() != bath_dim ||
        rho_b0.rows() != bath_dim || rho_b0.cols() != bath_dim)
        throw validation_error("finite bath: operator dimensions inconsistent");
    require_hermitian(h_bath);
    require_hermitian(h_coupling);
    require_density(rho_b0);
}

Matrix total_hamiltonian(const FiniteBathModel& model) {
    model.validate();
    return -0.5 * model.B * kron(sigma_z(), identity(model.bath_dim)) +
           kron(identity(2), model.h_bath) + kron(sigma_z(), model.h_coupling);
}

Matrix finite_bath_unitary(const FiniteBathModel& model, double t, int steps) {
    if (steps < 1) throw validation_error("finite_bath_unitary: steps must be >= 1");
    return expm_hermitian(total_hamiltonian(model), t);
}

FiniteBathModel random_finite_bath_model(Eigen::Index bath_dim, double B,
                                         std::uint64_t seed) {
    auto random_hermitian = [&](std::uint64_t s) {
        std::mt19937_64 rng(s);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Matrix g(bath_dim, bath_dim);
        for (Eigen::Index i = 0; i < bath_dim; ++i)
            for (Eigen::Index j = 0; j < bath_dim; ++j) {
                double re = gauss(rng);
                double im = gauss(rng);
                g(i, j) = Complex(re, im);
            }
        return Matrix(0.5 * (g + g.adjoint()));
    };
    FiniteBathModel model;
    model.bath_dim = bath_dim;
    model.B = B;
    model.h_bath = random_hermitian(substream_seed(seed, 1));
    model.h_coupling = random_hermitian(substream_seed(seed, 2));
    model.rho_b0 = random_density(bath_dim, substream_seed(seed, 3));
    return model;
}

DecoherenceTrace finite_bath_trace(const FiniteBathModel& model,
                                   const std::vector<double>& grid) {
    Matrix h = total_hamiltonian(model);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success)
        throw numerical_error("finite_bath_trace: eigendecomposition failed");
    const Matrix& vecs = es.eigenvectors();
    DecoherenceTrace trace;
    trace.times = grid;
    trace.c.resize(grid.size());
    trace.s.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Vector ph(h.rows());
        for (Eigen::Index j = 0; j < h.rows(); ++j)
            ph(j) = std::exp(Complex(0.0, -es.eigenvalues()(j) * grid[i]));
        Matrix u = vecs * ph.asDiagonal() * vecs.adjoint();
        auto [c, s] = cs_from_uv(uv_decompose(u), model.rho_b0);
        trace.c[i] = c;
        trace.s[i] = s;
    }
    trace.validate();
    return trace;
}

} // namespace rcnoise
