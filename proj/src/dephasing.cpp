#include "rcnoise/dephasing.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace rcnoise {

namespace {

constexpr double kPi = std::numbers::pi;

// wrap an angle difference into (-pi, pi]
double wrap_pi(double d) {
    d = std::fmod(d + kPi, 2.0 * kPi);
    if (d <= 0.0) d += 2.0 * kPi;
    return d - kPi;
}

// three-point derivative on a possibly non-uniform grid
std::vector<double> differentiate(const std::vector<double>& x,
                                  const std::vector<double>& f) {
    std::size_t n = x.size();
    std::vector<double> out(n);
    auto at = [&](std::size_t i0, std::size_t i1, std::size_t i2, double xi) {
        double x0 = x[i0], x1 = x[i1], x2 = x[i2];
        double w0 = (2.0 * xi - x1 - x2) / ((x0 - x1) * (x0 - x2));
        double w1 = (2.0 * xi - x0 - x2) / ((x1 - x0) * (x1 - x2));
        double w2 = (2.0 * xi - x0 - x1) / ((x2 - x0) * (x2 - x1));
        return w0 * f[i0] + w1 * f[i1] + w2 * f[i2];
    };
    out[0] = at(0, 1, 2, x[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = at(i - 1, i, i + 1, x[i]);
    out[n - 1] = at(n - 3, n - 2, n - 1, x[n - 1]);
    return out;
}

} // namespace

void DecoherenceTrace::validate() const {
    if (times.empty() || c.size() != times.size() || s.size() != times.size())
        throw validation_error("trace: arrays empty or of mismatched length");
    if (times.front() != 0.0)
        throw validation_error("trace: grid must start at t = 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw validation_error("trace: times must be strictly increasing");
    if (std::abs(c.front() - 1.0) > 1e-12 || std::abs(s.front()) > 1e-12)
        throw validation_error("trace: (c, s) must start at (1, 0)");
    for (std::size_t i = 0; i < times.size(); ++i)
        if (c[i] * c[i] + s[i] * s[i] > 1.0 + 1e-9)
            throw validation_error("trace: c^2 + s^2 exceeds 1");
}

double beta_of(double c, double s, double r_min) {
    double r2 = c * c + s * s;
    if (r2 > 1.0 + 1e-9)
        throw validation_error("beta_of: c^2 + s^2 exceeds 1");
    r2 = std::min(r2, 1.0);
    double r = std::sqrt(r2);
    if (r < r_min) {
        std::ostringstream os;
        os << "coherence too small to synthesize fields: r = " << r
           << " < r_min = " << r_min;
        throw singularity_error(os.str());
    }
    return std::sqrt(1.0 - r2) / r;
}

PhaseAngles phase_angles(const DecoherenceTrace& trace, double r_min) {
    trace.validate();
    PhaseAngles out;
    out.times = trace.times;
    out.phi1.resize(trace.size());
    out.phi2.resize(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        double c = trace.c[i];
        double s = trace.s[i];
        double beta;
        try {
            beta = beta_of(c, s, r_min);
        } catch (const singularity_error& e) {
            std::ostringstream os;
            os << e.what() << " at t = " << trace.times[i];
            throw singularity_error(os.str());
        }
        double raw1 = std::atan2(s + beta * c, c - beta * s);
        double raw2 = std::atan2(s - beta * c, c + beta * s);
        if (i == 0) {
            out.phi1[0] = raw1;
            out.phi2[0] = raw2;
        } else {
            // unwrap: keep increments inside (-pi, pi]
            out.phi1[i] = out.phi1[i - 1] + wrap_pi(raw1 - out.phi1[i - 1]);
            out.phi2[i] = out.phi2[i - 1] + wrap_pi(raw2 - out.phi2[i - 1]);
        }
    }
    return out;
}

FieldPair fields_from_angles(const PhaseAngles& phi, double B) {
    if (phi.times.size() < 3)
        throw validation_error("fields_from_angles: need at least 3 grid points");
    if (phi.phi1.size() != phi.times.size() || phi.phi2.size() != phi.times.size())
        throw validation_error("fields_from_angles: array length mismatch");
    FieldPair out;
    out.times = phi.times;
    out.phi1 = phi.phi1;
    out.phi2 = phi.phi2;
    out.B = B;
    out.h1 = differentiate(phi.times, phi.phi1);
    out.h2 = differentiate(phi.times, phi.phi2);
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        out.h1[i] += B;
        out.h2[i] += B;
    }
    return out;
}

FieldPair synthesize_fields(const DecoherenceTrace& trace, double B, double r_min) {
    return fields_from_angles(phase_angles(trace, r_min), B);
}

std::pair<double, double> angles_at(const FieldPair& fields, double t) {
    const auto& ts = fields.times;
    if (ts.size() < 2)
        throw validation_error("angles_at: field grid too small");
    double lo = ts.front(), hi = ts.back();
    double slack = 1e-12 * std::max(1.0, std::abs(hi));
    if (t < lo - slack || t > hi + slack)
        throw std::out_of_range("angles_at: time outside the field grid");
    t = std::clamp(t, lo, hi);
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t j = std::min<std::size_t>(std::distance(ts.begin(), it), ts.size() - 1);
    std::size_t i = j - (j > 0 ? 1 : 0);
    if (i == j) j = i + 1;
    double w = (t - ts[i]) / (ts[j] - ts[i]);
    return {fields.phi1[i] + w * (fields.phi1[j] - fields.phi1[i]),
            fields.phi2[i] + w * (fields.phi2[j] - fields.phi2[i])};
}

Matrix classical_evolve(const Matrix& rho0, const FieldPair& fields, double t) {
    if (rho0.rows() != 2 || rho0.cols() != 2)
        throw validation_error("classical_evolve: expected a 2x2 state");
    require_density(rho0);
    auto [p1, p2] = angles_at(fields, t);
    // rho_10 picks up (e^{i Phi_1} + e^{i Phi_2})/2; populations untouched
    Complex f = 0.5 * (std::exp(Complex(0.0, p1)) + std::exp(Complex(0.0, p2)));
    Matrix out = rho0;
    out(1, 0) *= f;
    out(0, 1) *= std::conj(f);
    return out;
}

TransferMatrix4 classical_transfer_matrix(const FieldPair& fields, double t) {
    auto [p1, p2] = angles_at(fields, t);
    double c = 0.5 * (std::cos(p1) + std::cos(p2));
    double s = 0.5 * (std::sin(p1) + std::sin(p2));
    TransferMatrix4 out;
    out.m(1, 1) = c;
    out.m(1, 2) = -s;
    out.m(2, 1) = s;
    out.m(2, 2) = c;
    return out;
}

std::pair<double, double> trace_point_from_transfer(const TransferMatrix4& t,
                                                    double tol) {
    const Eigen::Matrix4d& m = t.m;
    Eigen::Vector4d e0(1, 0, 0, 0), ez(0, 0, 0, 1);
    if ((m.row(0).transpose() - e0).cwiseAbs().maxCoeff() > tol)
        throw structural_error("transfer matrix row 0 is not (1,0,0,0)");
    if ((m.col(0) - e0).cwiseAbs().maxCoeff() > tol)
        throw structural_error(
            "transfer matrix has an affine column (T_i0 != delta_i0); "
            "not classically simulable by dephasing synthesis");
    if ((m.row(3).transpose() - ez).cwiseAbs().maxCoeff() > tol ||
        (m.col(3) - ez).cwiseAbs().maxCoeff() > tol)
        throw structural_error("transfer matrix mixes z with x/y: not dephasing form");
    if (std::abs(m(1, 1) - m(2, 2)) > tol || std::abs(m(1, 2) + m(2, 1)) > tol)
        throw structural_error("transfer (x,y) block is not proportional to a rotation");
    return {m(1, 1), m(2, 1)};
}

double trace_distance(const Matrix& a, const Matrix& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a - b);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

std::string EquivalenceReport::to_json() const {
    nlohmann::json j;
    j["max_trace_distance"] = max_trace_distance;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    auto per_time = nlohmann::json::array();
    for (std::size_t i = 0; i < times.size(); ++i)
        per_time.push_back({{"t", times[i]}, {"trace_distance", trace_distance[i]}});
    j["per_time"] = per_time;
    return j.dump(2);
}

EquivalenceReport verify_equivalence(const std::vector<double>& times,
                                     const std::vector<Matrix>& quantum_states,
                                     const Matrix& rho0,
                                     const FieldPair& fields,
                                     double tolerance) {
    if (times.size() != quantum_states.size())
        throw validation_error("verify_equivalence: grid/state count mismatch");
    EquivalenceReport rep;
    rep.times = times;
    rep.tolerance = tolerance;
    rep.trace_distance.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        Matrix cl = classical_evolve(rho0, fields, times[i]);
        rep.trace_distance[i] = rcnoise::trace_distance(quantum_states[i], cl);
        rep.max_trace_distance = std::max(rep.max_trace_distance, rep.trace_distance[i]);
    }
    rep.pass = rep.max_trace_distance < tolerance;
    return rep;
}

void KrausSet::validate(double tol) const {
    if (ops.empty()) throw validation_error("Kraus set is empty");
    Eigen::Index dim = ops.front().rows();
    Matrix sum = Matrix::Zero(dim, dim);
    for (const auto& m : ops) {
        if (m.rows() != dim || m.cols() != dim)
            throw validation_error("Kraus operators must share one square dimension");
        sum += m.adjoint() * m;
    }
    if ((sum - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > tol)
        throw validation_error("Kraus completeness sum M^dag M = I violated");
}

Matrix KrausSet::apply(const Matrix& rho) const {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& m : ops) out += m * rho * m.adjoint();
    return out;
}

Matrix dilation_build(const KrausSet& kraus) {
    kraus.validate();
    Eigen::Index s = kraus.ops.front().rows();
    Eigen::Index d = static_cast<Eigen::Index>(kraus.ops.size());
    Eigen::Index dim = s * d;
    Matrix u = Matrix::Zero(dim, dim);

    // the S defined columns: U(|n> (x) |0>) = sum_a M_a |n> (x) |a>
    for (Eigen::Index n = 0; n < s; ++n)
        for (Eigen::Index a = 0; a < d; ++a)
            for (Eigen::Index m = 0; m < s; ++m)
                u(m * d + a, n * d + 0) = kraus.ops[a](m, n);

    std::vector<Eigen::Index> have;
    for (Eigen::Index n = 0; n < s; ++n) have.push_back(n * d);

    // Gram-Schmidt completion over the remaining column slots
    for (Eigen::Index n = 0; n < s && static_cast<Eigen::Index>(have.size()) < dim; ++n) {
        for (Eigen::Index a = 1; a < d && static_cast<Eigen::Index>(have.size()) < dim; ++a) {
            Eigen::Index slot = n * d + a;
            // try standard basis candidates until one survives projection
            for (Eigen::Index k = 0; k < dim; ++k) {
                Vector cand = Vector::Zero(dim);
                cand(k) = 1.0;
                for (int pass = 0; pass < 2; ++pass)
                    for (Eigen::Index c : have) cand -= u.col(c).dot(cand) * u.col(c);
                double norm = cand.norm();
                if (norm > 1e-6) {
                    u.col(slot) = cand / norm;
                    have.push_back(slot);
                    break;
                }
            }
        }
    }
    if (static_cast<Eigen::Index>(have.size()) != dim)
        throw numerical_error("dilation_build: Gram-Schmidt completion failed");
    require_unitary(u);
    return u;
}

void write_fields_csv(const FieldPair& fields, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot open output file: " + path);
    out << "t,h1,h2,phi1,phi2\n";
    char buf[512];
    for (std::size_t i = 0; i < fields.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      fields.times[i], fields.h1[i], fields.h2[i],
                      fields.phi1[i], fields.phi2[i]);
        out << buf;
    }
}

} // namespace rcnoise
