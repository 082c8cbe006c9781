#include "rcnoise/depolarize.hpp"

#include "rcnoise/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>

namespace rcnoise {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(Eigen::Index n) {
    int k = 0;
    while ((Eigen::Index{1} << k) < n) ++k;
    return k;
}

} // namespace

KrausSet depolarize_kraus_set(int n_qubits, double p) {
    if (n_qubits < 1) throw validation_error("depolarize_kraus_set: n_qubits >= 1");
    if (p < 0.0 || p > 1.0) throw validation_error("depolarize_kraus_set: p in [0,1]");
    long total = 1L << (2 * n_qubits);  // 4^n Pauli strings
    double dim_scale = static_cast<double>(Eigen::Index{1} << n_qubits);

    KrausSet set;
    set.ops.reserve(total);
    set.ops.push_back(std::sqrt(1.0 - (total - 1) * p / total) *
                      identity(Eigen::Index{1} << n_qubits));
    for (long code = 1; code < total; ++code) {
        Matrix m = sigma(static_cast<int>(code % 4));
        for (long c = code / 4; true; c /= 4) {
            if (m.rows() == (Eigen::Index{1} << n_qubits)) break;
            m = kron(sigma(static_cast<int>(c % 4)), m);
        }
        set.ops.push_back(std::sqrt(p) / dim_scale * m);
    }
    set.validate();
    return set;
}

Matrix kraus_depolarize(const Matrix& rho0, double p) {
    if (p < 0.0 || p > 1.0) throw validation_error("kraus_depolarize: p in [0,1]");
    require_density(rho0);
    Eigen::Index n = rho0.rows();
    if (is_power_of_two(n) && n > 1)
        return depolarize_kraus_set(log2_exact(n), p).apply(rho0);
    return (1.0 - p) * rho0 + (p / static_cast<double>(n)) * identity(n);
}

HaarMcPoint haar_mc_depolarize(const Matrix& rho0, double t, std::size_t samples,
                               std::uint64_t seed) {
    if (samples < 1) throw validation_error("haar_mc_depolarize: samples >= 1");
    require_density(rho0);
    Eigen::Index n = rho0.rows();

    Matrix sum = Matrix::Zero(n, n);
    Eigen::Vector3d bsum = Eigen::Vector3d::Zero();
    Eigen::Vector3d bsum2 = Eigen::Vector3d::Zero();
    Matrix sx = sigma_x(), sy = sigma_y(), sz = sigma_z();

    for (std::size_t k = 0; k < samples; ++k) {
        Matrix u = haar_random_unitary(n, substream_seed(seed, k));
        Eigenphases ep = eigenphases(u);
        Vector ph(n);
        for (Eigen::Index j = 0; j < n; ++j)
            ph(j) = std::exp(Complex(0.0, -ep.phases(j) * t));
        Matrix e = ep.vectors * ph.asDiagonal() * ep.vectors.adjoint();
        Matrix state = e * rho0 * e.adjoint();
        sum += state;
        if (n == 2) {
            Eigen::Vector3d b((sx * state).trace().real(),
                              (sy * state).trace().real(),
                              (sz * state).trace().real());
            bsum += b;
            bsum2 += b.cwiseProduct(b);
        }
    }

    HaarMcPoint out;
    double ns = static_cast<double>(samples);
    out.state = sum / ns;
    out.state = 0.5 * (out.state + out.state.adjoint()).eval();
    if (n == 2) {
        out.bloch = bsum / ns;
        Eigen::Vector3d var = (bsum2 / ns - out.bloch.cwiseProduct(out.bloch))
                                  .cwiseMax(Eigen::Vector3d::Zero());
        out.bloch_err = (var / ns).cwiseSqrt();
    }
    return out;
}

double analytic_nz(double t) {
    if (t < 0.0) throw validation_error("analytic_nz: t must be >= 0");
    if (std::abs(t) < 1e-5) {
        double y = 2.0 * kPi * t;
        double g = 2.0 * kPi * (1.0 - y * y / 6.0) / (1.0 - t * t);
        return 1.0 / 3.0 + g / (3.0 * kPi);
    }
    if (std::abs(t - 1.0) < 1e-5) {
        double u = t - 1.0;
        double y = 2.0 * kPi * u;
        // sin(2 pi t) = sin(2 pi u); t - t^3 = -u t (t + 1)
        double g = -2.0 * kPi * (1.0 - y * y / 6.0) / (t * (t + 1.0));
        return 1.0 / 3.0 + g / (3.0 * kPi);
    }
    return 1.0 / 3.0 + std::sin(2.0 * kPi * t) / (3.0 * kPi * (t - t * t * t));
}

double find_nz_root() {
    // n_z(1) = 0 exactly; the sign change we want sits strictly inside (0.5, 1)
    double lo = 0.5, hi = 0.0;
    double prev = analytic_nz(lo);
    for (double t = 0.51; t < 0.999; t += 0.01) {
        double v = analytic_nz(t);
        if (prev > 0.0 && v <= 0.0) {
            hi = t;
            lo = t - 0.01;
            break;
        }
        prev = v;
    }
    if (hi == 0.0) throw numerical_error("find_nz_root: no sign change located");
    while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        if (analytic_nz(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<Matrix> clifford_table(int n) {
    if (n != 1)
        throw validation_error("clifford_table: only n = 1 is supported");

    auto canonical_key = [](const Matrix& m) {
        // phase-normalize on the largest-magnitude entry, then round
        Eigen::Index bi = 0, bj = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                if (std::abs(m(i, j)) > best + 1e-9) {
                    best = std::abs(m(i, j));
                    bi = i;
                    bj = j;
                }
        Complex phase = m(bi, bj) / std::abs(m(bi, bj));
        Matrix norm = m * std::conj(phase);
        std::string key;
        char buf[64];
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                double re = norm(i, j).real();
                double im = norm(i, j).imag();
                if (std::abs(re) < 1e-9) re = 0.0;
                if (std::abs(im) < 1e-9) im = 0.0;
                std::snprintf(buf, sizeof(buf), "%+.6f%+.6f|", re, im);
                key += buf;
            }
        return key;
    };

    Matrix h(2, 2), s(2, 2);
    h << 1.0, 1.0, 1.0, -1.0;
    h /= std::sqrt(2.0);
    s << 1.0, 0.0, 0.0, Complex(0.0, 1.0);

    std::map<std::string, Matrix> table;
    table.emplace(canonical_key(identity(2)), identity(2));
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Matrix> current;
        current.reserve(table.size());
        for (const auto& [key, m] : table) current.push_back(m);
        for (const auto& m : current)
            for (const Matrix* g : {&h, &s}) {
                Matrix prod = (*g) * m;
                auto key = canonical_key(prod);
                if (table.emplace(std::move(key), prod).second) grew = true;
            }
    }

    std::vector<Matrix> out;
    out.reserve(table.size());
    for (const auto& [key, m] : table) out.push_back(m);
    return out;
}

Matrix clifford_average(const Matrix& rho0, const std::vector<Matrix>& table) {
    if (table.empty()) throw validation_error("clifford_average: empty table");
    if (rho0.rows() != table.front().rows())
        throw validation_error("clifford_average: dimension mismatch");
    require_density(rho0);
    Matrix sum = Matrix::Zero(rho0.rows(), rho0.cols());
    for (const auto& c : table) sum += c * rho0 * c.adjoint();
    return sum / static_cast<double>(table.size());
}

IsotropyReport haar_isotropy_check(const Matrix& rho0, double t,
                                   std::size_t samples, std::uint64_t seed) {
    if (rho0.rows() != 2)
        throw validation_error("haar_isotropy_check: qubit states only");
    HaarMcPoint point = haar_mc_depolarize(rho0, t, samples, seed);

    ExpandedBloch n0 = density_to_bloch(rho0);
    Eigen::Vector3d axis(n0.x, n0.y, n0.z);
    IsotropyReport rep;
    rep.initial_axis = axis;
    if (axis.norm() > 1e-12) {
        axis.normalize();
        rep.parallel_component = point.bloch.dot(axis);
        rep.transverse_norm = (point.bloch - rep.parallel_component * axis).norm();
    } else {
        rep.parallel_component = 0.0;
        rep.transverse_norm = point.bloch.norm();
    }
    rep.transverse_limit = 3.0 * point.bloch_err.norm();
    rep.pass = rep.transverse_norm <= rep.transverse_limit;
    return rep;
}

} // namespace rcnoise
