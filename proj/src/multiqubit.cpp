#include "rcnoise/multiqubit.hpp"

#include "rcnoise/bloch.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace rcnoise {

namespace {

// symplectic code of a string: x bits in the low n positions, z bits above
std::uint32_t symplectic_code(const PauliString& p) {
    std::uint32_t x = 0, z = 0;
    for (int q = 0; q < p.n; ++q) {
        int l = p.letters[q];
        if (l == 1 || l == 2) x |= 1u << q;
        if (l == 2 || l == 3) z |= 1u << q;
    }
    return x | (z << p.n);
}

PauliString from_symplectic(std::uint32_t code, int n) {
    PauliString p;
    p.n = n;
    p.letters.resize(n);
    for (int q = 0; q < n; ++q) {
        bool x = (code >> q) & 1u;
        bool z = (code >> (n + q)) & 1u;
        p.letters[q] = x ? (z ? 2 : 1) : (z ? 3 : 0);
    }
    return p;
}

bool symplectic_commutes(std::uint32_t a, std::uint32_t b, int n) {
    std::uint32_t mask = (1u << n) - 1u;
    std::uint32_t ax = a & mask, az = (a >> n) & mask;
    std::uint32_t bx = b & mask, bz = (b >> n) & mask;
    return (__builtin_popcount(ax & bz) + __builtin_popcount(az & bx)) % 2 == 0;
}

} // namespace

PauliString PauliString::parse(const std::string& text) {
    PauliString p;
    p.n = static_cast<int>(text.size());
    if (p.n == 0) throw validation_error("empty Pauli string");
    for (char c : text) {
        switch (c) {
            case 'I': case 'i': case '0': p.letters.push_back(0); break;
            case 'X': case 'x': p.letters.push_back(1); break;
            case 'Y': case 'y': p.letters.push_back(2); break;
            case 'Z': case 'z': p.letters.push_back(3); break;
            default:
                throw validation_error(std::string("bad Pauli letter '") + c + "'");
        }
    }
    return p;
}

Matrix PauliString::to_matrix() const {
    if (static_cast<int>(letters.size()) != n)
        throw validation_error("Pauli string length mismatch");
    Matrix m = sigma(letters.at(0));
    for (int q = 1; q < n; ++q) m = kron(m, sigma(letters[q]));
    return m;
}

std::string PauliString::str() const {
    static const char names[] = "IXYZ";
    std::string out;
    for (int l : letters) out.push_back(names[l]);
    return out;
}

bool PauliString::is_identity() const {
    return std::all_of(letters.begin(), letters.end(), [](int l) { return l == 0; });
}

bool pauli_commutes(const PauliString& a, const PauliString& b) {
    if (a.n != b.n) throw validation_error("pauli_commutes: size mismatch");
    int anti = 0;
    for (int q = 0; q < a.n; ++q)
        if (a.letters[q] != 0 && b.letters[q] != 0 && a.letters[q] != b.letters[q])
            ++anti;
    return anti % 2 == 0;
}

void CommutingSet::validate() const {
    int expect = (1 << n) - 1;
    if (static_cast<int>(members.size()) != expect)
        throw validation_error("commuting set must have 2^n - 1 members");
    for (const auto& p : members) {
        if (p.n != n) throw validation_error("commuting set: qubit count mismatch");
        if (p.is_identity()) throw validation_error("commuting set: identity member");
    }
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j)
            if (!pauli_commutes(members[i], members[j]))
                throw validation_error("commuting set: members " + members[i].str() +
                                       " and " + members[j].str() + " anticommute");
}

std::vector<CommutingSet> partition_commuting_sets(int n) {
    if (n < 1 || n > 3)
        throw validation_error("partition_commuting_sets: n must be 1..3");
    int total = (1 << (2 * n)) - 1;  // 4^n - 1 non-identity strings
    int set_size = (1 << n) - 1;

    // candidate sets = isotropic subspaces of full rank (minus zero), found by
    // closing spans of commuting generators
    std::set<std::vector<std::uint32_t>> candidates;
    std::vector<std::uint32_t> all;
    for (int c = 1; c <= total; ++c) all.push_back(static_cast<std::uint32_t>(c));

    std::vector<std::uint32_t> gens;
    auto closed_span = [&](const std::vector<std::uint32_t>& g) {
        std::set<std::uint32_t> span{0};
        for (std::uint32_t v : g) {
            std::set<std::uint32_t> next = span;
            for (std::uint32_t w : span) next.insert(w ^ v);
            span = next;
        }
        span.erase(0);
        return std::vector<std::uint32_t>(span.begin(), span.end());
    };

    std::function<void(std::size_t)> grow = [&](std::size_t start) {
        if (static_cast<int>(gens.size()) == n) {
            auto span = closed_span(gens);
            if (static_cast<int>(span.size()) == set_size)
                candidates.insert(span);
            return;
        }
        for (std::size_t k = start; k < all.size(); ++k) {
            std::uint32_t v = all[k];
            bool ok = true;
            for (std::uint32_t g : gens)
                if (!symplectic_commutes(g, v, n)) { ok = false; break; }
            if (!ok) continue;
            gens.push_back(v);
            grow(k + 1);
            gens.pop_back();
        }
    };
    grow(0);

    std::vector<std::vector<std::uint32_t>> cand(candidates.begin(), candidates.end());

    // exact cover by 2^n + 1 disjoint candidate sets
    std::vector<std::vector<std::uint32_t>> chosen;
    std::set<std::uint32_t> covered;
    std::function<bool()> cover = [&]() -> bool {
        if (static_cast<int>(covered.size()) == total) return true;
        std::uint32_t pivot = 0;
        for (std::uint32_t v : all)
            if (!covered.count(v)) { pivot = v; break; }
        for (const auto& c : cand) {
            if (std::find(c.begin(), c.end(), pivot) == c.end()) continue;
            if (std::any_of(c.begin(), c.end(),
                            [&](std::uint32_t v) { return covered.count(v) > 0; }))
                continue;
            chosen.push_back(c);
            for (std::uint32_t v : c) covered.insert(v);
            if (cover()) return true;
            for (std::uint32_t v : c) covered.erase(v);
            chosen.pop_back();
        }
        return false;
    };
    if (!cover())
        throw numerical_error("partition_commuting_sets: no partition found");

    std::vector<CommutingSet> out;
    for (const auto& c : chosen) {
        CommutingSet set;
        set.n = n;
        for (std::uint32_t v : c) set.members.push_back(from_symplectic(v, n));
        set.validate();
        out.push_back(std::move(set));
    }
    return out;
}

Matrix simultaneous_eigenbasis(const CommutingSet& set) {
    set.validate();
    Eigen::Index dim = 1 << set.n;
    Matrix basis = Matrix::Identity(dim, dim);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks{{0, dim}};

    for (const auto& p : set.members) {
        Matrix op = p.to_matrix();
        std::vector<std::pair<Eigen::Index, Eigen::Index>> next;
        for (auto [lo, len] : blocks) {
            if (len == 1) {
                next.emplace_back(lo, len);
                continue;
            }
            Matrix q = basis.middleCols(lo, len);
            Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(q.adjoint() * op * q));
            basis.middleCols(lo, len) = q * es.eigenvectors();
            // split into eigenvalue clusters
            Eigen::Index start = 0;
            for (Eigen::Index k = 1; k <= len; ++k) {
                if (k == len ||
                    std::abs(es.eigenvalues()(k) - es.eigenvalues()(start)) > 1e-8) {
                    next.emplace_back(lo + start, k - start);
                    start = k;
                }
            }
        }
        blocks = std::move(next);
    }
    return basis;
}

Eigen::MatrixXd gamma_matrix(const std::vector<double>& theta) {
    Eigen::Index m = static_cast<Eigen::Index>(theta.size());
    Eigen::MatrixXd g(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            g(i, j) = theta[i] - theta[j];
    return g;
}

TransitivityResult check_transitivity(const Eigen::MatrixXd& gamma) {
    if (gamma.rows() != gamma.cols())
        throw validation_error("check_transitivity: matrix must be square");
    if ((gamma + gamma.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw validation_error("check_transitivity: matrix must be antisymmetric");
    TransitivityResult res;
    for (Eigen::Index i = 0; i < gamma.rows(); ++i)
        for (Eigen::Index j = 0; j < gamma.rows(); ++j)
            for (Eigen::Index k = 0; k < gamma.rows(); ++k)
                res.worst_violation =
                    std::max(res.worst_violation,
                             std::abs(gamma(i, j) - gamma(i, k) - gamma(k, j)));
    res.ok = res.worst_violation <= 1e-10;
    return res;
}

AlphaDistribution AlphaDistribution::gaussian(double sigma) {
    AlphaDistribution d;
    d.kind = Kind::Gaussian;
    d.sigma = sigma;
    d.validate();
    return d;
}

AlphaDistribution AlphaDistribution::uniform(double a, double b) {
    AlphaDistribution d;
    d.kind = Kind::Uniform;
    d.a = a;
    d.b = b;
    d.validate();
    return d;
}

AlphaDistribution AlphaDistribution::discrete(std::vector<double> points,
                                              std::vector<double> weights) {
    AlphaDistribution d;
    d.kind = Kind::Discrete;
    d.points = std::move(points);
    d.weights = std::move(weights);
    d.validate();
    return d;
}

void AlphaDistribution::validate() const {
    switch (kind) {
        case Kind::Gaussian:
            if (sigma <= 0.0) throw validation_error("gaussian: sigma must be positive");
            break;
        case Kind::Uniform:
            if (!(a < b)) throw validation_error("uniform: need a < b");
            break;
        case Kind::Discrete: {
            if (points.empty() || points.size() != weights.size())
                throw validation_error("discrete: points/weights mismatch");
            double sum = 0.0;
            for (double w : weights) {
                if (w < 0.0) throw validation_error("discrete: negative weight");
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw validation_error("discrete: weights must sum to 1");
            break;
        }
    }
}

Complex AlphaDistribution::char_fn(double x) const {
    switch (kind) {
        case Kind::Gaussian:
            return Complex(std::exp(-0.5 * sigma * sigma * x * x), 0.0);
        case Kind::Uniform: {
            double half = 0.5 * (b - a) * x;
            double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0
                                                : std::sin(half) / half;
            return std::exp(Complex(0.0, -0.5 * (a + b) * x)) * sinc;
        }
        case Kind::Discrete: {
            Complex sum = 0.0;
            for (std::size_t k = 0; k < points.size(); ++k)
                sum += weights[k] * std::exp(Complex(0.0, -points[k] * x));
            return sum;
        }
    }
    throw validation_error("unknown distribution kind");
}

double AlphaDistribution::sample(std::mt19937_64& rng) const {
    switch (kind) {
        case Kind::Gaussian: {
            std::normal_distribution<double> d(0.0, sigma);
            return d(rng);
        }
        case Kind::Uniform: {
            std::uniform_real_distribution<double> d(a, b);
            return d(rng);
        }
        case Kind::Discrete: {
            std::uniform_real_distribution<double> d(0.0, 1.0);
            double u = d(rng);
            double acc = 0.0;
            for (std::size_t k = 0; k < points.size(); ++k) {
                acc += weights[k];
                if (u <= acc) return points[k];
            }
            return points.back();
        }
    }
    throw validation_error("unknown distribution kind");
}

void BellBasisModel::validate() const {
    if (n < 1) throw validation_error("model: n must be >= 1");
    std::size_t levels = std::size_t{1} << n;
    if (theta.size() != levels)
        throw validation_error("model: need 2^n theta functions");
    if (grid.size() < 2) throw validation_error("model: grid too small");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw validation_error("model: grid must be strictly increasing");
    for (const auto& row : theta)
        if (row.size() != grid.size())
            throw validation_error("model: theta sampling does not match grid");
    dist.validate();
    if (basis.size() > 0) {
        if (basis.rows() != static_cast<Eigen::Index>(levels) || basis.cols() != basis.rows())
            throw validation_error("model: basis dimension mismatch");
        require_unitary(basis);
    }
}

std::vector<double> BellBasisModel::theta_at(double t) const {
    if (t < grid.front() - 1e-12 || t > grid.back() + 1e-12)
        throw std::out_of_range("theta_at: time outside grid");
    t = std::clamp(t, grid.front(), grid.back());
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    std::size_t j = std::min<std::size_t>(std::distance(grid.begin(), it), grid.size() - 1);
    std::size_t i = j > 0 ? j - 1 : 0;
    if (i == j) j = i + 1;
    double w = (t - grid[i]) / (grid[j] - grid[i]);
    std::vector<double> out(theta.size());
    for (std::size_t l = 0; l < theta.size(); ++l)
        out[l] = theta[l][i] + w * (theta[l][j] - theta[l][i]);
    return out;
}

BellBasisModel bell_basis_model_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    BellBasisModel model;
    model.n = j.at("n").get<int>();

    if (j.contains("commuting_set")) {
        CommutingSet set;
        set.n = model.n;
        for (const auto& s : j.at("commuting_set"))
            set.members.push_back(PauliString::parse(s.get<std::string>()));
        set.validate();
        model.basis = simultaneous_eigenbasis(set);
    }

    const auto& th = j.at("theta");
    model.grid = th.at("grid").get<std::vector<double>>();
    model.theta = th.at("values").get<std::vector<std::vector<double>>>();

    const auto& d = j.at("dist");
    std::string kind = d.at("kind").get<std::string>();
    if (kind == "gaussian") {
        model.dist = AlphaDistribution::gaussian(d.at("sigma").get<double>());
    } else if (kind == "uniform") {
        model.dist = AlphaDistribution::uniform(d.at("a").get<double>(),
                                                d.at("b").get<double>());
    } else if (kind == "discrete") {
        model.dist = AlphaDistribution::discrete(
            d.at("points").get<std::vector<double>>(),
            d.at("weights").get<std::vector<double>>());
    } else {
        throw validation_error("unknown distribution kind: " + kind);
    }
    model.validate();
    return model;
}

Matrix r_matrix(const BellBasisModel& model, double t) {
    std::vector<double> th = model.theta_at(t);
    Eigen::MatrixXd g = gamma_matrix(th);
    Eigen::Index m = g.rows();
    Matrix r(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        r(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < m; ++j) {
            r(i, j) = model.dist.char_fn(g(i, j));
            r(j, i) = std::conj(r(i, j));
        }
    }
    return r;
}

Matrix classical_multiqubit_evolve(const Matrix& rho0, const BellBasisModel& model,
                                   double t) {
    Eigen::Index dim = Eigen::Index{1} << model.n;
    if (rho0.rows() != dim || rho0.cols() != dim)
        throw validation_error("classical_multiqubit_evolve: state dimension mismatch");
    require_density(rho0);
    Matrix r = r_matrix(model, t);
    Matrix out = rho0.cwiseProduct(r);
    for (Eigen::Index i = 0; i < dim; ++i) out(i, i) = rho0(i, i);

    Eigen::SelfAdjointEigenSolver<Matrix> es(out);
    if (es.eigenvalues().minCoeff() < -1e-8)
        throw model_error(
            "element-wise damping produced a non-positive state: the chosen "
            "p~/gamma combination is unphysical on this grid");
    return out;
}

McEvolveResult mc_multiqubit_evolve(const Matrix& rho0, const BellBasisModel& model,
                                    double t, std::size_t samples,
                                    std::uint64_t seed) {
    if (samples < 1) throw validation_error("mc_multiqubit_evolve: samples >= 1");
    Eigen::Index dim = Eigen::Index{1} << model.n;
    if (rho0.rows() != dim || rho0.cols() != dim)
        throw validation_error("mc_multiqubit_evolve: state dimension mismatch");
    std::vector<double> th = model.theta_at(t);
    Eigen::MatrixXd g = gamma_matrix(th);

    Matrix sum = Matrix::Zero(dim, dim);
    Eigen::MatrixXd sum_re2 = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd sum_im2 = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t k = 0; k < samples; ++k) {
        std::mt19937_64 rng(substream_seed(seed, k));
        double alpha = model.dist.sample(rng);
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = 0; j < dim; ++j) {
                Complex v = rho0(i, j) * std::exp(Complex(0.0, -alpha * g(i, j)));
                sum(i, j) += v;
                sum_re2(i, j) += v.real() * v.real();
                sum_im2(i, j) += v.imag() * v.imag();
            }
    }
    McEvolveResult res;
    double ns = static_cast<double>(samples);
    res.mean = sum / ns;
    res.stderr_re.resize(dim, dim);
    res.stderr_im.resize(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) {
            double mre = res.mean(i, j).real();
            double mim = res.mean(i, j).imag();
            double vre = std::max(0.0, sum_re2(i, j) / ns - mre * mre);
            double vim = std::max(0.0, sum_im2(i, j) / ns - mim * mim);
            res.stderr_re(i, j) = std::sqrt(vre / ns);
            res.stderr_im(i, j) = std::sqrt(vim / ns);
        }
    return res;
}

} // namespace rcnoise
