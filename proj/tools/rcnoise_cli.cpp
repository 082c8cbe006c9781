// rcnoise-cli - front end for the noise-synthesis library.
//
// Subcommands:
//   synthesize  - decoherence trace -> classical field pair + equivalence check
//   depolarize  - Haar Monte Carlo depolarization sweep vs the analytic curve
//   multiqubit  - r-matrix time series + transitivity / MC validity report
//   verify      - tabulated r,phi trace -> synthesis round-trip check
//
// Exit codes: 0 success, 1 configuration error, 2 synthesis singularity,
// 3 model-validity failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "rcnoise/dephasing.hpp"
#include "rcnoise/depolarize.hpp"
#include "rcnoise/models.hpp"
#include "rcnoise/multiqubit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rcnoise;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSingularity = 2;
constexpr int kExitModel = 3;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> make_grid(double t_max, std::size_t points) {
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
    return grid;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file: " + path);
    return json::parse(in);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write file: " + path.string());
    out << text;
}

struct CommonOpts {
    std::string config;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    std::size_t samples = 100000;
    std::size_t grid_points = 201;
    double t_max = 1.5;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config) {
    auto* copt = cmd->add_option("--config", o.config, "model spec (JSON path)");
    if (needs_config) copt->required();
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--samples", o.samples, "Monte Carlo sample count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--grid-points", o.grid_points, "time grid size")
        ->check(CLI::Range(std::size_t{3}, std::size_t{1000000}));
    cmd->add_option("--t-max", o.t_max, "time grid upper end")
        ->check(CLI::PositiveNumber);
}

// quantum reference states for a trace: apply [[c,-s],[s,c]] to rho0's
// off-diagonal, populations untouched (exact for any dephasing channel)
std::vector<Matrix> states_from_trace(const DecoherenceTrace& trace,
                                      const Matrix& rho0) {
    std::vector<Matrix> out;
    out.reserve(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        Matrix rho = rho0;
        Complex d(trace.c[i], trace.s[i]);
        rho(1, 0) = rho0(1, 0) * d;
        rho(0, 1) = std::conj(rho(1, 0));
        out.push_back(rho);
    }
    return out;
}

int run_synthesize(const CommonOpts& o) {
    json cfg = load_json(o.config);
    std::string model = cfg.at("model").get<std::string>();
    double B = cfg.value("B", 0.0);
    double tolerance = cfg.value("tolerance", 1e-6);

    std::size_t points = o.grid_points;
    double t_max = o.t_max;
    if (cfg.contains("grid_points")) points = cfg["grid_points"].get<std::size_t>();
    if (cfg.contains("t_max")) t_max = cfg["t_max"].get<double>();
    std::vector<double> grid = make_grid(t_max, points);

    DecoherenceTrace trace;
    std::vector<Matrix> quantum;
    Matrix rho0 = 0.5 * (identity(2) + 0.8 * sigma_x() + 0.3 * sigma_z());
    FieldPair fields;

    if (model == "central-spin") {
        CentralSpinParams params;
        params.alpha = cfg.at("alpha").get<double>();
        params.B = B;
        CentralSpinTrace cs = central_spin_trace(params, grid);
        trace = cs.trace;
        if (!cs.flagged.empty())
            std::cerr << "note: " << cs.flagged.size()
                      << " grid points outside the alpha*t < 1 validity window\n";
        // exact angles, no finite-difference error in the phases
        fields = fields_from_angles(central_spin_angles(params, grid), B);
    } else if (model == "spin-boson") {
        SpinBosonParams params;
        params.B = B;
        params.ohmic.amplitude = cfg.value("amplitude", 1.0);
        params.ohmic.cutoff = cfg.at("cutoff").get<double>();
        params.ohmic.thermal_time = cfg.at("thermal_time").get<double>();
        trace = spin_boson_trace(params, grid);
        fields = synthesize_fields(trace, B);
    } else if (model == "tabulated") {
        TabulatedDecoherence tab = load_decoherence_csv(cfg.at("csv").get<std::string>());
        tab.B = B;
        trace = trace_from_tabulated(tab);
        grid = tab.times;
        fields = fields_from_angles(angles_from_tabulated(tab), B);
    } else if (model == "finite-bath") {
        Eigen::Index bath_dim = cfg.value("bath_dim", 4);
        FiniteBathModel fb = random_finite_bath_model(bath_dim, B, o.seed);
        trace = finite_bath_trace(fb, grid);
        fields = synthesize_fields(trace, B);
        quantum.reserve(grid.size());
        for (double t : grid) {
            Matrix u = finite_bath_unitary(fb, t);
            quantum.push_back(partial_trace_bath(
                u * kron(rho0, fb.rho_b0) * u.adjoint(), fb.bath_dim));
        }
    } else {
        throw validation_error("unknown model: " + model);
    }

    if (quantum.empty()) quantum = states_from_trace(trace, rho0);

    fs::create_directories(o.out_dir);
    write_fields_csv(fields, (fs::path(o.out_dir) / "fields.csv").string());

    EquivalenceReport rep = verify_equivalence(grid, quantum, rho0, fields, tolerance);
    write_text(fs::path(o.out_dir) / "equivalence.json", rep.to_json());
    std::cout << "max trace distance " << rep.max_trace_distance << " (tolerance "
              << rep.tolerance << "): " << (rep.pass ? "pass" : "FAIL") << "\n";
    return rep.pass ? kExitOk : kExitModel;
}

int run_depolarize(const CommonOpts& o) {
    bool clifford_mode = false;
    if (!o.config.empty()) {
        json cfg = load_json(o.config);
        clifford_mode = cfg.value("clifford", false);
    }

    std::size_t points = std::min<std::size_t>(o.grid_points, 201);
    std::vector<double> grid = make_grid(o.t_max, points);
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(0, 0) = 1.0;

    fs::create_directories(o.out_dir);
    std::ofstream csv(fs::path(o.out_dir) / "depolarize.csv");
    csv << "t,nz_mc,nz_err,nz_analytic\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        HaarMcPoint p = haar_mc_depolarize(rho0, grid[i], o.samples,
                                           substream_seed(o.seed, i));
        csv << fmt17(grid[i]) << ',' << fmt17(p.bloch(2)) << ','
            << fmt17(p.bloch_err(2)) << ',' << fmt17(analytic_nz(grid[i])) << "\n";
    }
    csv.close();

    IsotropyReport iso = haar_isotropy_check(rho0, 0.5, o.samples, o.seed);
    json rep;
    rep["isotropy"] = {{"parallel_component", iso.parallel_component},
                       {"transverse_norm", iso.transverse_norm},
                       {"transverse_limit", iso.transverse_limit},
                       {"pass", iso.pass}};
    rep["nz_root"] = find_nz_root();
    if (clifford_mode) {
        auto table = clifford_table(1);
        Matrix avg = clifford_average(rho0, table);
        rep["clifford"] = {
            {"elements", table.size()},
            {"average_deviation_from_mixed",
             (avg - 0.5 * identity(2)).cwiseAbs().maxCoeff()}};
    }
    write_text(fs::path(o.out_dir) / "depolarize.json", rep.dump(2));
    std::cout << "depolarize sweep written (" << grid.size() << " points, "
              << o.samples << " samples/point); isotropy "
              << (iso.pass ? "pass" : "FAIL") << "\n";
    return iso.pass ? kExitOk : kExitModel;
}

int run_multiqubit(const CommonOpts& o) {
    std::ifstream in(o.config);
    if (!in) throw validation_error("cannot open config file: " + o.config);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    BellBasisModel model = bell_basis_model_from_json(text);

    fs::create_directories(o.out_dir);
    Eigen::Index dim = Eigen::Index{1} << model.n;

    std::ofstream csv(fs::path(o.out_dir) / "r_matrix.csv");
    csv << "t";
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = i + 1; j < dim; ++j)
            csv << ",re_r" << i << j << ",im_r" << i << j;
    csv << "\n";
    bool transitive = true;
    double worst = 0.0;
    for (double t : model.grid) {
        Matrix r = r_matrix(model, t);
        csv << fmt17(t);
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = i + 1; j < dim; ++j)
                csv << ',' << fmt17(r(i, j).real()) << ',' << fmt17(r(i, j).imag());
        csv << "\n";
        auto res = check_transitivity(gamma_matrix(model.theta_at(t)));
        transitive = transitive && res.ok;
        worst = std::max(worst, res.worst_violation);
    }
    csv.close();

    // MC cross-check of the analytic evolution at the end of the grid
    Matrix rho0 = random_density(dim, o.seed);
    double t_end = model.grid.back();
    Matrix analytic = classical_multiqubit_evolve(rho0, model, t_end);
    McEvolveResult mc = mc_multiqubit_evolve(rho0, model, t_end, o.samples, o.seed);
    double worst_sigma = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) {
            double se = std::max({mc.stderr_re(i, j), mc.stderr_im(i, j), 1e-12});
            worst_sigma = std::max(
                worst_sigma, std::abs(mc.mean(i, j) - analytic(i, j)) / se);
        }

    json rep;
    rep["transitivity"] = {{"pass", transitive}, {"worst_violation", worst}};
    rep["mc_check"] = {{"samples", o.samples},
                       {"worst_deviation_sigmas", worst_sigma},
                       {"pass", worst_sigma < 5.0}};
    write_text(fs::path(o.out_dir) / "validity.json", rep.dump(2));
    std::cout << "r-matrix series written; transitivity "
              << (transitive ? "pass" : "FAIL") << ", MC deviation "
              << worst_sigma << " sigma\n";
    return (transitive && worst_sigma < 5.0) ? kExitOk : kExitModel;
}

int run_verify(const CommonOpts& o) {
    json cfg = load_json(o.config);
    TabulatedDecoherence tab = load_decoherence_csv(cfg.at("csv").get<std::string>());
    tab.B = cfg.value("B", 0.0);
    double tolerance = cfg.value("tolerance", 1e-6);

    DecoherenceTrace trace = trace_from_tabulated(tab);
    FieldPair fields = fields_from_angles(angles_from_tabulated(tab), tab.B);
    Matrix rho0 = 0.5 * (identity(2) + 0.9 * sigma_x());
    std::vector<Matrix> quantum = states_from_trace(trace, rho0);

    EquivalenceReport rep =
        verify_equivalence(tab.times, quantum, rho0, fields, tolerance);
    fs::create_directories(o.out_dir);
    write_text(fs::path(o.out_dir) / "equivalence.json", rep.to_json());
    write_fields_csv(fields, (fs::path(o.out_dir) / "fields.csv").string());
    std::cout << "max trace distance " << rep.max_trace_distance << ": "
              << (rep.pass ? "pass" : "FAIL") << "\n";
    return rep.pass ? kExitOk : kExitModel;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"classical random-field synthesis of quantum noise channels"};
    app.require_subcommand(1);

    CommonOpts syn, dep, mq, ver;
    auto* c_syn = app.add_subcommand(
        "synthesize", "synthesize classical fields from a decoherence model");
    add_common(c_syn, syn, true);
    auto* c_dep = app.add_subcommand(
        "depolarize", "Haar Monte Carlo depolarization sweep");
    add_common(c_dep, dep, false);
    auto* c_mq = app.add_subcommand(
        "multiqubit", "multiqubit dephasing r-matrix and validity checks");
    add_common(c_mq, mq, true);
    auto* c_ver = app.add_subcommand(
        "verify", "round-trip check of a tabulated decoherence trace");
    add_common(c_ver, ver, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (c_syn->parsed()) return run_synthesize(syn);
        if (c_dep->parsed()) return run_depolarize(dep);
        if (c_mq->parsed()) return run_multiqubit(mq);
        if (c_ver->parsed()) return run_verify(ver);
    } catch (const singularity_error& e) {
        std::cerr << "synthesis singularity: " << e.what() << "\n";
        return kExitSingularity;
    } catch (const model_error& e) {
        std::cerr << "model validity failure: " << e.what() << "\n";
        return kExitModel;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
