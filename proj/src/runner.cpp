#include "hhodual/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace hhodual {

RunConfig validate(RunConfig config)
{
    if (config.problem != "odp" && config.problem != "bingham" && config.problem != "plaplace")
        throw UsageError("unknown problem '" + config.problem + "' (expected odp, bingham or plaplace)");
    if (config.k < 0 || config.k > 3) throw UsageError("k must be in {0,1,2,3}");
    if (!(config.r > 1.0)) throw UsageError("r must be greater than 1");
    if (!(config.theta > 0.0 && config.theta <= 1.0)) throw UsageError("theta must lie in (0, 1]");
    if (config.eps_set && config.problem != "bingham") throw UsageError("--eps only applies to --problem bingham");
    if (config.p_set && config.problem != "plaplace") throw UsageError("--p only applies to --problem plaplace");
    if (config.f_const && config.problem != "odp") throw UsageError("--f-const only applies to --problem odp");
    if (!(config.eps > 0.0)) throw UsageError("eps must be positive");
    if (config.problem == "plaplace" && config.p != 4.0)
        throw UsageError("the p-Laplace benchmark has a known solution for p = 4 only");
    if (config.levels < 0 || config.max_ndof < 0) throw UsageError("levels and max-ndof must be nonnegative");
    if (config.problem == "plaplace" && !config.mesh_file.empty())
        throw UsageError("the p-Laplace benchmark is defined on the built-in L-shape only");
    if (config.levels == 0 && config.max_ndof == 0) {
        if (config.refine == RefineMode::Uniform) config.levels = 4;
        else config.max_ndof = 20000;
    }
    if (config.problem == "bingham") config.f_value = 10.0;
    else if (config.problem == "odp") config.f_value = config.f_const.value_or(1.0);
    return config;
}

Problem make_problem(const RunConfig& config)
{
    if (config.problem == "bingham") return bingham_problem(config.mu, config.g, config.eps, config.f_value);
    if (config.problem == "odp") return odp_problem(config.mu1, config.mu2, config.lambda, config.f_value);
    return plaplace_problem(config.p);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope needs at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

std::vector<double> continuation_steps(double target)
{
    std::vector<double> eps;
    for (double e = 1.0; e > target * 1.0001; e /= 10.0) eps.push_back(e);
    eps.push_back(target);
    return eps;
}

struct LevelSolve
{
    Eigen::VectorXd u;
    SolveReport report;
    int iterations = 0;
};

LevelSolve solve_level(const RunConfig& config, const Problem& problem, const Discretization& disc,
                       const Eigen::VectorXd& fh, const Eigen::VectorXd& start)
{
    const DofMap dofs(disc);
    LevelSolve out;
    auto attempt = [&](const EnergyDensity& density, Eigen::VectorXd& u) {
        const DiscreteEnergy energy(disc, density, fh);
        const SolveReport rep = minimize(energy, dofs, u);
        out.iterations += rep.iterations;
        return rep;
    };
    if (problem.name != "bingham") {
        out.u = start;
        out.report = attempt(*problem.density, out.u);
        return out;
    }
    if (start.norm() > 0.0) {
        out.u = start;
        out.report = attempt(*problem.density, out.u);
        if (out.report.converged) return out;
    }
    // continuation in the regularization parameter
    out.u = Eigen::VectorXd::Zero(disc.num_primal());
    for (double eps : continuation_steps(config.eps)) {
        const auto density = make_bingham(config.mu, config.g, eps);
        out.report = attempt(*density, out.u);
    }
    return out;
}

} // namespace

RunResult run(const RunConfig& raw, const LevelCallback& callback)
{
    RunResult result;
    result.config = validate(raw);
    const RunConfig& config = result.config;
    const Problem problem = make_problem(config);

    HhoParams params;
    params.k = config.k;
    params.r = config.r;
    params.s = config.s;
    params.p = problem.density->growth_exponent();
    params.singular_point = problem.singular_point;

    auto mesh = std::make_unique<Mesh>(config.mesh_file.empty() ? lshape_initial() : read_mesh(config.mesh_file));
    std::unique_ptr<Mesh> prev_mesh;
    std::unique_ptr<Discretization> prev_disc;
    Eigen::VectorXd prev_u;
    const ScalarField* datum = problem.exact ? &problem.exact->u : nullptr;

    for (int level = 0;; ++level) {
        const auto t0 = std::chrono::steady_clock::now();
        auto disc = std::make_unique<Discretization>(*mesh, params);
        const Eigen::VectorXd fh = project_source(*disc, problem.f);
        const Eigen::VectorXd start = prev_disc ? prolongate(*prev_disc, prev_u, *disc, datum) : dirichlet_lift(*disc, datum);
        LevelSolve sol = solve_level(config, problem, *disc, fh, start);

        RunRecord rec;
        rec.level = level;
        rec.ndof = DofMap(*disc).num_free();
        rec.cells = mesh->num_cells();
        rec.hmax = mesh->h_max();
        rec.energy_h = sol.report.energy;
        rec.newton_iterations = sol.iterations;
        rec.converged = sol.report.converged;
        rec.fh_norm = fh.norm();

        const DiscreteEnergy energy(*disc, *problem.density, fh);
        std::vector<double> eta;
        try {
            const EulerLagrangeReport el = check_euler_lagrange(energy, sol.u);
            rec.el_residual = el.max_face_residual;
            rec.el_scale = el.scale;
            const Eigen::VectorXd sigma_h = dual_traces(energy, sol.u);
            const Eigen::VectorXd lift = dirichlet_lift(*disc, datum);
            rec.discrete_dual_energy = discrete_dual_energy(*disc, *problem.density, fh, sigma_h, datum ? &lift : nullptr);
            const RTField sigma0 = rt_reconstruct(*disc, sigma_h);
            const ConformingField v0 = nodal_average(*disc, sol.u, problem.exact);
            const EstimateReport est = estimate(*disc, problem, fh, sigma0, v0);
            rec.energy_v0 = est.energy_v0;
            rec.dual_energy = est.dual_energy;
            rec.leb = est.leb;
            rec.gap = est.gap;
            rec.osc = est.osc;
            rec.osc_p2 = est.osc_p2;
            rec.eta_sum = est.eta_sum;
            rec.energy_sigma_v0 = est.energy_sigma_v0;
            rec.div_residual = est.div_residual;
            rec.min_eta_raw = est.min_eta_raw;
            rec.errors = est.errors;
            eta = est.indicator;
            result.eta_levels.push_back(est.eta);
        } catch (const EstimatorError& e) {
            rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            result.records.push_back(rec);
            result.exit_code = 4;
            result.message = e.what();
            result.final_mesh = *mesh;
            return result;
        }
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.records.push_back(rec);
        if (callback) callback(rec);

        if (!rec.converged) {
            result.exit_code = 3;
            result.message = "Newton solver did not converge on level " + std::to_string(level);
            break;
        }
        if (!(rec.discrete_dual_energy <= rec.energy_h + 1e-8 * (1.0 + std::abs(rec.energy_h)))) {
            result.exit_code = 4;
            result.message = "discrete weak duality violated on level " + std::to_string(level);
            break;
        }
        if (!(rec.leb <= rec.energy_v0 + 1e-10 * (1.0 + std::abs(rec.energy_v0)))) {
            result.exit_code = 4;
            result.message = "lower energy bound exceeds E(v0) on level " + std::to_string(level);
            break;
        }
        if (config.levels > 0 && level + 1 >= config.levels) break;
        if (config.max_ndof > 0 && rec.ndof >= config.max_ndof) break;

        std::unique_ptr<Mesh> next;
        if (config.refine == RefineMode::Uniform) {
            next = std::make_unique<Mesh>(refine_uniform(*mesh));
        } else {
            const std::vector<int> marked = dorfler_mark(eta, config.theta);
            if (marked.empty()) break;
            next = std::make_unique<Mesh>(refine_bisect(*mesh, marked));
        }
        prev_u = std::move(sol.u);
        prev_disc = std::move(disc);
        prev_mesh = std::move(mesh);
        mesh = std::move(next);
    }
    result.final_mesh = *mesh;
    return result;
}

std::string csv_header(const RunConfig& config)
{
    std::ostringstream os;
    os.precision(17);
    os << "# problem=" << config.problem << '\n';
    os << "# k=" << config.k << '\n';
    os << "# r=" << config.r << '\n';
    os << "# s=" << config.s << '\n';
    os << "# refine=" << (config.refine == RefineMode::Uniform ? "uniform" : "adaptive") << '\n';
    os << "# theta=" << config.theta << '\n';
    os << "# levels=" << config.levels << '\n';
    os << "# max_ndof=" << config.max_ndof << '\n';
    os << "# mesh=" << (config.mesh_file.empty() ? "lshape" : config.mesh_file) << '\n';
    if (config.problem == "bingham") {
        os << "# mu=" << config.mu << "\n# g=" << config.g << "\n# eps=" << config.eps << "\n# f=" << config.f_value << '\n';
    } else if (config.problem == "odp") {
        os << "# mu1=" << config.mu1 << "\n# mu2=" << config.mu2 << "\n# lambda=" << config.lambda
           << "\n# f=" << config.f_value << '\n';
    } else {
        os << "# p=" << config.p << "\n# f=343/2048*r^(-11/8)*sin(7*phi/8)\n# u=r^(7/8)*sin(7*phi/8)\n";
    }
    os << "level,ndof,hmax,Eh,Ev0,Estar,LEB,gap,osc,newton_iters,wall_s";
    if (config.problem == "plaplace") os << ",errW1p,errFlux,errQuasi";
    os << '\n';
    return os.str();
}

std::string csv_row(const RunRecord& rec, bool with_errors)
{
    char buf[64];
    std::string row = std::to_string(rec.level) + "," + std::to_string(rec.ndof);
    auto add = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        row += buf;
    };
    add(rec.hmax);
    add(rec.energy_h);
    add(rec.energy_v0);
    add(rec.dual_energy);
    add(rec.leb);
    add(rec.gap);
    add(rec.osc);
    row += "," + std::to_string(rec.newton_iterations);
    add(rec.wall_seconds);
    if (with_errors) {
        const ExactErrors e = rec.errors.value_or(ExactErrors{});
        add(e.grad);
        add(e.flux);
        add(e.quasi);
    }
    return row + "\n";
}

void write_csv(const RunResult& result, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << csv_header(result.config);
    const bool errors = result.config.problem == "plaplace";
    for (const RunRecord& rec : result.records) out << csv_row(rec, errors);
}

void write_artifacts(const RunResult& result)
{
    const RunConfig& config = result.config;
    if (config.out_dir.empty()) return;
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    const std::string stem = config.problem + "_" + (config.refine == RefineMode::Uniform ? "uniform" : "adaptive") +
                             "_k" + std::to_string(config.k);
    write_csv(result, (fs::path(config.out_dir) / (stem + ".csv")).string());
    write_mesh(result.final_mesh, (fs::path(config.out_dir) / (stem + "_mesh.txt")).string());
    for (std::size_t level = 0; level < result.eta_levels.size(); ++level) {
        char name[64];
        std::snprintf(name, sizeof name, "%s_eta_level_%02zu.txt", stem.c_str(), level);
        std::ofstream out(fs::path(config.out_dir) / name);
        out.precision(17);
        for (double v : result.eta_levels[level]) out << v << '\n';
    }
}

} // namespace hhodual
