#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hhodual/adaptivity.hpp"
#include "hhodual/mesh.hpp"
#include "hhodual/solver.hpp"

namespace hhodual {

enum class RefineMode { Uniform, Adaptive };

struct RunConfig
{
    std::string problem = "bingham";
    int k = 1;
    double r = 2.0;
    double s = 1.0;
    double eps = 1e-4;          // bingham only
    double p = 4.0;             // plaplace only
    double theta = 0.5;
    RefineMode refine = RefineMode::Adaptive;
    int levels = 0;             // 0: unlimited (bounded by max_ndof)
    int max_ndof = 0;           // 0: unlimited (bounded by levels)
    std::string out_dir;        // empty: no artifacts
    std::string mesh_file;      // empty: L-shape
    std::optional<double> f_const;

    // problem parameters, filled by validate()
    double mu = 1.0, g = 0.2;
    double mu1 = 1.0, mu2 = 2.0, lambda = 0.0084;
    double f_value = 0.0;

    bool eps_set = false;
    bool p_set = false;
};

class UsageError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Applies defaults and rejects invalid combinations (throws UsageError).
RunConfig validate(RunConfig config);

struct RunRecord
{
    int level = 0;
    int ndof = 0;
    int cells = 0;
    double hmax = 0.0;
    double energy_h = 0.0;
    double energy_v0 = 0.0;
    double dual_energy = 0.0;
    double leb = 0.0;
    double gap = 0.0;
    double osc = 0.0;
    int newton_iterations = 0;
    double wall_seconds = 0.0;
    std::optional<ExactErrors> errors;

    // diagnostics not written to the CSV
    double osc_p2 = 0.0;
    double eta_sum = 0.0;
    double energy_sigma_v0 = 0.0;
    double el_residual = 0.0;
    double el_scale = 1.0;
    double div_residual = 0.0;
    double fh_norm = 0.0;
    double discrete_dual_energy = 0.0;
    double min_eta_raw = 0.0;
    bool converged = true;
};

struct RunResult
{
    RunConfig config;
    std::vector<RunRecord> records;
    Mesh final_mesh;
    std::vector<std::vector<double>> eta_levels;
    int exit_code = 0;   // 0 ok, 3 nonconvergence, 4 invariant violation
    std::string message;
};

/// Called after every level; useful for progress output.
using LevelCallback = std::function<void(const RunRecord&)>;

RunResult run(const RunConfig& config, const LevelCallback& callback = {});

std::string csv_header(const RunConfig& config);
std::string csv_row(const RunRecord& record, bool with_errors);
void write_csv(const RunResult& result, const std::string& path);
/// CSV, final mesh and per-level eta files into config.out_dir.
void write_artifacts(const RunResult& result);

Problem make_problem(const RunConfig& config);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace hhodual
