#include "hhodual/hhodual.h"

#include <charconv>
#include <exception>
#include <string>

#include "hhodual/runner.hpp"

struct hho_mesh
{
    hhodual::Mesh mesh;
};

struct hho_config
{
    hhodual::RunConfig config;
};

struct hho_run
{
    hhodual::RunResult result;
};

namespace {

thread_local std::string last_error;

int fail(int code, const std::string& message)
{
    last_error = message;
    return code;
}

template <class F>
int guarded(F&& body)
{
    try {
        return body();
    } catch (const hhodual::UsageError& e) {
        return fail(HHO_USAGE_ERROR, e.what());
    } catch (const hhodual::EstimatorError& e) {
        return fail(HHO_INVARIANT_ERROR, e.what());
    } catch (const std::exception& e) {
        return fail(HHO_ERROR, e.what());
    } catch (...) {
        return fail(HHO_ERROR, "unknown error");
    }
}

double parse_double(const std::string& key, const std::string& value)
{
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw hhodual::UsageError("invalid number '" + value + "' for " + key);
}

int parse_int(const std::string& key, const std::string& value)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw hhodual::UsageError("invalid integer '" + value + "' for " + key);
    return v;
}

} // namespace

extern "C" {

const char* hho_last_error_message(void) { return last_error.c_str(); }

int hho_mesh_lshape(hho_mesh** out)
{
    return guarded([&]() -> int {
        if (!out) return fail(HHO_USAGE_ERROR, "null output pointer");
        *out = new hho_mesh{hhodual::lshape_initial()};
        return HHO_OK;
    });
}

int hho_mesh_read(const char* path, hho_mesh** out)
{
    return guarded([&]() -> int {
        if (!path || !out) return fail(HHO_USAGE_ERROR, "null argument");
        *out = new hho_mesh{hhodual::read_mesh(path)};
        return HHO_OK;
    });
}

int hho_mesh_write(const hho_mesh* mesh, const char* path)
{
    return guarded([&]() -> int {
        if (!mesh || !path) return fail(HHO_USAGE_ERROR, "null argument");
        hhodual::write_mesh(mesh->mesh, path);
        return HHO_OK;
    });
}

int hho_mesh_refine_uniform(const hho_mesh* mesh, hho_mesh** out)
{
    return guarded([&]() -> int {
        if (!mesh || !out) return fail(HHO_USAGE_ERROR, "null argument");
        *out = new hho_mesh{hhodual::refine_uniform(mesh->mesh)};
        return HHO_OK;
    });
}

int hho_mesh_num_cells(const hho_mesh* mesh, int* out)
{
    if (!mesh || !out) return fail(HHO_USAGE_ERROR, "null argument");
    *out = mesh->mesh.num_cells();
    return HHO_OK;
}

int hho_mesh_num_vertices(const hho_mesh* mesh, int* out)
{
    if (!mesh || !out) return fail(HHO_USAGE_ERROR, "null argument");
    *out = mesh->mesh.num_vertices();
    return HHO_OK;
}

void hho_mesh_destroy(hho_mesh* mesh) { delete mesh; }

int hho_config_create(hho_config** out)
{
    return guarded([&]() -> int {
        if (!out) return fail(HHO_USAGE_ERROR, "null output pointer");
        *out = new hho_config{};
        return HHO_OK;
    });
}

int hho_config_set(hho_config* config, const char* key_c, const char* value_c)
{
    return guarded([&]() -> int {
        if (!config || !key_c || !value_c) return fail(HHO_USAGE_ERROR, "null argument");
        const std::string key = key_c;
        const std::string value = value_c;
        hhodual::RunConfig& c = config->config;
        if (key == "problem") c.problem = value;
        else if (key == "k") c.k = parse_int(key, value);
        else if (key == "r") c.r = parse_double(key, value);
        else if (key == "s") c.s = parse_double(key, value);
        else if (key == "eps") {
            c.eps = parse_double(key, value);
            c.eps_set = true;
        } else if (key == "p") {
            c.p = parse_double(key, value);
            c.p_set = true;
        } else if (key == "theta") c.theta = parse_double(key, value);
        else if (key == "refine") {
            if (value == "uniform") c.refine = hhodual::RefineMode::Uniform;
            else if (value == "adaptive") c.refine = hhodual::RefineMode::Adaptive;
            else return fail(HHO_USAGE_ERROR, "refine must be 'uniform' or 'adaptive'");
        } else if (key == "levels") c.levels = parse_int(key, value);
        else if (key == "max_ndof") c.max_ndof = parse_int(key, value);
        else if (key == "out") c.out_dir = value;
        else if (key == "mesh") c.mesh_file = value;
        else if (key == "f_const") c.f_const = parse_double(key, value);
        else return fail(HHO_USAGE_ERROR, "unknown configuration key '" + key + "'");
        return HHO_OK;
    });
}

int hho_config_validate(const hho_config* config)
{
    return guarded([&]() -> int {
        if (!config) return fail(HHO_USAGE_ERROR, "null config");
        hhodual::validate(config->config);
        return HHO_OK;
    });
}

void hho_config_destroy(hho_config* config) { delete config; }

int hho_run_execute(const hho_config* config, hho_run** out)
{
    return guarded([&]() -> int {
        if (!config || !out) return fail(HHO_USAGE_ERROR, "null argument");
        *out = nullptr;
        auto* run = new hho_run{hhodual::run(config->config)};
        *out = run;
        if (run->result.exit_code != 0) return fail(run->result.exit_code, run->result.message);
        return HHO_OK;
    });
}

int hho_run_status(const hho_run* run, int* status, const char** message)
{
    if (!run) return fail(HHO_USAGE_ERROR, "null run");
    if (status) *status = run->result.exit_code;
    if (message) *message = run->result.message.c_str();
    return HHO_OK;
}

int hho_run_num_records(const hho_run* run, int* out)
{
    if (!run || !out) return fail(HHO_USAGE_ERROR, "null argument");
    *out = static_cast<int>(run->result.records.size());
    return HHO_OK;
}

int hho_run_record(const hho_run* run, int index, hho_record* out)
{
    if (!run || !out) return fail(HHO_USAGE_ERROR, "null argument");
    if (index < 0 || index >= static_cast<int>(run->result.records.size()))
        return fail(HHO_USAGE_ERROR, "record index out of range");
    const hhodual::RunRecord& r = run->result.records[index];
    *out = hho_record{};
    out->level = r.level;
    out->ndof = r.ndof;
    out->cells = r.cells;
    out->hmax = r.hmax;
    out->energy_h = r.energy_h;
    out->energy_v0 = r.energy_v0;
    out->dual_energy = r.dual_energy;
    out->leb = r.leb;
    out->gap = r.gap;
    out->osc = r.osc;
    out->newton_iterations = r.newton_iterations;
    out->wall_seconds = r.wall_seconds;
    if (r.errors) {
        out->has_errors = 1;
        out->err_grad = r.errors->grad;
        out->err_flux = r.errors->flux;
        out->err_quasi = r.errors->quasi;
        out->energy_u = r.errors->energy_u;
    }
    out->osc_p2 = r.osc_p2;
    out->eta_sum = r.eta_sum;
    out->el_residual = r.el_residual;
    out->el_scale = r.el_scale;
    out->div_residual = r.div_residual;
    out->discrete_dual_energy = r.discrete_dual_energy;
    return HHO_OK;
}

int hho_run_write_csv(const hho_run* run, const char* path)
{
    return guarded([&]() -> int {
        if (!run || !path) return fail(HHO_USAGE_ERROR, "null argument");
        hhodual::write_csv(run->result, path);
        return HHO_OK;
    });
}

int hho_run_write_artifacts(const hho_run* run)
{
    return guarded([&]() -> int {
        if (!run) return fail(HHO_USAGE_ERROR, "null run");
        hhodual::write_artifacts(run->result);
        return HHO_OK;
    });
}

int hho_run_final_mesh(const hho_run* run, hho_mesh** out)
{
    return guarded([&]() -> int {
        if (!run || !out) return fail(HHO_USAGE_ERROR, "null argument");
        *out = new hho_mesh{run->result.final_mesh};
        return HHO_OK;
    });
}

void hho_run_destroy(hho_run* run) { delete run; }

} // extern "C"
