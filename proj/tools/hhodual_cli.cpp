#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hhodual/hhodual.h"

namespace {

struct Handles
{
    hho_config* config = nullptr;
    hho_run* run = nullptr;
    ~Handles()
    {
        hho_run_destroy(run);
        hho_config_destroy(config);
    }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"HHO discretization of convex minimization problems with guaranteed lower energy bounds"};
    std::string problem;
    std::string refine = "adaptive";
    std::optional<int> k, levels, max_ndof;
    std::optional<double> r, s, eps, p, theta, f_const;
    std::string out_dir, mesh;

    app.add_option("--problem", problem, "odp, bingham or plaplace")->required();
    app.add_option("--k", k, "polynomial degree (0..3, default 1)");
    app.add_option("--r", r, "stabilization exponent (> 1, default 2)");
    app.add_option("--s", s, "stabilization power of h_S (default 1)");
    app.add_option("--eps", eps, "Bingham regularization (default 1e-4)");
    app.add_option("--p", p, "p-Laplace exponent (only 4 is supported)");
    app.add_option("--theta", theta, "Dorfler bulk parameter in (0,1] (default 0.5)");
    app.add_option("--refine", refine, "uniform or adaptive")->check(CLI::IsMember({"uniform", "adaptive"}));
    app.add_option("--levels", levels, "number of refinement levels");
    app.add_option("--max-ndof", max_ndof, "stop once ndof reaches this value");
    app.add_option("--out", out_dir, "output directory for CSV, mesh and indicators");
    app.add_option("--mesh", mesh, "initial mesh file (default: built-in L-shape)");
    app.add_option("--f-const", f_const, "constant source for odp (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Handles h;
    if (hho_config_create(&h.config) != HHO_OK) {
        std::fprintf(stderr, "error: %s\n", hho_last_error_message());
        return 1;
    }
    std::vector<std::pair<std::string, std::string>> settings = {{"problem", problem}, {"refine", refine}};
    auto put = [&](const char* key, const auto& value) {
        if (value) settings.emplace_back(key, std::to_string(*value));
    };
    auto put_double = [&](const char* key, const std::optional<double>& value) {
        if (!value) return;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", *value);
        settings.emplace_back(key, buf);
    };
    put("k", k);
    put("levels", levels);
    put("max_ndof", max_ndof);
    put_double("r", r);
    put_double("s", s);
    put_double("eps", eps);
    put_double("p", p);
    put_double("theta", theta);
    put_double("f_const", f_const);
    if (!out_dir.empty()) settings.emplace_back("out", out_dir);
    if (!mesh.empty()) settings.emplace_back("mesh", mesh);

    for (const auto& [key, value] : settings) {
        if (hho_config_set(h.config, key.c_str(), value.c_str()) != HHO_OK) {
            std::fprintf(stderr, "error: %s\n", hho_last_error_message());
            return 2;
        }
    }
    if (hho_config_validate(h.config) != HHO_OK) {
        std::fprintf(stderr, "error: %s\n", hho_last_error_message());
        return 2;
    }

    const int status = hho_run_execute(h.config, &h.run);
    if (!h.run) {
        std::fprintf(stderr, "error: %s\n", hho_last_error_message());
        return status;
    }

    int n = 0;
    hho_run_num_records(h.run, &n);
    std::printf("%5s %8s %10s %16s %16s %16s %12s %6s\n", "level", "ndof", "hmax", "E_h", "E*", "LEB", "gap",
                "newton");
    for (int i = 0; i < n; ++i) {
        hho_record rec;
        hho_run_record(h.run, i, &rec);
        std::printf("%5d %8d %10.3e %16.10f %16.10f %16.10f %12.4e %6d\n", rec.level, rec.ndof, rec.hmax,
                    rec.energy_h, rec.dual_energy, rec.leb, rec.gap, rec.newton_iterations);
    }
    if (!out_dir.empty() && hho_run_write_artifacts(h.run) != HHO_OK) {
        std::fprintf(stderr, "error: %s\n", hho_last_error_message());
        return 1;
    }
    if (status != HHO_OK) {
        const char* message = nullptr;
        hho_run_status(h.run, nullptr, &message);
        std::fprintf(stderr, "error: %s\n", message);
    }
    return status;
}
