#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "hhodual/runner.hpp"

using namespace hhodual;

namespace {

RunConfig small(const std::string& problem, RefineMode mode, int levels)
{
    RunConfig c;
    c.problem = problem;
    c.k = problem == "odp" ? 0 : 1;
    c.refine = mode;
    c.levels = levels;
    return validate(c);
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("hhodual_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("validation defaults")
{
    RunConfig c;
    c.problem = "bingham";
    c.refine = RefineMode::Adaptive;
    RunConfig v = validate(c);
    CHECK(v.max_ndof == 20000);
    CHECK(v.levels == 0);
    CHECK(v.f_value == 10.0);

    c.refine = RefineMode::Uniform;
    v = validate(c);
    CHECK(v.levels == 4);
    CHECK(v.max_ndof == 0);

    c.problem = "odp";
    CHECK(validate(c).f_value == 1.0);
    c.f_const = 2.5;
    CHECK(validate(c).f_value == 2.5);
}

TEST_CASE("validation rejects bad combinations")
{
    auto rejects = [](auto edit) {
        RunConfig c;
        edit(c);
        CHECK_THROWS_AS(validate(c), UsageError);
    };
    rejects([](RunConfig& c) { c.problem = "stokes"; });
    rejects([](RunConfig& c) { c.k = 4; });
    rejects([](RunConfig& c) { c.k = -1; });
    rejects([](RunConfig& c) { c.r = 1.0; });
    rejects([](RunConfig& c) { c.theta = 0.0; });
    rejects([](RunConfig& c) { c.theta = 1.2; });
    rejects([](RunConfig& c) { c.eps = 0.0; });
    rejects([](RunConfig& c) { c.problem = "odp"; c.eps_set = true; });
    rejects([](RunConfig& c) { c.problem = "bingham"; c.p_set = true; });
    rejects([](RunConfig& c) { c.problem = "bingham"; c.f_const = 1.0; });
    rejects([](RunConfig& c) { c.problem = "plaplace"; c.p = 3.0; c.p_set = true; });
    rejects([](RunConfig& c) { c.problem = "plaplace"; c.mesh_file = "m.txt"; });
    rejects([](RunConfig& c) { c.levels = -2; });
}

TEST_CASE("CSV layout")
{
    RunConfig c = small("plaplace", RefineMode::Uniform, 2);
    const std::string header = csv_header(c);
    std::stringstream ss(header);
    std::string line, last;
    int comments = 0;
    while (std::getline(ss, line)) {
        if (line.rfind("# ", 0) == 0) {
            ++comments;
            CHECK(line.find('=') != std::string::npos);
        }
        last = line;
    }
    CHECK(comments >= 9);
    CHECK(last == "level,ndof,hmax,Eh,Ev0,Estar,LEB,gap,osc,newton_iters,wall_s,errW1p,errFlux,errQuasi");
    CHECK(csv_header(small("odp", RefineMode::Uniform, 2)).find("errW1p") == std::string::npos);

    RunRecord r;
    r.level = 3;
    r.ndof = 1234;
    r.hmax = 0.1;
    r.energy_h = -1.0 / 3.0;
    r.gap = 1e-300;
    r.newton_iterations = 7;
    r.errors = ExactErrors{0.5, 0.25, 2.0 / 3.0, 0.0};
    const std::string row = csv_row(r, true);
    CHECK(row.back() == '\n');
    const auto cols = split(row.substr(0, row.size() - 1));
    REQUIRE(cols.size() == 14);
    CHECK(cols[0] == "3");
    CHECK(cols[1] == "1234");
    CHECK(cols[9] == "7");
    CHECK(std::strtod(cols[2].c_str(), nullptr) == r.hmax);
    CHECK(std::strtod(cols[3].c_str(), nullptr) == r.energy_h);
    CHECK(std::strtod(cols[7].c_str(), nullptr) == r.gap);
    CHECK(std::strtod(cols[13].c_str(), nullptr) == 2.0 / 3.0);
    CHECK(split(csv_row(r, false)).size() == 11);
}

TEST_CASE("runs are deterministic apart from timings")
{
    const RunConfig c = small("bingham", RefineMode::Adaptive, 3);
    const RunResult a = run(c), b = run(c);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        RunRecord x = a.records[i], y = b.records[i];
        x.wall_seconds = y.wall_seconds = 0.0;
        CHECK(csv_row(x, false) == csv_row(y, false));
        CHECK(a.eta_levels[i] == b.eta_levels[i]);
    }
}

TEST_CASE("level records are consistent")
{
    for (const char* problem : {"odp", "bingham", "plaplace"}) {
        const RunResult r = run(small(problem, RefineMode::Adaptive, 4));
        CAPTURE(problem);
        REQUIRE(r.exit_code == 0);
        REQUIRE(r.records.size() == 4);
        for (std::size_t i = 0; i < r.records.size(); ++i) {
            const RunRecord& rec = r.records[i];
            CHECK(rec.level == static_cast<int>(i));
            CHECK(rec.gap >= 0.0);
            CHECK(rec.dual_energy <= rec.energy_v0);
            CHECK(rec.leb <= rec.dual_energy);
            CHECK(std::abs(rec.gap - rec.eta_sum) <= 1e-10 * (1.0 + std::abs(rec.energy_v0)));
            CHECK(r.eta_levels[i].size() == static_cast<std::size_t>(rec.cells));
            if (i > 0) CHECK(rec.ndof > r.records[i - 1].ndof);
        }
        CHECK(r.records.back().errors.has_value() == (std::string(problem) == "plaplace"));
    }
}

TEST_CASE("max_ndof stops the loop")
{
    RunConfig c;
    c.problem = "odp";
    c.k = 0;
    c.max_ndof = 400;
    const RunResult r = run(validate(c));
    REQUIRE(r.exit_code == 0);
    CHECK(r.records.back().ndof >= 400);
    for (std::size_t i = 0; i + 1 < r.records.size(); ++i) CHECK(r.records[i].ndof < 400);
}

TEST_CASE("artifacts")
{
    const auto dir = scratch_dir("artifacts");
    RunConfig c = small("odp", RefineMode::Adaptive, 3);
    c.out_dir = dir.string();
    const RunResult r = run(c);
    write_artifacts(r);
    const auto csv = dir / "odp_adaptive_k0.csv";
    REQUIRE(std::filesystem::exists(csv));
    std::ifstream in(csv);
    std::string line;
    int data = 0;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#' && line[0] != 'l') ++data;
    CHECK(data == 3);
    for (int level = 0; level < 3; ++level)
        CHECK(std::filesystem::exists(dir / ("odp_adaptive_k0_eta_level_0" + std::to_string(level) + ".txt")));
    const Mesh m = read_mesh((dir / "odp_adaptive_k0_mesh.txt").string());
    CHECK(m.num_cells() == r.final_mesh.num_cells());
    CHECK(m.total_area() == doctest::Approx(3.0).epsilon(1e-14));
    std::filesystem::remove_all(dir);
}

TEST_CASE("user mesh input")
{
    const auto dir = scratch_dir("mesh");
    std::filesystem::create_directories(dir);
    const auto path = dir / "square.txt";
    write_mesh(Mesh::from_triangles({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {{0, 1, 2}, {1, 3, 2}}), path.string());
    RunConfig c = small("odp", RefineMode::Uniform, 2);
    c.mesh_file = path.string();
    const RunResult r = run(c);
    REQUIRE(r.exit_code == 0);
    CHECK(r.records[0].cells == 2);
    CHECK(r.records[1].cells == 8);
    std::filesystem::remove_all(dir);
}

TEST_CASE("log-log slope")
{
    const std::vector<double> x = {10, 40, 160, 640};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -0.75));
    CHECK(loglog_slope(x, y) == doctest::Approx(-0.75).epsilon(1e-13));
    CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), std::invalid_argument);
}
