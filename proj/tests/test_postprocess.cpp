#include <doctest.h>

#include <cmath>
#include <random>

#include "hhodual/postprocess.hpp"
#include "hhodual/solver.hpp"

using namespace hhodual;

namespace {

Discretization make_disc(const Mesh& mesh, int k, double p = 2.0)
{
    HhoParams params;
    params.k = k;
    params.p = p;
    return Discretization(mesh, params);
}

Eigen::VectorXd random_vector(int n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = u(rng);
    return v;
}

// a few points inside cell c, in barycentric coordinates
std::vector<Point> sample_points(const Mesh& mesh, int c)
{
    const auto& t = mesh.cell(c);
    std::vector<Point> pts;
    for (const auto& l : {std::array<double, 3>{1.0 / 3, 1.0 / 3, 1.0 / 3}, {0.7, 0.2, 0.1}, {0.05, 0.15, 0.8}, {0.4, 0.55, 0.05}})
        pts.push_back(l[0] * mesh.vertex(t[0]) + l[1] * mesh.vertex(t[1]) + l[2] * mesh.vertex(t[2]));
    return pts;
}

} // namespace

TEST_CASE("RT reconstruction reproduces P_k vector fields")
{
    const Mesh mesh = refine_uniform(lshape_initial());
    for (int k = 0; k <= 2; ++k) {
        const Discretization d = make_disc(mesh, k);
        SUBCASE("constant")
        {
            const Point tau(0.7, -1.3);
            const RTField s = rt_reconstruct(d, d.interp_dual([&](const Point&) { return tau; }));
            for (int c = 0; c < mesh.num_cells(); ++c)
                for (const Point& x : sample_points(mesh, c)) CHECK((s.value(c, x) - tau).norm() < 1e-12);
        }
        SUBCASE("degree k")
        {
            const VectorField tau = [k](const Point& x) {
                return Point(1.0 + std::pow(x.x(), k) - 2.0 * std::pow(x.y(), k), std::pow(x.x() + x.y(), k) * 0.5);
            };
            const RTField s = rt_reconstruct(d, d.interp_dual(tau));
            for (int c = 0; c < mesh.num_cells(); ++c)
                for (const Point& x : sample_points(mesh, c)) CHECK((s.value(c, x) - tau(x)).norm() < 1e-11);
        }
    }
}

TEST_CASE("RT reconstruction is H(div) conforming")
{
    const Mesh mesh = refine_bisect(refine_uniform(lshape_initial()), {0, 5, 11});
    std::mt19937_64 rng(41);
    for (int k = 0; k <= 2; ++k) {
        const Discretization d = make_disc(mesh, k);
        const Eigen::VectorXd tau = random_vector(d.num_dual(), rng);
        const RTField s = rt_reconstruct(d, tau);
        double worst = 0.0;
        for (int f = 0; f < mesh.num_faces(); ++f) {
            const Face& face = mesh.face(f);
            if (face.is_boundary()) continue;
            const QuadPoints q = face_quadrature(mesh, f, 2 * k + 2);
            for (int i = 0; i < q.size(); ++i) {
                const double plus = s.value(face.cell_plus, q.points[i]).dot(face.normal);
                const double minus = s.value(face.cell_minus, q.points[i]).dot(face.normal);
                worst = std::max(worst, std::abs(plus - minus));
            }
        }
        CHECK(worst <= 1e-10 * (1.0 + tau.cwiseAbs().maxCoeff()));

        // face moments of the normal trace equal tau_S
        for (int f = 0; f < mesh.num_faces(); ++f) {
            const Face& face = mesh.face(f);
            const QuadPoints q = face_quadrature(mesh, f, 2 * k + 2);
            Eigen::VectorXd m = Eigen::VectorXd::Zero(d.nf());
            for (int i = 0; i < q.size(); ++i)
                m += q.weights[i] * face_basis_values(k, q.params[i], face.length) * s.value(face.cell_plus, q.points[i]).dot(face.normal);
            CHECK((m - tau.segment(d.dual_face_offset(f), d.nf())).norm() < 1e-11);
        }
    }
}

TEST_CASE("divergence of the RT field equals div_h")
{
    const Mesh mesh = refine_uniform(lshape_initial());
    std::mt19937_64 rng(42);
    for (int k = 0; k <= 2; ++k) {
        const Discretization d = make_disc(mesh, k);
        const Eigen::VectorXd tau = random_vector(d.num_dual(), rng);
        const RTField s = rt_reconstruct(d, tau);
        const Eigen::VectorXd div = d.divergence_reconstruction(tau);
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const auto coeffs = div.segment(c * d.nk(), d.nk());
            for (const Point& x : sample_points(mesh, c))
                CHECK(s.divergence(c, x) == doctest::Approx(d.ops(c).basis.eval(coeffs, x)).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("divergence constraint after a solve")
{
    const Mesh mesh = refine_uniform(lshape_initial());
    const auto density = make_plaplace(4.0);
    for (int k = 0; k <= 1; ++k) {
        const Discretization d = make_disc(mesh, k, 4.0);
        const Eigen::VectorXd fh = project_source(d, [](const Point& x) { return 1.0 + x.x() * x.y(); });
        const DiscreteEnergy e(d, *density, fh);
        Eigen::VectorXd u = Eigen::VectorXd::Zero(d.num_primal());
        REQUIRE(minimize(e, DofMap(d), u).converged);
        const RTField s = rt_reconstruct(d, dual_traces(e, u));
        double worst = 0.0;
        for (int c = 0; c < mesh.num_cells(); ++c)
            for (const Point& x : sample_points(mesh, c))
                worst = std::max(worst, std::abs(s.divergence(c, x) + d.ops(c).basis.eval(fh.segment(c * d.nk(), d.nk()), x)));
        CHECK(worst < 1e-7);
    }
}

TEST_CASE("Lagrange nodes")
{
    const Mesh mesh = refine_uniform(lshape_initial());
    for (int m = 1; m <= 4; ++m) {
        const LagrangeNodes n = lagrange_nodes(mesh, m);
        CHECK(n.num_nodes == mesh.num_vertices() + (m - 1) * mesh.num_faces() + (m - 1) * (m - 2) / 2 * mesh.num_cells());
        // shared nodes sit at the same place from every cell
        std::vector<Point> where(n.num_nodes, Point(NAN, NAN));
        for (int c = 0; c < mesh.num_cells(); ++c) {
            CHECK(static_cast<int>(n.cell_nodes[c].size()) == dim_poly(m));
            for (std::size_t i = 0; i < n.cell_nodes[c].size(); ++i) {
                const int id = n.cell_nodes[c][i];
                if (std::isnan(where[id].x())) where[id] = n.cell_points[c][i];
                else CHECK((where[id] - n.cell_points[c][i]).norm() < 1e-14);
            }
        }
    }
}

TEST_CASE("nodal average reproduces a hat function")
{
    const Mesh mesh = refine_uniform(refine_uniform(lshape_initial()));
    // an interior vertex
    std::vector<char> on_boundary(mesh.num_vertices(), 0);
    for (const Face& f : mesh.faces())
        if (f.is_boundary()) on_boundary[f.vertices[0]] = on_boundary[f.vertices[1]] = 1;
    int z = 0;
    while (on_boundary[z]) ++z;

    for (int k = 0; k <= 2; ++k) {
        const Discretization d = make_disc(mesh, k);
        Eigen::VectorXd u = Eigen::VectorXd::Zero(d.num_primal());
        std::vector<ScalarField> hat(mesh.num_cells());
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const auto& t = mesh.cell(c);
            int local = -1;
            for (int i = 0; i < 3; ++i)
                if (t[i] == z) local = i;
            if (local < 0) {
                hat[c] = [](const Point&) { return 0.0; };
                continue;
            }
            const Point a = mesh.vertex(t[(local + 1) % 3]), b = mesh.vertex(t[(local + 2) % 3]), p = mesh.vertex(z);
            const auto cross = [](const Point& u, const Point& v) { return u.x() * v.y() - u.y() * v.x(); };
            hat[c] = [=](const Point& x) { return cross(b - a, x - a) / cross(b - a, p - a); };
            u.segment(d.cell_offset(c), dim_poly(1)) = l2_project_cell(mesh, c, d.ops(c).basis, hat[c], 1, 4);
        }
        const ConformingField v0 = nodal_average(d, u, std::nullopt);
        for (int c = 0; c < mesh.num_cells(); ++c) {
            for (const Point& x : sample_points(mesh, c)) CHECK(v0.value(c, x) == doctest::Approx(hat[c](x)).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("nodal average of two constants across a Neumann square")
{
    const std::map<EdgeKey, FaceLabel> labels = {{edge_key(0, 1), FaceLabel::Neumann}, {edge_key(1, 3), FaceLabel::Neumann},
                                                 {edge_key(3, 2), FaceLabel::Neumann}, {edge_key(2, 0), FaceLabel::Neumann}};
    const Mesh mesh = Mesh::from_triangles({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {{0, 1, 2}, {1, 3, 2}}, labels);
    const Discretization d = make_disc(mesh, 0);
    const double a = 2.0, b = -1.0;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(d.num_primal());
    u[d.cell_offset(0)] = a * std::sqrt(mesh.area(0));
    u[d.cell_offset(1)] = b * std::sqrt(mesh.area(1));
    const ConformingField v0 = nodal_average(d, u, std::nullopt);
    CHECK(v0.value(0, Point(0, 0)) == doctest::Approx(a));
    CHECK(v0.value(1, Point(1, 1)) == doctest::Approx(b));
    for (int c = 0; c < 2; ++c) {
        CHECK(v0.value(c, Point(1, 0)) == doctest::Approx(0.5 * (a + b)));
        CHECK(v0.value(c, Point(0, 1)) == doctest::Approx(0.5 * (a + b)));
    }
}

TEST_CASE("nodal average with boundary data")
{
    const Mesh mesh = refine_uniform(lshape_initial());
    const Problem pb = plaplace_problem(4.0);
    REQUIRE(pb.exact);
    std::mt19937_64 rng(43);
    for (int k = 0; k <= 1; ++k) {
        const Discretization d = make_disc(mesh, k, 4.0);
        const Eigen::VectorXd u = random_vector(d.num_primal(), rng);
        const ConformingField v0 = nodal_average(d, u, pb.exact);
        for (int f = 0; f < mesh.num_faces(); ++f) {
            const Face& face = mesh.face(f);
            if (face.label != FaceLabel::Dirichlet) continue;
            const Point p0 = mesh.vertex(face.vertices[0]), p1 = mesh.vertex(face.vertices[1]);
            for (const Point& x : {p0, p1, Point(0.5 * (p0 + p1))}) {
                CHECK(v0.value(face.cell_plus, x) == doctest::Approx(pb.exact->u(x)).epsilon(1e-12).scale(1.0));
            }
        }
    }
}
