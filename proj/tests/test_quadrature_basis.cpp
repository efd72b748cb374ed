#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hhodual/basis.hpp"
#include "hhodual/quadrature.hpp"

using namespace hhodual;

namespace {

Mesh reference_triangle() { return Mesh::from_triangles({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}); }

// int_T x^a y^b over the reference triangle = a! b! / (a+b+2)!
double monomial_integral(int a, int b)
{
    return std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 3.0));
}

double integrate(const Mesh& m, int c, int ex, const ScalarField& f)
{
    const QuadPoints q = cell_quadrature(m, c, ex);
    double s = 0.0;
    for (int i = 0; i < q.size(); ++i) s += q.weights[i] * f(q.points[i]);
    return s;
}

} // namespace

TEST_CASE("Gauss-Legendre on [0,1]")
{
    for (int n = 0; n <= 40; ++n) {
        const LineRule& r = line_rule(n);
        double s = 0.0;
        for (std::size_t i = 0; i < r.points.size(); ++i) s += r.weights[i] * std::pow(r.points[i], n);
        CHECK(s == doctest::Approx(1.0 / (n + 1)).epsilon(1e-14));
    }
}

TEST_CASE("triangle rules integrate monomials exactly")
{
    CHECK(integrate(reference_triangle(), 0, 1, [](const Point&) { return 1.0; }) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(integrate(reference_triangle(), 0, 4, [](const Point& x) { return x.x() * x.x() * x.y() * x.y(); }) ==
          doctest::Approx(1.0 / 180.0).epsilon(1e-14));
    for (int ex : {0, 3, 7, 12, 25, 38, kMaxTriangleExactness}) {
        const TriangleRule& r = triangle_rule(ex);
        for (double w : r.weights) CHECK(w > 0.0);
        for (int a = 0; a <= ex; ++a) {
            for (int b = 0; a + b <= ex; ++b) {
                double s = 0.0;
                for (std::size_t i = 0; i < r.points.size(); ++i)
                    s += r.weights[i] * std::pow(r.points[i].x(), a) * std::pow(r.points[i].y(), b);
                CHECK(s == doctest::Approx(monomial_integral(a, b)).epsilon(1e-12));
            }
        }
    }
    CHECK_THROWS_AS(triangle_rule(kMaxTriangleExactness + 1), std::out_of_range);
}

TEST_CASE("graded rule resolves a corner singularity")
{
    const Mesh m = reference_triangle();
    const QuadPoints q = graded_cell_quadrature(m, 0, 20, Point(0, 0));
    double s = 0.0;
    for (int i = 0; i < q.size(); ++i) s += q.weights[i] / std::sqrt(q.points[i].norm());
    // polar coordinates: int_0^{pi/2} (2/3) (cos t + sin t)^{-3/2} dt by composite Simpson
    const int n = 20000;
    const double h = 0.5 * std::numbers::pi / n;
    double ref = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        ref += w * (2.0 / 3.0) * std::pow(std::cos(t) + std::sin(t), -1.5);
    }
    ref *= h / 3.0;
    CHECK(s == doctest::Approx(ref).epsilon(1e-11));
    // polynomials stay exact
    double p = 0.0;
    for (int i = 0; i < q.size(); ++i) p += q.weights[i] * std::pow(q.points[i].x(), 3) * q.points[i].y();
    CHECK(p == doctest::Approx(monomial_integral(3, 1)).epsilon(1e-13));
}

TEST_CASE("cell basis is orthonormal and hierarchical")
{
    const Mesh m = Mesh::from_triangles({{0.3, -0.2}, {2.0, 0.1}, {0.7, 1.4}}, {{0, 1, 2}});
    for (int d = 0; d <= 4; ++d) {
        const CellBasis b(m, 0, d);
        const QuadPoints q = cell_quadrature(m, 0, 2 * d);
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(b.dim(), b.dim());
        for (int i = 0; i < q.size(); ++i) {
            const Eigen::VectorXd v = b.values(q.points[i]);
            gram += q.weights[i] * v * v.transpose();
        }
        CHECK((gram - Eigen::MatrixXd::Identity(b.dim(), b.dim())).norm() < 1e-12);
        CHECK(b.values(m.centroid(0))[0] == doctest::Approx(1.0 / std::sqrt(m.area(0))));
        // gradients against finite differences
        const Point x(0.9, 0.4);
        const Eigen::Matrix2Xd g = b.gradients(x);
        const double t = 1e-6;
        const Eigen::VectorXd dx = (b.values(x + Point(t, 0)) - b.values(x - Point(t, 0))) / (2 * t);
        const Eigen::VectorXd dy = (b.values(x + Point(0, t)) - b.values(x - Point(0, t))) / (2 * t);
        CHECK((g.row(0).transpose() - dx).norm() < 1e-7);
        CHECK((g.row(1).transpose() - dy).norm() < 1e-7);
    }
}

TEST_CASE("cell L2 projection")
{
    const Mesh m = reference_triangle();
    SUBCASE("f = x onto constants gives the centroid value")
    {
        const CellBasis b(m, 0, 0);
        const Eigen::VectorXd c = l2_project_cell(m, 0, b, [](const Point& x) { return x.x(); }, 0, 2);
        CHECK(b.eval(c, Point(0.1, 0.7)) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }
    SUBCASE("polynomials are reproduced")
    {
        const auto f = [](const Point& x) { return 1.0 - 2.0 * x.x() + x.x() * x.y() - 3.0 * std::pow(x.y(), 3); };
        const CellBasis b(m, 0, 3);
        const Eigen::VectorXd c = l2_project_cell(m, 0, b, f, 3, 8);
        for (const Point& x : {Point(0.1, 0.2), Point(0.5, 0.4), Point(0.0, 1.0)}) CHECK(b.eval(c, x) == doctest::Approx(f(x)).epsilon(1e-12));
    }
    SUBCASE("best approximation in L2")
    {
        const auto f = [](const Point& x) { return std::sin(x.x()); };
        const auto taylor = [](const Point& x) { return x.x() - std::pow(x.x(), 3) / 6.0; };
        const CellBasis b(m, 0, 3);
        const Eigen::VectorXd c = l2_project_cell(m, 0, b, f, 3, 20);
        const double ep = integrate(m, 0, 20, [&](const Point& x) { return std::pow(f(x) - b.eval(c, x), 2); });
        const double eq = integrate(m, 0, 20, [&](const Point& x) { return std::pow(f(x) - taylor(x), 2); });
        CHECK(ep <= eq);
        CHECK(ep > 0.0);
    }
}

TEST_CASE("face basis and face projection")
{
    const Mesh m = Mesh::from_triangles({{0.2, 0.1}, {1.7, 0.4}, {0.5, 1.3}}, {{0, 1, 2}});
    for (int k = 0; k <= 3; ++k) {
        const QuadPoints q = face_quadrature(m, 0, 2 * k);
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k + 1, k + 1);
        for (int i = 0; i < q.size(); ++i) {
            const Eigen::VectorXd psi = face_basis_values(k, q.params[i], m.face(0).length);
            gram += q.weights[i] * psi * psi.transpose();
        }
        CHECK((gram - Eigen::MatrixXd::Identity(k + 1, k + 1)).norm() < 1e-13);
    }
    const Face& f = m.face(0);
    const Point a = m.vertex(f.vertices[0]), b = m.vertex(f.vertices[1]);
    auto value = [&](const Eigen::VectorXd& c, double t) { return face_basis_values(static_cast<int>(c.size()) - 1, t, f.length).dot(c); };

    CHECK(value(l2_project_face(m, 0, [](const Point&) { return 2.5; }, 0, 2), 0.3) == doctest::Approx(2.5));
    const auto linear = [&](const Point& x) { return 1.0 + 4.0 * (x - a).norm(); };
    const Eigen::VectorXd cl = l2_project_face(m, 0, linear, 1, 4);
    CHECK(value(cl, 0.8) == doctest::Approx(linear(a + 0.8 * (b - a))).epsilon(1e-13));
    // mean of x^2 along the segment
    const double mean = (a.x() * a.x() + a.x() * b.x() + b.x() * b.x()) / 3.0;
    CHECK(value(l2_project_face(m, 0, [](const Point& x) { return x.x() * x.x(); }, 0, 4), 0.5) ==
          doctest::Approx(mean).epsilon(1e-14));
}
