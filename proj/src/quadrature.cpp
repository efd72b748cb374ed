#include "hhodual/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hhodual {

namespace {

LineRule compute_gauss_legendre(int n)
{
    LineRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    rule.exactness = 2 * n - 1;
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n starting from the Chebyshev-like guess
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.points[n - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

TriangleRule compute_triangle_rule(int exactness)
{
    // collapsed Gauss-Legendre product: x = xi (1 - eta), y = eta
    const int nxi = (exactness + 2) / 2;
    const int neta = (exactness + 3) / 2;
    const LineRule& a = gauss_legendre(nxi);
    const LineRule& b = gauss_legendre(neta);
    TriangleRule rule;
    rule.exactness = exactness;
    for (int j = 0; j < neta; ++j) {
        for (int i = 0; i < nxi; ++i) {
            const double eta = b.points[j];
            rule.points.emplace_back(a.points[i] * (1.0 - eta), eta);
            rule.weights.push_back(a.weights[i] * b.weights[j] * (1.0 - eta));
        }
    }
    return rule;
}

void map_triangle(const TriangleRule& ref, const Point& a, const Point& b, const Point& c, QuadPoints& out)
{
    const Point e1 = b - a;
    const Point e2 = c - a;
    const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    for (std::size_t q = 0; q < ref.points.size(); ++q) {
        out.points.push_back(a + ref.points[q].x() * e1 + ref.points[q].y() * e2);
        out.weights.push_back(ref.weights[q] * jac);
    }
}

} // namespace

const LineRule& gauss_legendre(int npoints)
{
    if (npoints < 1 || npoints > kMaxLinePoints)
        throw std::out_of_range("Gauss-Legendre rule with " + std::to_string(npoints) +
                                " points not supported (1.." + std::to_string(kMaxLinePoints) + ")");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<LineRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[npoints];
    if (!slot) slot = std::make_unique<LineRule>(compute_gauss_legendre(npoints));
    return *slot;
}

const LineRule& line_rule(int exactness)
{
    if (exactness < 0) throw std::out_of_range("negative quadrature exactness");
    return gauss_legendre(exactness / 2 + 1);
}

const TriangleRule& triangle_rule(int exactness)
{
    if (exactness < 0) throw std::out_of_range("negative quadrature exactness");
    if (exactness > kMaxTriangleExactness)
        throw std::out_of_range("triangle quadrature of degree " + std::to_string(exactness) +
                                " requested; maximum supported is " + std::to_string(kMaxTriangleExactness));
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<TriangleRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[exactness];
    if (!slot) slot = std::make_unique<TriangleRule>(compute_triangle_rule(exactness));
    return *slot;
}

QuadPoints cell_quadrature(const Mesh& mesh, int c, int exactness)
{
    const auto& t = mesh.cell(c);
    QuadPoints out;
    map_triangle(triangle_rule(exactness), mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]), out);
    return out;
}

QuadPoints graded_cell_quadrature(const Mesh& mesh, int c, int exactness, const Point& singular, double ratio,
                                  int layers)
{
    const auto& t = mesh.cell(c);
    int corner = -1;
    for (int i = 0; i < 3; ++i) {
        if ((mesh.vertex(t[i]) - singular).norm() <= 1e-14 * mesh.diameter(c)) corner = i;
    }
    if (corner < 0) return cell_quadrature(mesh, c, exactness);
    const TriangleRule& ref = triangle_rule(exactness);
    const Point p = mesh.vertex(t[corner]);
    const Point a = mesh.vertex(t[(corner + 1) % 3]) - p;
    const Point b = mesh.vertex(t[(corner + 2) % 3]) - p;
    QuadPoints out;
    double outer = 1.0;
    for (int j = 0; j < layers; ++j) {
        const double inner = outer * ratio;
        map_triangle(ref, p + outer * a, p + outer * b, p + inner * b, out);
        map_triangle(ref, p + outer * a, p + inner * b, p + inner * a, out);
        outer = inner;
    }
    map_triangle(ref, p, p + outer * a, p + outer * b, out);
    return out;
}

QuadPoints face_quadrature(const Mesh& mesh, int f, int exactness)
{
    const Face& face = mesh.face(f);
    const LineRule& rule = line_rule(exactness);
    const Point a = mesh.vertex(face.vertices[0]);
    const Point b = mesh.vertex(face.vertices[1]);
    QuadPoints out;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        out.points.push_back(a + rule.points[q] * (b - a));
        out.weights.push_back(rule.weights[q] * face.length);
        out.params.push_back(rule.points[q]);
    }
    return out;
}

} // namespace hhodual
