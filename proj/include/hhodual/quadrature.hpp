#pragma once

#include <vector>

#include "hhodual/mesh.hpp"

namespace hhodual {

/// Gauss-Legendre rule on [0,1] (weights sum to 1).
struct LineRule
{
    std::vector<double> points;
    std::vector<double> weights;
    int exactness = 0;
};

/// Rule on the reference triangle (0,0),(1,0),(0,1) (weights sum to 1/2).
struct TriangleRule
{
    std::vector<Point> points;
    std::vector<double> weights;
    int exactness = 0;
};

/// Quadrature points and weights in physical coordinates.
struct QuadPoints
{
    std::vector<Point> points;
    std::vector<double> weights;
    std::vector<double> params;   // arc-length parameter in [0,1] for face rules, empty otherwise

    int size() const { return static_cast<int>(points.size()); }
};

inline constexpr int kMaxTriangleExactness = 50;
inline constexpr int kMaxLinePoints = 64;

/// Geometric grading used near point singularities: each layer spans [ratio rho, rho].
inline constexpr double kGradedRatio = 0.5;
inline constexpr int kGradedLayers = 50;

const LineRule& gauss_legendre(int npoints);
const LineRule& line_rule(int exactness);

/// Positive-weight rule exact for total degree `exactness`; throws
/// std::out_of_range above kMaxTriangleExactness.
const TriangleRule& triangle_rule(int exactness);

QuadPoints cell_quadrature(const Mesh& mesh, int c, int exactness);

/// Composite rule geometrically graded towards `singular` (a vertex of cell c).
/// Used for integrands with a point singularity at a corner.
QuadPoints graded_cell_quadrature(const Mesh& mesh, int c, int exactness, const Point& singular,
                                  double ratio = kGradedRatio, int layers = kGradedLayers);

/// Points run from face.vertices[0] to face.vertices[1].
QuadPoints face_quadrature(const Mesh& mesh, int f, int exactness);

} // namespace hhodual
