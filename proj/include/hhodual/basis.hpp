#pragma once

#include <functional>

#include <Eigen/Core>

#include "hhodual/mesh.hpp"
#include "hhodual/quadrature.hpp"

namespace hhodual {

inline int dim_poly(int degree) { return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2; }

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

/// L2(K)-orthonormal basis of P_d(K), hierarchical by total degree: the first
/// dim_poly(j) functions span P_j(K) for every j <= d. phi_0 is constant.
class CellBasis
{
public:
    CellBasis() = default;
    CellBasis(const Mesh& mesh, int c, int degree);

    int degree() const { return degree_; }
    int dim() const { return dim_poly(degree_); }

    Eigen::VectorXd values(const Point& x) const;
    /// 2 x dim matrix of gradients.
    Eigen::Matrix2Xd gradients(const Point& x) const;

    double eval(const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Point& x) const;
    Point eval_gradient(const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Point& x) const;

private:
    Eigen::VectorXd monomials(const Point& x) const;
    Eigen::Matrix2Xd monomial_gradients(const Point& x) const;

    int degree_ = 0;
    Point center_ = Point::Zero();
    double scale_ = 1.0;
    Eigen::MatrixXd coeffs_;   // row i: phi_i in scaled monomials
};

/// L2(S)-orthonormal Legendre basis of P_k(S) in the face parameter t in [0,1]
/// (t = 0 at face.vertices[0]).
Eigen::VectorXd face_basis_values(int k, double t, double length);

/// Coefficients of Pi_K^d f in the basis (degree <= basis.degree()).
Eigen::VectorXd l2_project_cell(const Mesh& mesh, int c, const CellBasis& basis, const ScalarField& f, int degree,
                                int exactness);

/// Coefficients of Pi_K^d f for a vector field, stacked [x-block; y-block].
Eigen::VectorXd l2_project_cell_vector(const Mesh& mesh, int c, const CellBasis& basis, const VectorField& f,
                                       int degree, int exactness);

/// Coefficients of Pi_S^k f in the face basis.
Eigen::VectorXd l2_project_face(const Mesh& mesh, int f, const ScalarField& func, int k, int exactness);

} // namespace hhodual
