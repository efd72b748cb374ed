#include "hhodual/basis.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace hhodual {

CellBasis::CellBasis(const Mesh& mesh, int c, int degree)
    : degree_(degree), center_(mesh.centroid(c)), scale_(mesh.diameter(c))
{
    const int n = dim();
    const QuadPoints q = cell_quadrature(mesh, c, 2 * degree);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < q.size(); ++i) {
        const Eigen::VectorXd m = monomials(q.points[i]);
        gram.noalias() += q.weights[i] * m * m.transpose();
    }
    // Gram-Schmidt in degree order via Cholesky, repeated once to clean up roundoff
    coeffs_ = Eigen::MatrixXd::Identity(n, n);
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::MatrixXd g = coeffs_ * gram * coeffs_.transpose();
        Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (g + g.transpose()));
        const Eigen::MatrixXd l = llt.matrixL();
        coeffs_ = l.triangularView<Eigen::Lower>().solve(coeffs_);
    }
}

Eigen::VectorXd CellBasis::monomials(const Point& x) const
{
    const Point z = (x - center_) / scale_;
    Eigen::VectorXd m(dim());
    int idx = 0;
    for (int deg = 0; deg <= degree_; ++deg) {
        for (int j = 0; j <= deg; ++j) m[idx++] = std::pow(z.x(), deg - j) * std::pow(z.y(), j);
    }
    return m;
}

Eigen::Matrix2Xd CellBasis::monomial_gradients(const Point& x) const
{
    const Point z = (x - center_) / scale_;
    Eigen::Matrix2Xd g(2, dim());
    int idx = 0;
    for (int deg = 0; deg <= degree_; ++deg) {
        for (int j = 0; j <= deg; ++j) {
            const int a = deg - j;
            g(0, idx) = a == 0 ? 0.0 : a * std::pow(z.x(), a - 1) * std::pow(z.y(), j) / scale_;
            g(1, idx) = j == 0 ? 0.0 : j * std::pow(z.x(), a) * std::pow(z.y(), j - 1) / scale_;
            ++idx;
        }
    }
    return g;
}

Eigen::VectorXd CellBasis::values(const Point& x) const { return coeffs_ * monomials(x); }

Eigen::Matrix2Xd CellBasis::gradients(const Point& x) const { return monomial_gradients(x) * coeffs_.transpose(); }

double CellBasis::eval(const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Point& x) const
{
    return values(x).head(coeffs.size()).dot(coeffs);
}

Point CellBasis::eval_gradient(const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Point& x) const
{
    return gradients(x).leftCols(coeffs.size()) * coeffs;
}

Eigen::VectorXd face_basis_values(int k, double t, double length)
{
    Eigen::VectorXd v(k + 1);
    const double s = 2.0 * t - 1.0;
    double p0 = 1.0, p1 = s;
    for (int j = 0; j <= k; ++j) {
        double pj;
        if (j == 0) {
            pj = 1.0;
        } else if (j == 1) {
            pj = s;
        } else {
            pj = ((2 * j - 1) * s * p1 - (j - 1) * p0) / j;
            p0 = p1;
            p1 = pj;
        }
        v[j] = std::sqrt((2 * j + 1) / length) * pj;
    }
    return v;
}

Eigen::VectorXd l2_project_cell(const Mesh& mesh, int c, const CellBasis& basis, const ScalarField& f, int degree,
                                int exactness)
{
    const QuadPoints q = cell_quadrature(mesh, c, exactness);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_poly(degree));
    for (int i = 0; i < q.size(); ++i)
        out.noalias() += q.weights[i] * f(q.points[i]) * basis.values(q.points[i]).head(out.size());
    return out;
}

Eigen::VectorXd l2_project_cell_vector(const Mesh& mesh, int c, const CellBasis& basis, const VectorField& f,
                                       int degree, int exactness)
{
    const QuadPoints q = cell_quadrature(mesh, c, exactness);
    const int n = dim_poly(degree);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * n);
    for (int i = 0; i < q.size(); ++i) {
        const Eigen::VectorXd phi = basis.values(q.points[i]).head(n);
        const Point v = f(q.points[i]);
        out.head(n).noalias() += q.weights[i] * v.x() * phi;
        out.tail(n).noalias() += q.weights[i] * v.y() * phi;
    }
    return out;
}

Eigen::VectorXd l2_project_face(const Mesh& mesh, int f, const ScalarField& func, int k, int exactness)
{
    const QuadPoints q = face_quadrature(mesh, f, exactness);
    const double len = mesh.face(f).length;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(k + 1);
    for (int i = 0; i < q.size(); ++i)
        out.noalias() += q.weights[i] * func(q.points[i]) * face_basis_values(k, q.params[i], len);
    return out;
}

} // namespace hhodual
