#include "hhodual/energy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hhodual {

namespace {

double polar_angle(const Point& x)
{
    double phi = std::atan2(x.y(), x.x());
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    return phi;
}

} // namespace

Problem plaplace_problem(double p)
{
    if (p != 4.0) throw std::invalid_argument("the L-shape p-Laplace benchmark is defined for p = 4 only");
    Problem pr;
    pr.name = "plaplace";
    pr.density = make_plaplace(p);
    pr.singular_point = Point::Zero();
    // u = r^{7/8} sin(7 phi/8) solves -div(|grad u|^2 grad u) = f with
    // f = (343/2048) r^{-11/8} sin(7 phi/8)
    pr.f = [](const Point& x) {
        const double r = x.norm();
        if (r == 0.0) return 0.0;
        return 343.0 / 2048.0 * std::pow(r, -11.0 / 8.0) * std::sin(7.0 * polar_angle(x) / 8.0);
    };
    ExactSolution ex;
    ex.u = [](const Point& x) {
        const double r = x.norm();
        if (r == 0.0) return 0.0;
        return std::pow(r, 7.0 / 8.0) * std::sin(7.0 * polar_angle(x) / 8.0);
    };
    ex.grad_u = [](const Point& x) -> Point {
        const double r = x.norm();
        if (r == 0.0) return Point::Zero();
        const double phi = polar_angle(x);
        const double m = 7.0 / 8.0 * std::pow(r, -1.0 / 8.0);
        return {-m * std::sin(phi / 8.0), m * std::cos(phi / 8.0)};
    };
    ex.flux = [g = ex.grad_u](const Point& x) -> Point {
        const Point d = g(x);
        return d.squaredNorm() * d;
    };
    pr.exact = ex;
    return pr;
}

Problem bingham_problem(double mu, double g, double eps, double f)
{
    Problem pr;
    pr.name = "bingham";
    pr.density = make_bingham(mu, g, eps);
    pr.f = [f](const Point&) { return f; };
    pr.f_constant = true;
    return pr;
}

Problem odp_problem(double mu1, double mu2, double lambda, double f)
{
    Problem pr;
    pr.name = "odp";
    pr.density = make_odp(mu1, mu2, lambda);
    pr.f = [f](const Point&) { return f; };
    pr.f_constant = true;
    return pr;
}

Eigen::VectorXd project_source(const Discretization& disc, const ScalarField& f)
{
    const Mesh& mesh = disc.mesh();
    const int nk = disc.nk();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.num_cells() * nk);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const QuadPoints q = disc.data_quadrature(c, disc.nonpoly_exactness());
        for (int i = 0; i < q.size(); ++i)
            out.segment(c * nk, nk).noalias() += q.weights[i] * f(q.points[i]) * disc.ops(c).basis.values(q.points[i]).head(nk);
    }
    return out;
}

double discrete_energy(const Discretization& disc, const EnergyDensity& density, const Eigen::VectorXd& fh,
                       const Eigen::VectorXd& v)
{
    const Mesh& mesh = disc.mesh();
    const int nk = disc.nk();
    double bulk = 0.0, source = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellOperators& op = disc.ops(c);
        const Eigen::VectorXd d = op.D * disc.gather_primal(v, c);
        for (int q = 0; q < op.quad.size(); ++q) {
            const Point a(op.quad_phi[q].dot(d.head(nk)), op.quad_phi[q].dot(d.tail(nk)));
            bulk += op.quad.weights[q] * density.value(a);
        }
        source += fh.segment(c * nk, nk).dot(v.segment(disc.cell_offset(c), nk));
    }
    return bulk - source + disc.stab_primal_energy(v) / disc.params().r;
}

double dual_feasibility_residual(const Discretization& disc, const Eigen::VectorXd& fh, const Eigen::VectorXd& tau)
{
    return (disc.divergence_reconstruction(tau) + fh).norm();
}

double discrete_dual_energy(const Discretization& disc, const EnergyDensity& density, const Eigen::VectorXd& fh,
                            const Eigen::VectorXd& tau, const Eigen::VectorXd* dirichlet)
{
    if (dual_feasibility_residual(disc, fh, tau) > 1e-9 * (1.0 + fh.norm())) return kMinusInfinity;
    const Mesh& mesh = disc.mesh();
    const int nk = disc.nk();
    const Eigen::VectorXd rs = disc.dual_potential_reconstruction(tau);
    double bulk = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellOperators& op = disc.ops(c);
        const auto blk = rs.segment(c * 2 * nk, 2 * nk);
        for (int q = 0; q < op.quad.size(); ++q) {
            const Point g(op.quad_phi[q].dot(blk.head(nk)), op.quad_phi[q].dot(blk.tail(nk)));
            bulk += op.quad.weights[q] * density.conjugate(g);
        }
    }
    const double r = disc.params().r;
    double value = -bulk - disc.stab_dual(tau) * (r - 1.0) / r;
    if (dirichlet) {
        for (int f = 0; f < mesh.num_faces(); ++f) {
            if (mesh.face(f).label != FaceLabel::Dirichlet) continue;
            value += dirichlet->segment(disc.face_offset(f), disc.nf()).dot(tau.segment(disc.dual_face_offset(f), disc.nf()));
        }
    }
    return value;
}

} // namespace hhodual
