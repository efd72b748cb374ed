#include "hhodual/solver.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

namespace hhodual {

DofMap::DofMap(const Discretization& disc)
{
    const Mesh& mesh = disc.mesh();
    global_to_free_.assign(disc.num_primal(), -1);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        for (int i = 0; i < disc.nc(); ++i) {
            global_to_free_[disc.cell_offset(c) + i] = num_free();
            free_to_global_.push_back(disc.cell_offset(c) + i);
        }
    }
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (mesh.face(f).label == FaceLabel::Dirichlet) continue;
        for (int i = 0; i < disc.nf(); ++i) {
            global_to_free_[disc.face_offset(f) + i] = num_free();
            free_to_global_.push_back(disc.face_offset(f) + i);
        }
    }
}

Eigen::VectorXd DofMap::restrict(const Eigen::VectorXd& full) const
{
    Eigen::VectorXd out(num_free());
    for (int i = 0; i < num_free(); ++i) out[i] = full[free_to_global_[i]];
    return out;
}

void DofMap::scatter(const Eigen::VectorXd& free, Eigen::VectorXd& full) const
{
    for (int i = 0; i < num_free(); ++i) full[free_to_global_[i]] = free[i];
}

DiscreteEnergy::DiscreteEnergy(const Discretization& disc, const EnergyDensity& density, Eigen::VectorXd fh)
    : disc_(&disc), density_(&density), fh_(std::move(fh))
{
}

double DiscreteEnergy::value(const Eigen::VectorXd& v) const { return discrete_energy(*disc_, *density_, fh_, v); }

Eigen::VectorXd DiscreteEnergy::cell_flux(const Eigen::VectorXd& v, int c) const
{
    const int nk = disc_->nk();
    const CellOperators& op = disc_->ops(c);
    const Eigen::VectorXd d = op.D * disc_->gather_primal(v, c);
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(2 * nk);
    for (int q = 0; q < op.quad.size(); ++q) {
        const Eigen::VectorXd& phi = op.quad_phi[q];
        const Point g = density_->gradient(Point(phi.dot(d.head(nk)), phi.dot(d.tail(nk))));
        sigma.head(nk).noalias() += op.quad.weights[q] * g.x() * phi;
        sigma.tail(nk).noalias() += op.quad.weights[q] * g.y() * phi;
    }
    return sigma;
}

Eigen::VectorXd DiscreteEnergy::gradient(const Eigen::VectorXd& v) const
{
    const Mesh& mesh = disc_->mesh();
    const int nk = disc_->nk();
    const double s = disc_->params().s;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(disc_->num_primal());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellOperators& op = disc_->ops(c);
        Eigen::VectorXd loc = op.D.transpose() * cell_flux(v, c);
        loc.head(nk) -= fh_.segment(c * nk, nk);
        for (int e = 0; e < 3; ++e)
            loc.noalias() += std::pow(op.h_face[e], -s) * op.diff[e].transpose() * disc_->trace_operator(v, c, e);
        const std::vector<int> idx = disc_->local_primal_indices(c);
        for (std::size_t i = 0; i < idx.size(); ++i) g[idx[i]] += loc[i];
    }
    return g;
}

Eigen::SparseMatrix<double> DiscreteEnergy::hessian(const Eigen::VectorXd& v) const
{
    const Mesh& mesh = disc_->mesh();
    const int nk = disc_->nk();
    const int nf = disc_->nf();
    const double r = disc_->params().r;
    const double s = disc_->params().s;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(mesh.num_cells()) * disc_->nloc() * disc_->nloc());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellOperators& op = disc_->ops(c);
        const Eigen::VectorXd d = op.D * disc_->gather_primal(v, c);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * nk, 2 * nk);
        for (int q = 0; q < op.quad.size(); ++q) {
            const Eigen::VectorXd& phi = op.quad_phi[q];
            const Eigen::Matrix2d h = density_->hessian(Point(phi.dot(d.head(nk)), phi.dot(d.tail(nk))));
            const Eigen::MatrixXd pp = op.quad.weights[q] * phi * phi.transpose();
            m.topLeftCorner(nk, nk) += h(0, 0) * pp;
            m.topRightCorner(nk, nk) += h(0, 1) * pp;
            m.bottomLeftCorner(nk, nk) += h(1, 0) * pp;
            m.bottomRightCorner(nk, nk) += h(1, 1) * pp;
        }
        Eigen::MatrixXd loc = op.D.transpose() * m * op.D;
        for (int e = 0; e < 3; ++e) {
            const double w = std::pow(op.h_face[e], -s);
            if (r == 2.0) {
                loc.noalias() += w * op.diff[e].transpose() * op.diff[e];
                continue;
            }
            const Eigen::VectorXd res = disc_->face_residual(v, c, e);
            const FaceQuad& fq = disc_->face_quad(mesh.cell_face(c, e));
            Eigen::MatrixXd sm = Eigen::MatrixXd::Zero(nf, nf);
            for (std::size_t q = 0; q < fq.weights.size(); ++q) {
                const double val = std::max(std::abs(fq.psi.col(q).dot(res)), 1e-12);
                sm.noalias() += fq.weights[q] * (r - 1.0) * std::pow(val, r - 2.0) * fq.psi.col(q) * fq.psi.col(q).transpose();
            }
            loc.noalias() += w * op.diff[e].transpose() * sm * op.diff[e];
        }
        const std::vector<int> idx = disc_->local_primal_indices(c);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) trip.emplace_back(idx[i], idx[j], loc(i, j));
    }
    Eigen::SparseMatrix<double> h(disc_->num_primal(), disc_->num_primal());
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
}

Eigen::VectorXd dirichlet_lift(const Discretization& disc, const ScalarField* datum)
{
    Eigen::VectorXd u = Eigen::VectorXd::Zero(disc.num_primal());
    if (!datum) return u;
    const Mesh& mesh = disc.mesh();
    const int ex = disc.nonpoly_exactness() + 2;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (mesh.face(f).label != FaceLabel::Dirichlet) continue;
        const QuadPoints q = disc.data_face_quadrature(f, ex);
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(disc.nf());
        for (int i = 0; i < q.size(); ++i)
            coeffs.noalias() += q.weights[i] * (*datum)(q.points[i]) * face_basis_values(disc.k(), q.params[i], mesh.face(f).length);
        u.segment(disc.face_offset(f), disc.nf()) = coeffs;
    }
    return u;
}

namespace {

Eigen::SparseMatrix<double> restrict_matrix(const Eigen::SparseMatrix<double>& h, const DofMap& dofs)
{
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(h.nonZeros());
    for (int col = 0; col < h.outerSize(); ++col) {
        const int fc = dofs.free_index(col);
        if (fc < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(h, col); it; ++it) {
            const int fr = dofs.free_index(static_cast<int>(it.row()));
            if (fr >= 0) trip.emplace_back(fr, fc, it.value());
        }
    }
    Eigen::SparseMatrix<double> out(dofs.num_free(), dofs.num_free());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

} // namespace

SolveReport minimize(const DiscreteEnergy& energy, const DofMap& dofs, Eigen::VectorXd& u, const SolverOptions& options)
{
    SolveReport report;
    double e = energy.value(u);
    Eigen::VectorXd g = dofs.restrict(energy.gradient(u));
    double shift = 0.0;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    bool analyzed = false;

    for (int it = 0; it < options.max_iterations; ++it) {
        report.energy = e;
        report.gradient_norm = g.norm();
        if (report.gradient_norm <= options.gradient_tol * (1.0 + std::abs(e))) {
            report.converged = true;
            return report;
        }
        const Eigen::SparseMatrix<double> h = restrict_matrix(energy.hessian(u), dofs);
        const double diag_scale = std::max(h.diagonal().cwiseAbs().maxCoeff(), 1e-300);
        if (!analyzed) {
            ldlt.analyzePattern(h);
            analyzed = true;
        }

        // Newton direction with a Levenberg shift when H is not positive definite
        Eigen::VectorXd dir;
        shift = shift > 0.0 ? shift / 10.0 : 0.0;
        if (shift < 1e-14 * diag_scale) shift = 0.0;
        for (;;) {
            Eigen::SparseMatrix<double> hs = h;
            if (shift > 0.0) {
                for (int i = 0; i < hs.rows(); ++i) hs.coeffRef(i, i) += shift;
            }
            ldlt.factorize(hs);
            bool ok = ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0;
            if (ok) {
                dir = ldlt.solve(-g);
                ok = dir.allFinite() && dir.dot(g) < 0.0;
            }
            if (ok) break;
            shift = shift == 0.0 ? 1e-10 * diag_scale : 10.0 * shift;
            ++report.levenberg_shifts;
            if (shift > 1e20 * diag_scale) return report;
        }

        // Armijo backtracking
        const double slope = dir.dot(g);
        double alpha = 1.0;
        Eigen::VectorXd trial = u;
        bool accepted = false;
        for (int bt = 0; bt <= options.max_backtracks; ++bt) {
            trial = u;
            for (int i = 0; i < dofs.num_free(); ++i) trial[dofs.global_index(i)] += alpha * dir[i];
            const double et = energy.value(trial);
            if (et <= e + options.armijo * alpha * slope) {
                accepted = true;
                e = et;
                break;
            }
            if (bt == 0 && std::abs(et - e) <= 1e-14 * (1.0 + std::abs(e))) {
                // decrease below roundoff: accept a full step that still reduces the gradient
                const Eigen::VectorXd gt = dofs.restrict(energy.gradient(trial));
                if (gt.norm() < g.norm()) {
                    accepted = true;
                    e = et;
                    break;
                }
            }
            alpha *= options.backtrack;
            ++report.backtracks;
        }
        ++report.iterations;
        if (!accepted) {
            // retry from the same iterate with a stronger shift
            shift = shift == 0.0 ? 1e-6 * diag_scale : 100.0 * shift;
            ++report.levenberg_shifts;
            if (shift > 1e20 * diag_scale) return report;
            continue;
        }
        const double step = alpha * dir.norm();
        u = trial;
        g = dofs.restrict(energy.gradient(u));
        if (step <= options.step_tol * (1.0 + dofs.restrict(u).norm())) {
            report.energy = e;
            report.gradient_norm = g.norm();
            report.converged = true;
            return report;
        }
    }
    report.energy = e;
    report.gradient_norm = g.norm();
    report.converged = report.gradient_norm <= options.gradient_tol * (1.0 + std::abs(e));
    return report;
}

EulerLagrangeReport check_euler_lagrange(const DiscreteEnergy& energy, const Eigen::VectorXd& u)
{
    const Discretization& disc = energy.disc();
    const Mesh& mesh = disc.mesh();
    const int nk = disc.nk();
    const double s = disc.params().s;
    std::vector<Eigen::VectorXd> residual(mesh.num_faces(), Eigen::VectorXd::Zero(disc.nf()));
    EulerLagrangeReport rep;
    double max_trace = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellOperators& op = disc.ops(c);
        const Eigen::VectorXd sigma = energy.cell_flux(u, c);
        for (int e = 0; e < 3; ++e) {
            const int f = mesh.cell_face(c, e);
            const Point nu = mesh.face(f).normal;
            const Eigen::MatrixXd tr = op.trace[e].leftCols(nk);
            const Eigen::VectorXd normal = nu.x() * tr * sigma.head(nk) + nu.y() * tr * sigma.tail(nk);
            max_trace = std::max(max_trace, normal.norm());
            // [sigma nu_S]_S = trace from K+ minus trace from K-
            residual[f] += op.sign[e] * normal + std::pow(op.h_face[e], -s) * disc.trace_operator(u, c, e);
        }
    }
    rep.scale = 1.0 + max_trace;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (mesh.face(f).label == FaceLabel::Dirichlet) continue;
        const double r = residual[f].norm();
        if (r > rep.max_face_residual) {
            rep.max_face_residual = r;
            rep.worst_face = f;
        }
    }
    return rep;
}

Eigen::VectorXd prolongate(const Discretization& coarse, const Eigen::VectorXd& u, const Discretization& fine,
                           const ScalarField* datum)
{
    const Mesh& fm = fine.mesh();
    const int nc = fine.nc();
    const int nf = fine.nf();
    Eigen::VectorXd out = dirichlet_lift(fine, datum);
    for (int c = 0; c < fm.num_cells(); ++c) {
        const int parent = fm.parent(c);
        if (parent < 0) throw std::invalid_argument("prolongate: fine mesh has no parent information");
        const QuadPoints q = cell_quadrature(fm, c, 2 * (fine.k() + 1));
        const auto coarse_coeffs = u.segment(coarse.cell_offset(parent), coarse.nc());
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(nc);
        for (int i = 0; i < q.size(); ++i) {
            const double val = coarse.ops(parent).basis.eval(coarse_coeffs, q.points[i]);
            coeffs.noalias() += q.weights[i] * val * fine.ops(c).basis.values(q.points[i]);
        }
        out.segment(fine.cell_offset(c), nc) = coeffs;
    }
    std::vector<int> count(fm.num_faces(), 0);
    Eigen::VectorXd faces = Eigen::VectorXd::Zero(fm.num_faces() * nf);
    for (int c = 0; c < fm.num_cells(); ++c) {
        for (int e = 0; e < 3; ++e) {
            const int f = fm.cell_face(c, e);
            faces.segment(f * nf, nf) += fine.ops(c).trace[e] * out.segment(fine.cell_offset(c), nc);
            ++count[f];
        }
    }
    for (int f = 0; f < fm.num_faces(); ++f) {
        if (fm.face(f).label == FaceLabel::Dirichlet) continue;
        out.segment(fine.face_offset(f), nf) = faces.segment(f * nf, nf) / count[f];
    }
    return out;
}

} // namespace hhodual
