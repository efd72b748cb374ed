#include "hhodual/hho.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace hhodual {

Discretization::Discretization(const Mesh& mesh, HhoParams params)
    : mesh_(&mesh), params_(params)
{
    if (params_.k < 0) throw std::invalid_argument("polynomial degree k must be nonnegative");
    if (!(params_.r > 1.0)) throw std::invalid_argument("stabilization exponent r must exceed 1");
    const int k = params_.k;
    nc_ = dim_poly(k + 1);
    nk_ = dim_poly(k);
    nf_ = k + 1;
    exactness_ = static_cast<int>(std::ceil(2.0 * params_.p * (k + 1))) + 2;

    const int face_exactness = std::max(exactness_, static_cast<int>(std::ceil(params_.r + 1.0)) * k + 2);
    face_quad_.resize(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const QuadPoints q = face_quadrature(mesh, f, face_exactness);
        FaceQuad& fq = face_quad_[f];
        fq.weights = q.weights;
        fq.psi.resize(nf_, q.size());
        for (int i = 0; i < q.size(); ++i) fq.psi.col(i) = face_basis_values(k, q.params[i], mesh.face(f).length);
    }

    ops_.resize(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        CellOperators& op = ops_[c];
        op.basis = CellBasis(mesh, c, k + 1);

        const QuadPoints q = cell_quadrature(mesh, c, 2 * k + 2);
        op.grad = Eigen::MatrixXd::Zero(2 * nk_, nc_ - 1);
        Eigen::MatrixXd cell_part = Eigen::MatrixXd::Zero(2 * nk_, nc_);   // -int phi_j d_c phi_i
        for (int iq = 0; iq < q.size(); ++iq) {
            const Eigen::VectorXd phi = op.basis.values(q.points[iq]);
            const Eigen::Matrix2Xd dphi = op.basis.gradients(q.points[iq]);
            const double w = q.weights[iq];
            for (int cmp = 0; cmp < 2; ++cmp) {
                op.grad.middleRows(cmp * nk_, nk_).noalias() +=
                    w * phi.head(nk_) * dphi.row(cmp).tail(nc_ - 1);
                cell_part.middleRows(cmp * nk_, nk_).noalias() -= w * dphi.row(cmp).head(nk_).transpose() * phi.transpose();
            }
        }
        op.grad_gram_inv = (op.grad.transpose() * op.grad).inverse();

        op.D = Eigen::MatrixXd::Zero(2 * nk_, nloc());
        op.D.leftCols(nc_) = cell_part;
        op.div = Eigen::MatrixXd::Zero(nk_, ndual_loc());
        for (int i = 1; i < nk_; ++i) {
            op.div.block(i, 0, 1, 2 * nk_) = -op.grad.col(i - 1).transpose();
        }
        // right-hand side of the dual potential problem tested with phi_i, i >= 1;
        // for i < nk the face terms cancel against div_h, leaving (grad phi_i, tau_K)
        Eigen::MatrixXd rhs_star = Eigen::MatrixXd::Zero(nc_ - 1, ndual_loc());
        rhs_star.topLeftCorner(nk_ - 1, 2 * nk_) = op.grad.leftCols(nk_ - 1).transpose();

        for (int e = 0; e < 3; ++e) {
            const int f = mesh.cell_face(c, e);
            const Face& face = mesh.face(f);
            op.sign[e] = mesh.cell_face_sign(c, e);
            op.h_face[e] = face.length;
            const Point nu_k = op.sign[e] * face.normal;
            const QuadPoints fq = face_quadrature(mesh, f, 2 * k + 2);
            op.trace[e] = Eigen::MatrixXd::Zero(nf_, nc_);
            for (int iq = 0; iq < fq.size(); ++iq) {
                op.trace[e].noalias() += fq.weights[iq] * face_basis_values(k, fq.params[iq], face.length) *
                                         op.basis.values(fq.points[iq]).transpose();
            }
            const int col = nc_ + e * nf_;
            for (int cmp = 0; cmp < 2; ++cmp) {
                op.D.block(cmp * nk_, col, nk_, nf_) = nu_k[cmp] * op.trace[e].leftCols(nk_).transpose();
            }
            op.diff[e] = Eigen::MatrixXd::Zero(nf_, nloc());
            op.diff[e].leftCols(nc_) = -op.trace[e];
            op.diff[e].block(0, col, nf_, nf_).setIdentity();

            const int dcol = 2 * nk_ + e * nf_;
            op.div.block(0, dcol, nk_, nf_) = op.sign[e] * op.trace[e].leftCols(nk_).transpose();
            rhs_star.block(nk_ - 1, dcol, nc_ - nk_, nf_) = op.sign[e] * op.trace[e].rightCols(nc_ - nk_).transpose();
        }

        op.R = Eigen::MatrixXd::Zero(nc_, nloc());
        op.R(0, 0) = 1.0;
        op.R.bottomRows(nc_ - 1) = op.grad_gram_inv * op.grad.transpose() * op.D;

        op.Zproj = Eigen::MatrixXd::Identity(2 * nk_, 2 * nk_) - op.grad * op.grad_gram_inv * op.grad.transpose();
        op.Rstar = op.grad * op.grad_gram_inv * rhs_star;
        op.Rstar.leftCols(2 * nk_) += op.Zproj;

        op.quad = cell_quadrature(mesh, c, exactness_);
        op.quad_phi.resize(op.quad.size());
        for (int iq = 0; iq < op.quad.size(); ++iq) op.quad_phi[iq] = op.basis.values(op.quad.points[iq]).head(nk_);
    }
}

QuadPoints Discretization::data_quadrature(int c, int exactness) const
{
    if (params_.singular_point) return graded_cell_quadrature(*mesh_, c, exactness, *params_.singular_point);
    return cell_quadrature(*mesh_, c, exactness);
}

QuadPoints Discretization::data_face_quadrature(int f, int exactness) const
{
    if (!params_.singular_point) return face_quadrature(*mesh_, f, exactness);
    const Face& face = mesh_->face(f);
    const Point a = mesh_->vertex(face.vertices[0]);
    const Point b = mesh_->vertex(face.vertices[1]);
    const Point& z = *params_.singular_point;
    const double tol = 1e-14 * face.length;
    if ((a - z).norm() > tol && (b - z).norm() > tol) return face_quadrature(*mesh_, f, exactness);
    // geometric grading towards the singular endpoint
    const bool at_start = (a - z).norm() <= tol;
    const LineRule& rule = line_rule(exactness);
    QuadPoints out;
    double outer = 1.0;
    for (int j = 0; j <= kGradedLayers; ++j) {
        const double inner = j == kGradedLayers ? 0.0 : outer * kGradedRatio;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double dist = inner + rule.points[q] * (outer - inner);
            const double t = at_start ? dist : 1.0 - dist;
            out.points.push_back(a + t * (b - a));
            out.weights.push_back(rule.weights[q] * (outer - inner) * face.length);
            out.params.push_back(t);
        }
        outer = inner;
    }
    return out;
}

Eigen::VectorXd Discretization::gather_primal(const Eigen::VectorXd& v, int c) const
{
    Eigen::VectorXd loc(nloc());
    loc.head(nc_) = v.segment(cell_offset(c), nc_);
    for (int e = 0; e < 3; ++e) loc.segment(nc_ + e * nf_, nf_) = v.segment(face_offset(mesh_->cell_face(c, e)), nf_);
    return loc;
}

Eigen::VectorXd Discretization::gather_dual(const Eigen::VectorXd& tau, int c) const
{
    Eigen::VectorXd loc(ndual_loc());
    loc.head(2 * nk_) = tau.segment(dual_cell_offset(c), 2 * nk_);
    for (int e = 0; e < 3; ++e)
        loc.segment(2 * nk_ + e * nf_, nf_) = tau.segment(dual_face_offset(mesh_->cell_face(c, e)), nf_);
    return loc;
}

std::vector<int> Discretization::local_primal_indices(int c) const
{
    std::vector<int> idx(nloc());
    for (int i = 0; i < nc_; ++i) idx[i] = cell_offset(c) + i;
    for (int e = 0; e < 3; ++e) {
        const int off = face_offset(mesh_->cell_face(c, e));
        for (int i = 0; i < nf_; ++i) idx[nc_ + e * nf_ + i] = off + i;
    }
    return idx;
}

Eigen::VectorXd Discretization::interp_primal(const ScalarField& v) const
{
    Eigen::VectorXd out(num_primal());
    const int ex = exactness_ + 2;
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const QuadPoints q = data_quadrature(c, ex);
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(nc_);
        for (int i = 0; i < q.size(); ++i) coeffs.noalias() += q.weights[i] * v(q.points[i]) * ops_[c].basis.values(q.points[i]);
        out.segment(cell_offset(c), nc_) = coeffs;
    }
    for (int f = 0; f < mesh_->num_faces(); ++f) {
        const QuadPoints q = data_face_quadrature(f, ex);
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(nf_);
        for (int i = 0; i < q.size(); ++i)
            coeffs.noalias() += q.weights[i] * v(q.points[i]) * face_basis_values(params_.k, q.params[i], mesh_->face(f).length);
        out.segment(face_offset(f), nf_) = coeffs;
    }
    return out;
}

Eigen::VectorXd Discretization::interp_dual(const VectorField& tau) const
{
    Eigen::VectorXd out(num_dual());
    const int ex = exactness_ + 2;
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const QuadPoints q = data_quadrature(c, ex);
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(2 * nk_);
        for (int i = 0; i < q.size(); ++i) {
            const Eigen::VectorXd phi = ops_[c].basis.values(q.points[i]).head(nk_);
            const Point t = tau(q.points[i]);
            coeffs.head(nk_).noalias() += q.weights[i] * t.x() * phi;
            coeffs.tail(nk_).noalias() += q.weights[i] * t.y() * phi;
        }
        out.segment(dual_cell_offset(c), 2 * nk_) = coeffs;
    }
    for (int f = 0; f < mesh_->num_faces(); ++f) {
        const Face& face = mesh_->face(f);
        const QuadPoints q = data_face_quadrature(f, ex);
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(nf_);
        for (int i = 0; i < q.size(); ++i)
            coeffs.noalias() += q.weights[i] * tau(q.points[i]).dot(face.normal) *
                                face_basis_values(params_.k, q.params[i], face.length);
        out.segment(dual_face_offset(f), nf_) = coeffs;
    }
    return out;
}

Eigen::VectorXd Discretization::gradient_reconstruction(const Eigen::VectorXd& v) const
{
    Eigen::VectorXd out(mesh_->num_cells() * 2 * nk_);
    for (int c = 0; c < mesh_->num_cells(); ++c) out.segment(c * 2 * nk_, 2 * nk_) = ops_[c].D * gather_primal(v, c);
    return out;
}

Eigen::VectorXd Discretization::potential_reconstruction(const Eigen::VectorXd& v) const
{
    Eigen::VectorXd out(mesh_->num_cells() * nc_);
    for (int c = 0; c < mesh_->num_cells(); ++c) out.segment(c * nc_, nc_) = ops_[c].R * gather_primal(v, c);
    return out;
}

Eigen::VectorXd Discretization::divergence_reconstruction(const Eigen::VectorXd& tau) const
{
    Eigen::VectorXd out(mesh_->num_cells() * nk_);
    for (int c = 0; c < mesh_->num_cells(); ++c) out.segment(c * nk_, nk_) = ops_[c].div * gather_dual(tau, c);
    return out;
}

Eigen::VectorXd Discretization::dual_potential_reconstruction(const Eigen::VectorXd& tau) const
{
    Eigen::VectorXd out(mesh_->num_cells() * 2 * nk_);
    for (int c = 0; c < mesh_->num_cells(); ++c)
        out.segment(c * 2 * nk_, 2 * nk_) = ops_[c].Rstar * gather_dual(tau, c);
    return out;
}

Eigen::VectorXd Discretization::face_residual(const Eigen::VectorXd& v, int c, int i) const
{
    return ops_[c].diff[i] * gather_primal(v, c);
}

Eigen::VectorXd Discretization::trace_operator(const Eigen::VectorXd& v, int c, int i) const
{
    const Eigen::VectorXd d = face_residual(v, c, i);
    if (params_.r == 2.0) return d;
    const FaceQuad& fq = face_quad_[mesh_->cell_face(c, i)];
    Eigen::VectorXd t = Eigen::VectorXd::Zero(nf_);
    for (std::size_t q = 0; q < fq.weights.size(); ++q) {
        const double val = fq.psi.col(q).dot(d);
        t.noalias() += fq.weights[q] * std::pow(std::abs(val), params_.r - 2.0) * val * fq.psi.col(q);
    }
    return t;
}

double Discretization::stab_primal(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const
{
    double sum = 0.0;
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        for (int e = 0; e < 3; ++e) {
            sum += std::pow(ops_[c].h_face[e], -params_.s) * trace_operator(u, c, e).dot(face_residual(v, c, e));
        }
    }
    return sum;
}

double Discretization::stab_primal_energy(const Eigen::VectorXd& v) const
{
    double sum = 0.0;
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        for (int e = 0; e < 3; ++e) {
            sum += std::pow(ops_[c].h_face[e], -params_.s) *
                   face_lq_power(mesh_->cell_face(c, e), face_residual(v, c, e), params_.r);
        }
    }
    return sum;
}

double Discretization::face_lq_power(int f, const Eigen::VectorXd& d, double q) const
{
    if (q == 2.0) return d.squaredNorm();
    const FaceQuad& fq = face_quad_[f];
    double sum = 0.0;
    for (std::size_t i = 0; i < fq.weights.size(); ++i) sum += fq.weights[i] * std::pow(std::abs(fq.psi.col(i).dot(d)), q);
    return sum;
}

double Discretization::stab_dual(const Eigen::VectorXd& tau) const
{
    const double r = params_.r;
    const double rp = r / (r - 1.0);
    double sum = 0.0;
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const CellOperators& op = ops_[c];
        const Eigen::VectorXd loc = gather_dual(tau, c);
        const Eigen::VectorXd rs = op.Rstar * loc;
        for (int e = 0; e < 3; ++e) {
            const Face& face = mesh_->face(mesh_->cell_face(c, e));
            Point nu = face.normal;
            if (params_.gamma_normal == DualStabilizationNormal::CellNormalAsPrinted) nu *= op.sign[e];
            const Eigen::MatrixXd tr = op.trace[e].leftCols(nk_);
            const Eigen::VectorXd normal_part = nu.x() * tr * rs.head(nk_) + nu.y() * tr * rs.tail(nk_);
            const Eigen::VectorXd d = loc.segment(2 * nk_ + e * nf_, nf_) - normal_part;
            sum += std::pow(op.h_face[e], params_.s / (r - 1.0)) * face_lq_power(mesh_->cell_face(c, e), d, rp);
        }
    }
    return sum;
}

} // namespace hhodual
