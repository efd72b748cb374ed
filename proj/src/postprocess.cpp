#include "hhodual/postprocess.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/LU>

namespace hhodual {

Eigen::VectorXd dual_traces(const DiscreteEnergy& energy, const Eigen::VectorXd& u)
{
    const Discretization& disc = energy.disc();
    const Mesh& mesh = disc.mesh();
    const int nk = disc.nk();
    const int nf = disc.nf();
    const double s = disc.params().s;
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(disc.num_dual());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellOperators& op = disc.ops(c);
        const Eigen::VectorXd flux = energy.cell_flux(u, c);
        sigma.segment(disc.dual_cell_offset(c), 2 * nk) = flux;
        for (int e = 0; e < 3; ++e) {
            const int f = mesh.cell_face(c, e);
            const Face& face = mesh.face(f);
            if (face.label == FaceLabel::Neumann) continue;
            const Eigen::MatrixXd tr = op.trace[e].leftCols(nk);
            const Eigen::VectorXd normal = face.normal.x() * tr * flux.head(nk) + face.normal.y() * tr * flux.tail(nk);
            const Eigen::VectorXd t = std::pow(op.h_face[e], -s) * disc.trace_operator(u, c, e);
            auto out = sigma.segment(disc.dual_face_offset(f), nf);
            if (face.is_boundary()) out += normal + t;
            else out += 0.5 * normal + 0.5 * op.sign[e] * t;
        }
    }
    return sigma;
}

RTLocalBasis::RTLocalBasis(const Point& center, double scale, int k) : center_(center), scale_(scale), k_(k) {}

Eigen::Matrix2Xd RTLocalBasis::values(const Point& x) const
{
    const Point z = (x - center_) / scale_;
    const int nk = dim_poly(k_);
    Eigen::Matrix2Xd v = Eigen::Matrix2Xd::Zero(2, dim());
    int idx = 0;
    for (int deg = 0; deg <= k_; ++deg) {
        for (int j = 0; j <= deg; ++j) {
            const double m = std::pow(z.x(), deg - j) * std::pow(z.y(), j);
            v(0, idx) = m;
            v(1, nk + idx) = m;
            ++idx;
        }
    }
    for (int j = 0; j <= k_; ++j) {
        const double m = std::pow(z.x(), k_ - j) * std::pow(z.y(), j);
        v.col(2 * nk + j) = m * z;
    }
    return v;
}

Eigen::VectorXd RTLocalBasis::divergence(const Point& x) const
{
    const Point z = (x - center_) / scale_;
    const int nk = dim_poly(k_);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(dim());
    int idx = 0;
    for (int deg = 0; deg <= k_; ++deg) {
        for (int j = 0; j <= deg; ++j) {
            const int a = deg - j;
            d[idx] = a == 0 ? 0.0 : a * std::pow(z.x(), a - 1) * std::pow(z.y(), j) / scale_;
            d[nk + idx] = j == 0 ? 0.0 : j * std::pow(z.x(), a) * std::pow(z.y(), j - 1) / scale_;
            ++idx;
        }
    }
    for (int j = 0; j <= k_; ++j) d[2 * nk + j] = (k_ + 2) * std::pow(z.x(), k_ - j) * std::pow(z.y(), j) / scale_;
    return d;
}

RTField::RTField(const Mesh& mesh, int k) : k_(k)
{
    basis_.reserve(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) basis_.emplace_back(mesh.centroid(c), mesh.diameter(c), k);
    coeffs_.assign(mesh.num_cells(), Eigen::VectorXd::Zero((k + 1) * (k + 3)));
}

Point RTField::value(int c, const Point& x) const { return basis_[c].values(x) * coeffs_[c]; }

double RTField::divergence(int c, const Point& x) const { return basis_[c].divergence(x).dot(coeffs_[c]); }

RTField rt_reconstruct(const Discretization& disc, const Eigen::VectorXd& sigma_h)
{
    const Mesh& mesh = disc.mesh();
    const int k = disc.k();
    const int nk = disc.nk();
    const int nf = disc.nf();
    const int ni = dim_poly(k - 1);
    RTField field(mesh, k);
    const int n = (k + 1) * (k + 3);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const RTLocalBasis& rb = field.basis(c);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd rhs(n);
        for (int e = 0; e < 3; ++e) {
            const int f = mesh.cell_face(c, e);
            const Face& face = mesh.face(f);
            const QuadPoints q = face_quadrature(mesh, f, 2 * k + 2);
            for (int i = 0; i < q.size(); ++i) {
                const Eigen::VectorXd psi = face_basis_values(k, q.params[i], face.length);
                const Eigen::RowVectorXd vn = face.normal.transpose() * rb.values(q.points[i]);
                m.middleRows(e * nf, nf).noalias() += q.weights[i] * psi * vn;
            }
            rhs.segment(e * nf, nf) = sigma_h.segment(disc.dual_face_offset(f), nf);
        }
        if (ni > 0) {
            const QuadPoints q = cell_quadrature(mesh, c, 2 * k + 1);
            for (int i = 0; i < q.size(); ++i) {
                const Eigen::VectorXd phi = disc.ops(c).basis.values(q.points[i]).head(ni);
                const Eigen::Matrix2Xd v = rb.values(q.points[i]);
                m.middleRows(3 * nf, ni).noalias() += q.weights[i] * phi * v.row(0);
                m.middleRows(3 * nf + ni, ni).noalias() += q.weights[i] * phi * v.row(1);
            }
            const auto cell = sigma_h.segment(disc.dual_cell_offset(c), 2 * nk);
            rhs.segment(3 * nf, ni) = cell.head(ni);
            rhs.segment(3 * nf + ni, ni) = cell.segment(nk, ni);
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
        field.coefficients(c) = lu.solve(rhs);
    }
    return field;
}

ConformingField::ConformingField(const Discretization& disc, std::vector<Eigen::VectorXd> coeffs,
                                 std::optional<ExactSolution> shift)
    : disc_(&disc), coeffs_(std::move(coeffs)), shift_(std::move(shift))
{
}

double ConformingField::value(int c, const Point& x) const
{
    double v = disc_->ops(c).basis.eval(coeffs_[c], x);
    if (shift_) v += shift_->u(x);
    return v;
}

Point ConformingField::gradient(int c, const Point& x) const
{
    Point g = disc_->ops(c).basis.eval_gradient(coeffs_[c], x);
    if (shift_) g += shift_->grad_u(x);
    return g;
}

LagrangeNodes lagrange_nodes(const Mesh& mesh, int degree)
{
    const int m = degree;
    LagrangeNodes nodes;
    nodes.degree = m;
    const int per_face = m - 1;
    const int per_cell = (m - 1) * (m - 2) / 2;
    const int face_base = mesh.num_vertices();
    const int cell_base = face_base + mesh.num_faces() * per_face;
    nodes.num_nodes = cell_base + mesh.num_cells() * per_cell;
    nodes.dirichlet.assign(nodes.num_nodes, 0);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const Face& face = mesh.face(f);
        if (face.label != FaceLabel::Dirichlet) continue;
        nodes.dirichlet[face.vertices[0]] = 1;
        nodes.dirichlet[face.vertices[1]] = 1;
        for (int j = 0; j < per_face; ++j) nodes.dirichlet[face_base + f * per_face + j] = 1;
    }
    nodes.cell_nodes.resize(mesh.num_cells());
    nodes.cell_points.resize(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& t = mesh.cell(c);
        int interior = 0;
        for (int a0 = m; a0 >= 0; --a0) {
            for (int a1 = m - a0; a1 >= 0; --a1) {
                const int a2 = m - a0 - a1;
                const std::array<int, 3> a = {a0, a1, a2};
                const Point x = (a0 * mesh.vertex(t[0]) + a1 * mesh.vertex(t[1]) + a2 * mesh.vertex(t[2])) / m;
                int id = -1;
                int zeros = 0, zero_at = -1;
                for (int i = 0; i < 3; ++i) {
                    if (a[i] == m) id = t[i];
                    if (a[i] == 0) {
                        ++zeros;
                        zero_at = i;
                    }
                }
                if (id < 0 && zeros == 1) {
                    const int f = mesh.cell_face(c, zero_at);
                    const Face& face = mesh.face(f);
                    const int local_end = face.vertices[1] == t[(zero_at + 1) % 3] ? (zero_at + 1) % 3 : (zero_at + 2) % 3;
                    const int j = a[local_end];   // distance from face.vertices[0] in units of 1/m
                    id = face_base + f * per_face + (j - 1);
                } else if (id < 0) {
                    id = cell_base + c * per_cell + interior++;
                }
                nodes.cell_nodes[c].push_back(id);
                nodes.cell_points[c].push_back(x);
            }
        }
    }
    return nodes;
}

ConformingField nodal_average(const Discretization& disc, const Eigen::VectorXd& u,
                              const std::optional<ExactSolution>& exact)
{
    const Mesh& mesh = disc.mesh();
    const int nc = disc.nc();
    const LagrangeNodes nodes = lagrange_nodes(mesh, disc.k() + 1);

    std::vector<Eigen::VectorXd> cell_poly(mesh.num_cells());
    Eigen::VectorXd projected;
    if (exact) projected = disc.interp_primal(exact->u);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        cell_poly[c] = u.segment(disc.cell_offset(c), nc);
        if (exact) cell_poly[c] -= projected.segment(disc.cell_offset(c), nc);
    }

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(nodes.num_nodes);
    std::vector<int> count(nodes.num_nodes, 0);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        for (std::size_t i = 0; i < nodes.cell_nodes[c].size(); ++i) {
            const int id = nodes.cell_nodes[c][i];
            sum[id] += disc.ops(c).basis.eval(cell_poly[c], nodes.cell_points[c][i]);
            ++count[id];
        }
    }
    for (int id = 0; id < nodes.num_nodes; ++id) {
        sum[id] = nodes.dirichlet[id] ? 0.0 : sum[id] / count[id];
    }

    std::vector<Eigen::VectorXd> coeffs(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        Eigen::MatrixXd vander(nc, nc);
        Eigen::VectorXd vals(nc);
        for (int i = 0; i < nc; ++i) {
            vander.row(i) = disc.ops(c).basis.values(nodes.cell_points[c][i]).transpose();
            vals[i] = sum[nodes.cell_nodes[c][i]];
        }
        coeffs[c] = vander.partialPivLu().solve(vals);
    }
    return ConformingField(disc, std::move(coeffs), exact);
}

} // namespace hhodual
