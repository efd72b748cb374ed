#include "hhodual/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace hhodual {

double poincare_constant(double p)
{
    if (p == 2.0) return 1.0 / std::numbers::pi;
    return 2.0 * std::pow(p / 2.0, 1.0 / p);
}

double du_bound(double c1, double c2, double p, double cp, double fnorm, double area)
{
    auto g = [&](double t) { return c1 * std::pow(t, p) - cp * t * fnorm - c2 * area; };
    if (cp * fnorm == 0.0 && c2 * area == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (g(hi) <= 0.0) hi *= 2.0;
    // g < 0 on (0, root) and > 0 beyond, because g is convex with g(0) <= 0
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) <= 0.0) lo = mid;
        else hi = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
}

EstimateReport estimate(const Discretization& disc, const Problem& problem, const Eigen::VectorXd& fh,
                        const RTField& sigma0, const ConformingField& v0)
{
    const Mesh& mesh = disc.mesh();
    const int nk = disc.nk();
    const auto density = problem.density->unregularized();
    const double p = density->growth_exponent();
    const double pc = density->conjugate_exponent();
    const int ex = std::min(disc.nonpoly_exactness() + 2, kMaxTriangleExactness);

    EstimateReport rep;
    rep.eta.assign(mesh.num_cells(), 0.0);
    rep.indicator.assign(mesh.num_cells(), 0.0);
    std::vector<double> raw(mesh.num_cells(), 0.0);
    std::vector<double> osc_local(mesh.num_cells(), 0.0);
    std::vector<double> oscp_local(mesh.num_cells(), 0.0);
    double scale = 0.0;
    double psi_v0 = 0.0, fh_v0 = 0.0, f_v0 = 0.0, psi_star = 0.0, fnorm = 0.0, div_res = 0.0;
    ExactErrors err;

    for (int c = 0; c < mesh.num_cells(); ++c) {
        const QuadPoints q = disc.data_quadrature(c, ex);
        const CellBasis& basis = disc.ops(c).basis;
        const auto fhc = fh.segment(c * nk, nk);
        const double h = mesh.diameter(c);
        double eta = 0.0;
        for (int i = 0; i < q.size(); ++i) {
            const Point& x = q.points[i];
            const double w = q.weights[i];
            const Point gv = v0.gradient(c, x);
            const Point s0 = sigma0.value(c, x);
            const double vv = v0.value(c, x);
            const double fhx = basis.eval(fhc, x);
            const double fx = problem.f(x);
            const double a = density->value(gv);
            const double b = s0.dot(gv);
            const double d = density->conjugate(s0);
            eta += w * (a - b + d);
            scale += w * (std::abs(a) + std::abs(b) + std::abs(d));
            psi_v0 += w * a;
            fh_v0 += w * fhx * vv;
            f_v0 += w * fx * vv;
            psi_star += w * d;
            const double ftilde = fx - fhx;
            fnorm += w * std::pow(std::abs(fx), pc);
            osc_local[c] += w * std::pow(h, pc) * std::pow(std::abs(ftilde), pc);
            if (ftilde != 0.0) {
                const double base = std::pow(gv.norm(), p - 1.0) + h * std::abs(ftilde);
                oscp_local[c] += w * h * h * std::pow(base, pc - 2.0) * ftilde * ftilde;
            }
            const double dr = sigma0.divergence(c, x) + fhx;
            div_res += w * dr * dr;
            if (problem.exact) {
                const Point gu = problem.exact->grad_u(x);
                const Point diff = gu - gv;
                err.grad += w * std::pow(diff.norm(), p);
                err.flux += w * std::pow((problem.exact->flux(x) - density->gradient(gv)).norm(), pc);
                err.quasi += w * std::pow(gu.norm() + gv.norm(), p - 2.0) * diff.squaredNorm();
                err.energy_u += w * (density->value(gu) - fx * problem.exact->u(x));
            }
        }
        raw[c] = eta;
    }

    double boundary = 0.0;
    if (problem.exact) {
        for (int f = 0; f < mesh.num_faces(); ++f) {
            const Face& face = mesh.face(f);
            if (face.label != FaceLabel::Dirichlet) continue;
            const QuadPoints q = disc.data_face_quadrature(f, ex);
            for (int i = 0; i < q.size(); ++i)
                boundary += q.weights[i] * problem.exact->u(q.points[i]) * sigma0.value(face.cell_plus, q.points[i]).dot(face.normal);
        }
    }

    rep.min_eta_raw = *std::min_element(raw.begin(), raw.end());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        if (raw[c] < -1e-12 * scale)
            throw EstimatorError("negative refinement indicator " + std::to_string(raw[c]) + " on cell " +
                                 std::to_string(c) + " (scale " + std::to_string(scale) + ")");
        rep.eta[c] = std::max(raw[c], 0.0);
        rep.eta_sum += rep.eta[c];
    }

    rep.energy_v0 = psi_v0 - f_v0;
    rep.energy_sigma_v0 = psi_v0 - fh_v0;
    rep.dual_energy = -psi_star + boundary;
    rep.gap = rep.energy_sigma_v0 - rep.dual_energy;
    rep.osc = std::pow(std::accumulate(osc_local.begin(), osc_local.end(), 0.0), 1.0 / pc);
    rep.osc_p2 = std::accumulate(oscp_local.begin(), oscp_local.end(), 0.0);
    rep.div_residual = std::sqrt(div_res);
    rep.c_poincare = poincare_constant(p);
    const GrowthConstants gc = density->growth();
    rep.c_du = du_bound(gc.c1, gc.c2, p, rep.c_poincare, std::pow(fnorm, 1.0 / pc), mesh.total_area());
    rep.leb = rep.dual_energy - rep.c_poincare * rep.c_du * rep.osc;

    const bool plaplace = problem.name == "plaplace";
    const bool quadratic_osc = plaplace || problem.name == "bingham";
    for (int c = 0; c < mesh.num_cells(); ++c) {
        rep.indicator[c] = rep.eta[c];
        if (plaplace) rep.indicator[c] += oscp_local[c];
        else if (quadratic_osc) rep.indicator[c] += osc_local[c];
    }

    if (problem.exact) {
        err.grad = std::pow(err.grad, 1.0 / p);
        err.flux = std::pow(err.flux, 1.0 / pc);
        rep.errors = err;
    }
    return rep;
}

std::vector<int> dorfler_mark(const std::vector<double>& eta, double theta)
{
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("Dorfler parameter must lie in (0, 1]");
    const double total = std::accumulate(eta.begin(), eta.end(), 0.0);
    std::vector<int> order(eta.size());
    std::iota(order.begin(), order.end(), 0);
    if (!(total > 0.0)) return {};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return eta[a] > eta[b]; });
    std::vector<int> marked;
    double sum = 0.0;
    for (int c : order) {
        if (sum >= theta * total) break;
        if (eta[c] <= 0.0) break;
        marked.push_back(c);
        sum += eta[c];
    }
    std::sort(marked.begin(), marked.end());
    return marked;
}

} // namespace hhodual
