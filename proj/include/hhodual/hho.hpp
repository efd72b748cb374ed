#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "hhodual/basis.hpp"
#include "hhodual/mesh.hpp"
#include "hhodual/quadrature.hpp"

namespace hhodual {

/// Which normal the dual stabilization compares the face unknown against.
/// FaceNormal: tau_S - (R*tau)|_K nu_S, the pairing used in the weak duality
/// argument. CellNormalAsPrinted: tau_S - (R*tau)|_K nu_K.
enum class DualStabilizationNormal { FaceNormal, CellNormalAsPrinted };

struct HhoParams
{
    int k = 0;
    double r = 2.0;
    double s = 1.0;
    DualStabilizationNormal gamma_normal = DualStabilizationNormal::FaceNormal;
    /// Growth exponent of the density; sets the exactness 2p(k+1)+2 used for
    /// nonpolynomial cell integrands.
    double p = 2.0;
    /// Data singularity (e.g. a reentrant corner) treated with graded quadrature.
    std::optional<Point> singular_point;
};

/// Per-cell matrices. Local primal vector: [v_K (nc), v_S0, v_S1, v_S2 (nf each)],
/// local dual vector: [tau_x (nk), tau_y (nk), tau_S0, tau_S1, tau_S2], where
/// S_i is the face of local edge i.
struct CellOperators
{
    CellBasis basis;                       // degree k+1
    Eigen::MatrixXd grad;                  // 2nk x (nc-1): grad phi_j, j >= 1, in P_k^2
    Eigen::MatrixXd grad_gram_inv;         // (grad^T grad)^{-1}
    Eigen::MatrixXd D;                     // 2nk x nloc
    Eigen::MatrixXd R;                     // nc x nloc
    Eigen::MatrixXd div;                   // nk x ndual
    Eigen::MatrixXd Rstar;                 // 2nk x ndual
    Eigen::MatrixXd Zproj;                 // 2nk x 2nk
    std::array<Eigen::MatrixXd, 3> trace;  // nf x nc: int_S psi_l phi_j
    std::array<Eigen::MatrixXd, 3> diff;   // nf x nloc: v_S - Pi_S^k v_K
    std::array<double, 3> h_face{};
    std::array<int, 3> sign{};

    QuadPoints quad;                       // nonpolynomial-integrand rule
    std::vector<Eigen::VectorXd> quad_phi; // P_k basis values at quad points
};

/// Face quadrature data for nonlinear face integrands.
struct FaceQuad
{
    std::vector<double> weights;
    Eigen::MatrixXd psi;   // nf x nq
};

class Discretization
{
public:
    Discretization(const Mesh& mesh, HhoParams params);

    const Mesh& mesh() const { return *mesh_; }
    const HhoParams& params() const { return params_; }
    int k() const { return params_.k; }
    int nc() const { return nc_; }          // dim P_{k+1}(K)
    int nk() const { return nk_; }          // dim P_k(K)
    int nf() const { return nf_; }          // dim P_k(S)
    int nloc() const { return nc_ + 3 * nf_; }
    int ndual_loc() const { return 2 * nk_ + 3 * nf_; }

    /// Global primal layout: all cell blocks, then all face blocks.
    int num_primal() const { return mesh_->num_cells() * nc_ + mesh_->num_faces() * nf_; }
    int cell_offset(int c) const { return c * nc_; }
    int face_offset(int f) const { return mesh_->num_cells() * nc_ + f * nf_; }

    /// Global dual layout: per cell [x-block, y-block], then face blocks.
    int num_dual() const { return mesh_->num_cells() * 2 * nk_ + mesh_->num_faces() * nf_; }
    int dual_cell_offset(int c) const { return c * 2 * nk_; }
    int dual_face_offset(int f) const { return mesh_->num_cells() * 2 * nk_ + f * nf_; }

    const CellOperators& ops(int c) const { return ops_[c]; }
    const FaceQuad& face_quad(int f) const { return face_quad_[f]; }
    int nonpoly_exactness() const { return exactness_; }

    /// Quadrature for data-dependent integrands; graded near the singular point.
    QuadPoints data_quadrature(int c, int exactness) const;
    QuadPoints data_face_quadrature(int f, int exactness) const;

    Eigen::VectorXd gather_primal(const Eigen::VectorXd& v, int c) const;
    Eigen::VectorXd gather_dual(const Eigen::VectorXd& tau, int c) const;
    std::vector<int> local_primal_indices(int c) const;

    Eigen::VectorXd interp_primal(const ScalarField& v) const;
    Eigen::VectorXd interp_dual(const VectorField& tau) const;

    /// Per-cell blocks stacked in cell order.
    Eigen::VectorXd gradient_reconstruction(const Eigen::VectorXd& v) const;       // 2nk per cell
    Eigen::VectorXd potential_reconstruction(const Eigen::VectorXd& v) const;      // nc per cell
    Eigen::VectorXd divergence_reconstruction(const Eigen::VectorXd& tau) const;   // nk per cell
    Eigen::VectorXd dual_potential_reconstruction(const Eigen::VectorXd& tau) const; // 2nk per cell

    /// v_S - Pi_S^k v_K for local edge i of cell c.
    Eigen::VectorXd face_residual(const Eigen::VectorXd& v, int c, int i) const;
    /// T_{K,S} v = Pi_S^k(|d|^{r-2} d) with d the face residual.
    Eigen::VectorXd trace_operator(const Eigen::VectorXd& v, int c, int i) const;

    double stab_primal(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
    double stab_primal_energy(const Eigen::VectorXd& v) const;
    double stab_dual(const Eigen::VectorXd& tau) const;

    /// ||d||_{L^q(S)}^q for d in P_k(S) given by coefficients.
    double face_lq_power(int f, const Eigen::VectorXd& d, double q) const;

private:
    const Mesh* mesh_;
    HhoParams params_;
    int nc_, nk_, nf_, exactness_;
    std::vector<CellOperators> ops_;
    std::vector<FaceQuad> face_quad_;
};

} // namespace hhodual
