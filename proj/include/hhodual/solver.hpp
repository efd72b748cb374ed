#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hhodual/density.hpp"
#include "hhodual/energy.hpp"
#include "hhodual/hho.hpp"

namespace hhodual {

/// Free unknowns: every cell coefficient and the coefficients of non-Dirichlet faces.
class DofMap
{
public:
    explicit DofMap(const Discretization& disc);

    int num_free() const { return static_cast<int>(free_to_global_.size()); }
    int num_total() const { return static_cast<int>(global_to_free_.size()); }
    int free_index(int global) const { return global_to_free_[global]; }   // -1 if fixed
    int global_index(int free) const { return free_to_global_[free]; }

    Eigen::VectorXd restrict(const Eigen::VectorXd& full) const;
    /// Writes the free entries of `full` from `free`.
    void scatter(const Eigen::VectorXd& free, Eigen::VectorXd& full) const;

private:
    std::vector<int> free_to_global_;
    std::vector<int> global_to_free_;
};

/// E_h with its derivatives over the full primal vector. Keeps references to
/// `disc` and `density`, which must outlive it.
class DiscreteEnergy
{
public:
    DiscreteEnergy(const Discretization& disc, const EnergyDensity& density, Eigen::VectorXd fh);

    const Discretization& disc() const { return *disc_; }
    const Eigen::VectorXd& fh() const { return fh_; }

    double value(const Eigen::VectorXd& v) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& v) const;
    Eigen::SparseMatrix<double> hessian(const Eigen::VectorXd& v) const;

    /// sigma_M = Pi^k D Psi(D_h v) for cell c (2nk coefficients).
    Eigen::VectorXd cell_flux(const Eigen::VectorXd& v, int c) const;

private:
    const Discretization* disc_;
    const EnergyDensity* density_;
    Eigen::VectorXd fh_;
};

struct SolverOptions
{
    double gradient_tol = 1e-10;   // relative to 1 + |E_h|
    double step_tol = 1e-14;
    int max_iterations = 1000;
    double armijo = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 40;
};

struct SolveReport
{
    int iterations = 0;
    double gradient_norm = 0.0;
    double energy = 0.0;
    int backtracks = 0;
    int levenberg_shifts = 0;
    bool converged = false;
};

/// Primal vector with Pi_S^k of the datum on Dirichlet faces and zero elsewhere.
Eigen::VectorXd dirichlet_lift(const Discretization& disc, const ScalarField* datum);

/// Damped Newton with Armijo backtracking on the free unknowns; u holds the
/// initial guess (including fixed Dirichlet values) and receives the result.
SolveReport minimize(const DiscreteEnergy& energy, const DofMap& dofs, Eigen::VectorXd& u,
                     const SolverOptions& options = {});

struct EulerLagrangeReport
{
    double max_face_residual = 0.0;
    double scale = 1.0;   // 1 + max ||Pi_S(sigma_K nu_S)||_{L2(S)}
    int worst_face = -1;
};

/// Residual of [sigma_M nu_S]_S + sum_K h_S^{-s} T_{K,S} u on every non-Dirichlet face.
EulerLagrangeReport check_euler_lagrange(const DiscreteEnergy& energy, const Eigen::VectorXd& u);

/// Transfers a solution to a refined mesh: cell polynomials restricted to the
/// children, face values averaged from adjacent cells, Dirichlet faces reset.
Eigen::VectorXd prolongate(const Discretization& coarse, const Eigen::VectorXd& u, const Discretization& fine,
                           const ScalarField* datum);

} // namespace hhodual
