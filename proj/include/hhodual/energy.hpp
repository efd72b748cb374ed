#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "hhodual/basis.hpp"
#include "hhodual/density.hpp"
#include "hhodual/hho.hpp"

namespace hhodual {

/// Exact solution data; on the boundary it also provides the Dirichlet datum.
struct ExactSolution
{
    ScalarField u;
    VectorField grad_u;
    VectorField flux;   // D Psi(grad u)
};

struct Problem
{
    std::string name;
    std::shared_ptr<const EnergyDensity> density;   // used by the discrete solve
    ScalarField f;
    bool f_constant = false;
    /// Dirichlet datum and exact solution; absent means homogeneous data.
    std::optional<ExactSolution> exact;
    std::optional<Point> singular_point;
};

Problem plaplace_problem(double p = 4.0);
Problem bingham_problem(double mu = 1.0, double g = 0.2, double eps = 1e-4, double f = 10.0);
Problem odp_problem(double mu1 = 1.0, double mu2 = 2.0, double lambda = 0.0084, double f = 1.0);

/// f_h = Pi_M^k f, nk coefficients per cell.
Eigen::VectorXd project_source(const Discretization& disc, const ScalarField& f);

/// int Psi(D_h v) - int f_h Pi^k v_M + s_h(v)/r
double discrete_energy(const Discretization& disc, const EnergyDensity& density, const Eigen::VectorXd& fh,
                       const Eigen::VectorXd& v);

/// ||div_h tau + f_h||_{L2}
double dual_feasibility_residual(const Discretization& disc, const Eigen::VectorXd& fh, const Eigen::VectorXd& tau);

inline constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

/// -int Psi*(R*_h tau) - gamma_h(tau)/r' (+ sum over Dirichlet faces of int u_S tau_S
/// when `dirichlet` holds primal dofs carrying the boundary datum), or
/// kMinusInfinity if div_h tau + f_h != 0 beyond 1e-9 (1 + ||f_h||).
double discrete_dual_energy(const Discretization& disc, const EnergyDensity& density, const Eigen::VectorXd& fh,
                            const Eigen::VectorXd& tau, const Eigen::VectorXd* dirichlet = nullptr);

} // namespace hhodual
