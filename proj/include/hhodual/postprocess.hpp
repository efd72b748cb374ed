#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "hhodual/energy.hpp"
#include "hhodual/hho.hpp"
#include "hhodual/solver.hpp"

namespace hhodual {

/// sigma_h = (sigma_M, sigma_Sigma) built from a discrete minimizer.
Eigen::VectorXd dual_traces(const DiscreteEnergy& energy, const Eigen::VectorXd& u);

/// Local spanning set of RT_k(K): P_k(K)^2 followed by z * (homogeneous degree-k
/// monomials), z = (x - x_K)/h_K.
class RTLocalBasis
{
public:
    RTLocalBasis() = default;
    RTLocalBasis(const Point& center, double scale, int k);

    int dim() const { return (k_ + 1) * (k_ + 3); }
    Eigen::Matrix2Xd values(const Point& x) const;
    Eigen::VectorXd divergence(const Point& x) const;

private:
    Point center_ = Point::Zero();
    double scale_ = 1.0;
    int k_ = 0;
};

/// Piecewise RT_k field with moments stored per face relative to nu_S.
class RTField
{
public:
    RTField() = default;
    RTField(const Mesh& mesh, int k);

    int k() const { return k_; }
    Point value(int c, const Point& x) const;
    double divergence(int c, const Point& x) const;
    Eigen::VectorXd& coefficients(int c) { return coeffs_[c]; }
    const Eigen::VectorXd& coefficients(int c) const { return coeffs_[c]; }
    const RTLocalBasis& basis(int c) const { return basis_[c]; }

private:
    int k_ = 0;
    std::vector<RTLocalBasis> basis_;
    std::vector<Eigen::VectorXd> coeffs_;
};

/// sigma_0 in RT_k with face moments sigma_S and interior moments Pi^{k-1} sigma_M.
RTField rt_reconstruct(const Discretization& disc, const Eigen::VectorXd& sigma_h);

/// Continuous piecewise P_{k+1} function, optionally shifted by the exact
/// boundary extension: v_0 = poly + u.
class ConformingField
{
public:
    ConformingField() = default;
    ConformingField(const Discretization& disc, std::vector<Eigen::VectorXd> coeffs, std::optional<ExactSolution> shift);

    double value(int c, const Point& x) const;
    Point gradient(int c, const Point& x) const;
    const Eigen::VectorXd& coefficients(int c) const { return coeffs_[c]; }

private:
    const Discretization* disc_ = nullptr;
    std::vector<Eigen::VectorXd> coeffs_;
    std::optional<ExactSolution> shift_;
};

/// Lagrange nodes of degree m = k+1: vertices, then m-1 per face in face
/// orientation, then interior nodes per cell.
struct LagrangeNodes
{
    int degree = 1;
    int num_nodes = 0;
    std::vector<std::vector<int>> cell_nodes;        // global id per local node
    std::vector<std::vector<Point>> cell_points;     // coordinates per local node
    std::vector<char> dirichlet;                     // node lies on a Dirichlet face
};

LagrangeNodes lagrange_nodes(const Mesh& mesh, int degree);

/// Unweighted nodal average of u_M; Dirichlet nodes are zero. With `exact`,
/// the average is taken of u_M - Pi^{k+1} u and u is added back.
ConformingField nodal_average(const Discretization& disc, const Eigen::VectorXd& u,
                              const std::optional<ExactSolution>& exact);

} // namespace hhodual
