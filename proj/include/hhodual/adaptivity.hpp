#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "hhodual/energy.hpp"
#include "hhodual/postprocess.hpp"

namespace hhodual {

struct ExactErrors
{
    double grad = 0.0;    // ||grad(u - v0)||_p
    double flux = 0.0;    // ||sigma - D Psi(grad v0)||_{p'}
    double quasi = 0.0;   // ||(|grad u| + |grad v0|)^{(p-2)/2} grad(u - v0)||_2^2
    double energy_u = 0.0;   // E(u)
};

struct EstimateReport
{
    std::vector<double> eta;        // clamped, >= 0
    std::vector<double> indicator;  // eta plus the local oscillation used for marking
    double eta_sum = 0.0;
    double energy_v0 = 0.0;         // E(v0)
    double energy_sigma_v0 = 0.0;   // E_{sigma0}(v0)
    double dual_energy = 0.0;       // E*_{sigma0}(sigma0)
    double gap = 0.0;               // E_{sigma0}(v0) - E*_{sigma0}(sigma0)
    double leb = 0.0;
    double osc = 0.0;               // ||h (f - f_h)||_{p'}
    double osc_p2 = 0.0;            // osc_p(f~, v0, M)^2
    double c_poincare = 0.0;
    double c_du = 0.0;
    double div_residual = 0.0;      // ||div sigma0 + f_h||_{L2}
    double min_eta_raw = 0.0;
    std::optional<ExactErrors> errors;
};

class EstimatorError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Convex-domain Poincare constant used in the lower energy bound.
double poincare_constant(double p);

/// Positive root of c1 t^p - cp t fnorm - c2 area (bisection).
double du_bound(double c1, double c2, double p, double cp, double fnorm, double area);

EstimateReport estimate(const Discretization& disc, const Problem& problem, const Eigen::VectorXd& fh,
                        const RTField& sigma0, const ConformingField& v0);

/// Minimal set with sum >= theta * total, greedy on eta descending, ties by index.
std::vector<int> dorfler_mark(const std::vector<double>& eta, double theta);

} // namespace hhodual
