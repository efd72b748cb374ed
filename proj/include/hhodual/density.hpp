#pragma once

#include <memory>
#include <string>

#include <Eigen/Core>

#include "hhodual/mesh.hpp"

namespace hhodual {

/// c1|A|^p - c2 <= Psi(A) <= c3|A|^p + c4
struct GrowthConstants
{
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
};

/// Isotropic convex density Psi(A) = w(|A|) on R^2.
class EnergyDensity
{
public:
    virtual ~EnergyDensity() = default;

    virtual std::string name() const = 0;
    virtual double growth_exponent() const = 0;
    virtual GrowthConstants growth() const = 0;
    /// False if D Psi is only piecewise smooth or set-valued somewhere.
    virtual bool smooth() const = 0;

    virtual double w(double t) const = 0;
    virtual double dw(double t) const = 0;
    virtual double d2w(double t) const = 0;
    /// w'(t)/t, continuous extension at t = 0.
    virtual double dw_over_t(double t) const = 0;
    /// Conjugate w*(s) = sup_{t >= 0} (st - w(t)).
    virtual double conjugate_radial(double s) const = 0;

    /// Density used by the a posteriori estimator (the unregularized one for Bingham).
    virtual std::shared_ptr<const EnergyDensity> unregularized() const = 0;

    double value(const Point& a) const { return w(a.norm()); }
    double conjugate(const Point& g) const { return conjugate_radial(g.norm()); }
    Point gradient(const Point& a) const;
    Eigen::Matrix2d hessian(const Point& a) const;
    double conjugate_exponent() const { const double p = growth_exponent(); return p / (p - 1.0); }
};

std::shared_ptr<const EnergyDensity> make_plaplace(double p);
/// Psi_eps(a) = mu|a|^2/2 + g sqrt(|a|^2 + eps^2); eps = 0 gives the exact Bingham density.
std::shared_ptr<const EnergyDensity> make_bingham(double mu, double g, double eps);
/// Two-material optimal design density with t1 = sqrt(2 lambda mu1/mu2), t2 = mu2 t1/mu1.
std::shared_ptr<const EnergyDensity> make_odp(double mu1, double mu2, double lambda);

/// Numerical sup_{t in [0, tmax]} (s t - w(t)) by grid search refined with golden section.
double numerical_conjugate(const EnergyDensity& density, double s, double tmax);

} // namespace hhodual
