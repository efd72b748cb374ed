#include "hhodual/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hhodual {

Point EnergyDensity::gradient(const Point& a) const
{
    const double t = a.norm();
    if (t == 0.0) return Point::Zero();
    return dw(t) / t * a;
}

Eigen::Matrix2d EnergyDensity::hessian(const Point& a) const
{
    const double t = a.norm();
    if (t == 0.0) return dw_over_t(0.0) * Eigen::Matrix2d::Identity();
    const Point e = a / t;
    const Eigen::Matrix2d radial = e * e.transpose();
    return d2w(t) * radial + dw_over_t(t) * (Eigen::Matrix2d::Identity() - radial);
}

namespace {

class PLaplace final : public EnergyDensity
{
public:
    explicit PLaplace(double p) : p_(p)
    {
        if (!(p > 1.0)) throw std::invalid_argument("p-Laplace exponent must exceed 1");
    }
    std::string name() const override
    {
        std::ostringstream os;
        os << "plaplace(p=" << p_ << ")";
        return os.str();
    }
    double growth_exponent() const override { return p_; }
    GrowthConstants growth() const override { return {1.0 / p_, 0.0, 1.0 / p_, 0.0}; }
    bool smooth() const override { return p_ >= 2.0; }
    double w(double t) const override { return std::pow(t, p_) / p_; }
    double dw(double t) const override { return std::pow(t, p_ - 1.0); }
    double d2w(double t) const override { return (p_ - 1.0) * std::pow(std::max(t, kFloor), p_ - 2.0); }
    double dw_over_t(double t) const override { return std::pow(std::max(t, kFloor), p_ - 2.0); }
    double conjugate_radial(double s) const override
    {
        const double q = p_ / (p_ - 1.0);
        return std::pow(s, q) / q;
    }
    std::shared_ptr<const EnergyDensity> unregularized() const override { return std::make_shared<PLaplace>(p_); }

private:
    // keeps D^2 Psi finite at 0 for p < 2
    static constexpr double kFloor = 1e-12;
    double p_;
};

class Bingham final : public EnergyDensity
{
public:
    Bingham(double mu, double g, double eps) : mu_(mu), g_(g), eps_(eps)
    {
        if (!(mu > 0.0) || !(g > 0.0) || !(eps >= 0.0))
            throw std::invalid_argument("Bingham density needs mu > 0, g > 0, eps >= 0");
    }
    std::string name() const override
    {
        std::ostringstream os;
        os << "bingham(mu=" << mu_ << ",g=" << g_ << ",eps=" << eps_ << ")";
        return os.str();
    }
    double growth_exponent() const override { return 2.0; }
    GrowthConstants growth() const override { return {mu_ / 2.0, 0.0, mu_ / 2.0 + g_ / 2.0, g_ / 2.0 + g_ * eps_}; }
    bool smooth() const override { return eps_ > 0.0; }
    double w(double t) const override { return mu_ * t * t / 2.0 + g_ * std::hypot(t, eps_); }
    double dw(double t) const override
    {
        if (eps_ == 0.0) return t > 0.0 ? mu_ * t + g_ : 0.0;
        return mu_ * t + g_ * t / std::hypot(t, eps_);
    }
    double d2w(double t) const override
    {
        if (eps_ == 0.0) return mu_;
        const double r = std::hypot(t, eps_);
        return mu_ + g_ * eps_ * eps_ / (r * r * r);
    }
    double dw_over_t(double t) const override
    {
        if (eps_ == 0.0) return t > 0.0 ? mu_ + g_ / t : mu_;
        return mu_ + g_ / std::hypot(t, eps_);
    }
    double conjugate_radial(double s) const override
    {
        if (eps_ == 0.0) return s <= g_ ? 0.0 : (s - g_) * (s - g_) / (2.0 * mu_);
        // maximizer solves w'(t) = s; w' is increasing with w'(t) >= mu t
        double lo = 0.0, hi = s / mu_;
        double t = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double res = dw(t) - s;
            if (res > 0.0) hi = t;
            else lo = t;
            const double step = res / d2w(t);
            double next = t - step;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - t) <= 1e-17 * (1.0 + t)) {
                t = next;
                break;
            }
            t = next;
        }
        return s * t - w(t);
    }
    std::shared_ptr<const EnergyDensity> unregularized() const override
    {
        return std::make_shared<Bingham>(mu_, g_, 0.0);
    }

private:
    double mu_, g_, eps_;
};

class OptimalDesign final : public EnergyDensity
{
public:
    OptimalDesign(double mu1, double mu2, double lambda) : mu1_(mu1), mu2_(mu2), lambda_(lambda)
    {
        if (!(mu1 > 0.0) || !(mu2 > mu1) || !(lambda > 0.0))
            throw std::invalid_argument("optimal design density needs 0 < mu1 < mu2 and lambda > 0");
        t1_ = std::sqrt(2.0 * lambda * mu1 / mu2);
        t2_ = mu2 * t1_ / mu1;
        if (!(t1_ > 0.0 && t1_ < t2_)) throw std::invalid_argument("optimal design needs 0 < t1 < t2");
        // guard the closed-form conjugate against a brute-force sup
        for (double s : {0.0, 0.5 * t1_ * mu2_, t1_ * mu2_, 2.0 * t1_ * mu2_, 1.0, 5.0}) {
            const double exact = conjugate_radial(s);
            const double numeric = numerical_conjugate(*this, s, 2.0 * std::max(s / mu1_, t2_));
            if (std::abs(exact - numeric) > 1e-9 * (1.0 + std::abs(exact)))
                throw std::logic_error("optimal design conjugate does not match numerical supremum");
        }
    }
    std::string name() const override
    {
        std::ostringstream os;
        os << "odp(mu1=" << mu1_ << ",mu2=" << mu2_ << ",lambda=" << lambda_ << ")";
        return os.str();
    }
    double growth_exponent() const override { return 2.0; }
    GrowthConstants growth() const override { return {mu1_ / 2.0, 0.0, mu2_ / 2.0, 0.0}; }
    bool smooth() const override { return false; }
    double t1() const { return t1_; }
    double t2() const { return t2_; }
    double w(double t) const override
    {
        if (t <= t1_) return mu2_ * t * t / 2.0;
        if (t <= t2_) return t1_ * mu2_ * (t - t1_ / 2.0);
        return mu1_ * t * t / 2.0 + t1_ * mu2_ * (t2_ / 2.0 - t1_ / 2.0);
    }
    double dw(double t) const override
    {
        if (t <= t1_) return mu2_ * t;
        if (t <= t2_) return t1_ * mu2_;
        return mu1_ * t;
    }
    double d2w(double t) const override
    {
        if (t <= t1_) return mu2_;
        if (t <= t2_) return 0.0;
        return mu1_;
    }
    double dw_over_t(double t) const override
    {
        if (t <= t1_) return mu2_;
        if (t <= t2_) return t1_ * mu2_ / t;
        return mu1_;
    }
    double conjugate_radial(double s) const override
    {
        if (s <= t1_ * mu2_) return s * s / (2.0 * mu2_);
        return s * s / (2.0 * mu1_) - t1_ * mu2_ * (t2_ - t1_) / 2.0;
    }
    std::shared_ptr<const EnergyDensity> unregularized() const override
    {
        return std::make_shared<OptimalDesign>(mu1_, mu2_, lambda_);
    }

private:
    double mu1_, mu2_, lambda_, t1_, t2_;
};

} // namespace

double numerical_conjugate(const EnergyDensity& density, double s, double tmax)
{
    const int n = 20000;
    int best = 0;
    double best_val = -density.w(0.0);
    for (int i = 1; i <= n; ++i) {
        const double t = tmax * i / n;
        const double val = s * t - density.w(t);
        if (val > best_val) {
            best_val = val;
            best = i;
        }
    }
    double a = tmax * std::max(best - 1, 0) / n;
    double b = tmax * std::min(best + 1, n) / n;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    auto f = [&](double t) { return s * t - density.w(t); };
    for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + b); ++it) {
        const double c = b - phi * (b - a);
        const double d = a + phi * (b - a);
        if (f(c) >= f(d)) b = d;
        else a = c;
    }
    return std::max(best_val, f(0.5 * (a + b)));
}

std::shared_ptr<const EnergyDensity> make_plaplace(double p) { return std::make_shared<PLaplace>(p); }

std::shared_ptr<const EnergyDensity> make_bingham(double mu, double g, double eps)
{
    return std::make_shared<Bingham>(mu, g, eps);
}

std::shared_ptr<const EnergyDensity> make_odp(double mu1, double mu2, double lambda)
{
    return std::make_shared<OptimalDesign>(mu1, mu2, lambda);
}

} // namespace hhodual
