#include "sectorhomog/singular_basis.hpp"

#include <cmath>

#include "sectorhomog/error.hpp"

namespace sectorhomog {

double polar_angle(const Point& x)
{
    double t = std::atan2(x.y(), x.x());
    if (t < 0.0) {
        t += 2.0 * pi;
    }
    if (t >= 2.0 * pi) {
        t = 0.0;
    }
    return t;
}

SingularFunction::SingularFunction(int n, double omega, bool dual) : n_(n), omega_(omega), dual_(dual)
{
    if (n < 1) {
        throw Error(ErrorKind::Config, "singular function index must be at least 1");
    }
    if (!(omega > 0.0) || omega > 2.0 * pi) {
        throw Error(ErrorKind::Config, "sector angle must lie in (0, 2 pi]");
    }
    rho_ = n * pi / omega;
}

double SingularFunction::value(const Point& x) const
{
    const double r = x.norm();
    if (r == 0.0) {
        if (dual_) {
            throw Error(ErrorKind::Singularity, "dual singular function evaluated at the corner");
        }
        return 0.0;
    }
    const double t = polar_angle(x);
    if (dual_) {
        return -std::pow(r, -rho_) * std::sin(rho_ * t);
    }
    return std::pow(r, rho_) * std::sin(rho_ * t);
}

TauValue SingularFunction::eval(const Point& x) const
{
    const double r = x.norm();
    if (r == 0.0) {
        throw Error(ErrorKind::Singularity, "singular function gradient requested at the corner");
    }
    const double t = polar_angle(x);
    if (dual_) {
        const double rp = std::pow(r, -rho_);
        const double c = rho_ * rp / r;
        return {-rp * std::sin(rho_ * t), Vec2(c * std::sin((rho_ + 1.0) * t), -c * std::cos((rho_ + 1.0) * t))};
    }
    const double rp = std::pow(r, rho_);
    const double c = rho_ * rp / r;
    return {rp * std::sin(rho_ * t), Vec2(c * std::sin((rho_ - 1.0) * t), c * std::cos((rho_ - 1.0) * t))};
}

Mat2 SingularFunction::hessian(const Point& x) const
{
    if (dual_) {
        throw Error(ErrorKind::Unsupported, "hessian of the dual function is not provided");
    }
    const double r = x.norm();
    if (r == 0.0) {
        throw Error(ErrorKind::Singularity, "singular function hessian requested at the corner");
    }
    const double t = polar_angle(x);
    const double mu = rho_ - 1.0;
    const double c = rho_ * mu * std::pow(r, mu - 1.0);
    const double s = std::sin((mu - 1.0) * t);
    const double k = std::cos((mu - 1.0) * t);
    Mat2 h;
    h << c * s, c * k, c * k, -c * s;
    return h;
}

double smoothstep(double t)
{
    if (t <= 0.0) {
        return 0.0;
    }
    if (t >= 1.0) {
        return 1.0;
    }
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double smoothstep_d1(double t)
{
    if (t <= 0.0 || t >= 1.0) {
        return 0.0;
    }
    return 30.0 * t * t * (t - 1.0) * (t - 1.0);
}

double smoothstep_d2(double t)
{
    if (t <= 0.0 || t >= 1.0) {
        return 0.0;
    }
    return 60.0 * t * (2.0 * t - 1.0) * (t - 1.0);
}

CutoffBump::CutoffBump(double radius) : radius_(radius)
{
    if (!(radius > 0.0)) {
        throw Error(ErrorKind::Config, "cutoff radius must be positive");
    }
}

// eta(r) = s(2 - 2r/R)
double CutoffBump::value(const Point& x) const { return smoothstep(2.0 - 2.0 * x.norm() / radius_); }

CutoffValue CutoffBump::eval(const Point& x) const
{
    const double r = x.norm();
    const double t = 2.0 - 2.0 * r / radius_;
    const double v = smoothstep(t);
    if (t <= 0.0 || t >= 1.0) {
        return {v, Vec2::Zero(), 0.0};
    }
    const double k = -2.0 / radius_;
    const double d1 = smoothstep_d1(t) * k;
    const double d2 = smoothstep_d2(t) * k * k;
    return {v, d1 * x / r, d2 + d1 / r};
}

}  // namespace sectorhomog
