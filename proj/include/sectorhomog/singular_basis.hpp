#pragma once

#include "sectorhomog/types.hpp"

namespace sectorhomog {

/// Polar angle of x in [0, 2 pi).
double polar_angle(const Point& x);

struct TauValue {
    double value;
    Vec2 gradient;
};

/// tau_n = r^rho sin(rho theta), rho = n pi / omega. The dual variant is
/// tau*_n = -r^(-rho) sin(rho theta).
class SingularFunction {
public:
    SingularFunction(int n, double omega, bool dual = false);

    int n() const noexcept { return n_; }
    double omega() const noexcept { return omega_; }
    double rho() const noexcept { return rho_; }
    bool dual() const noexcept { return dual_; }

    /// Value only; finite at the origin for the primal function.
    double value(const Point& x) const;

    /// Value and gradient. Throws Singularity at x = 0.
    TauValue eval(const Point& x) const;

    /// Second derivatives of the primal function. Throws Singularity at x = 0.
    Mat2 hessian(const Point& x) const;

private:
    int n_;
    double omega_;
    double rho_;
    bool dual_;
};

struct CutoffValue {
    double value;
    Vec2 gradient;
    double laplacian;
};

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3 on [0,1], clamped outside.
double smoothstep(double t);
double smoothstep_d1(double t);
double smoothstep_d2(double t);

/// Radial bump equal to 1 on r <= R/2 and 0 on r >= R.
class CutoffBump {
public:
    explicit CutoffBump(double radius);

    double radius() const noexcept { return radius_; }

    double value(const Point& x) const;
    CutoffValue eval(const Point& x) const;

private:
    double radius_;
};

}  // namespace sectorhomog
