#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "sectorhomog/types.hpp"

namespace sectorhomog {

/// Polar components (H_r, H_theta).
struct PolarVector {
    double r;
    double theta;
};

using PolarSampler = std::function<PolarVector(double r, double theta)>;

/// Vector field on the sector 0 < theta < omega, omega in (0, 2 pi).
class PolarField {
public:
    PolarField(PolarSampler sampler, double omega);

    double omega() const noexcept { return omega_; }
    /// omega / (2 pi - omega)
    double alpha() const noexcept { return alpha_; }

    PolarVector operator()(double r, double theta) const { return sampler_(r, theta); }

private:
    PolarSampler sampler_;
    double omega_;
    double alpha_;
};

/// H on [0, omega]; (-alpha H_r, H_theta)(r, alpha (2 pi - theta)) on (omega, 2 pi).
class ExtendedField {
public:
    explicit ExtendedField(PolarField field) : field_(std::move(field)) {}

    const PolarField& base() const noexcept { return field_; }

    /// theta is reduced to [0, 2 pi) first.
    PolarVector operator()(double r, double theta) const;

    /// The reflected branch evaluated at any theta in [omega, 2 pi], seams included.
    PolarVector reflected(double r, double theta) const;

    /// Cartesian components at x.
    Vec2 cartesian(const Point& x) const;

private:
    PolarField field_;
};

ExtendedField extend(const PolarField& field);

struct FluxRow {
    double r;
    double flux;
};

/// Trapezoid value of the integral of the radial component over the full circle, with
/// n_theta / 2 intervals on [0, omega] and on [omega, 2 pi].
std::vector<FluxRow> flux_check(const ExtendedField& field, const std::vector<double>& radii, int n_theta);

/// `r,flux`
void write_flux_csv(std::ostream& out, const std::vector<FluxRow>& rows);

/// Central-difference polar divergence (1/r) d_r (r H_r) + (1/r) d_theta H_theta.
double polar_divergence(const ExtendedField& field, double r, double theta, double dr, double dtheta);

struct DivergenceReport {
    double max_abs;
    double rms;
    double relative;  // max_abs over the largest |radial term| + |angular term|
    std::size_t points;
};

/// Divergence on a log-spaced r grid in [r_min, r_max] and a uniform theta grid, skipping
/// stencils that straddle a seam (theta = 0 or omega). The reflected branch varies alpha
/// times faster in theta, so `relative` is the scale-free indicator; it is O(1) for a
/// field with a genuine source and O(step^2) for a divergence-free one.
DivergenceReport divergence_report(const ExtendedField& field, double r_min, double r_max, int n_r, int n_theta);

struct SeamReport {
    double omega_jump;  // max |H_theta(r, omega) - reflected H_theta(r, omega)|
    double zero_jump;   // max |H_theta(r, 0) - reflected H_theta(r, 2 pi)|
};

SeamReport seam_check(const ExtendedField& field, const std::vector<double>& radii);

/// Polar components of a Cartesian field.
PolarSampler polar_sampler(const std::function<Vec2(const Point&)>& cartesian);

}  // namespace sectorhomog
