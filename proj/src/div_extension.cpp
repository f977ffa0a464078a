#include "sectorhomog/div_extension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "sectorhomog/error.hpp"

namespace sectorhomog {

PolarField::PolarField(PolarSampler sampler, double omega) : sampler_(std::move(sampler)), omega_(omega)
{
    if (!(omega > 0.0)) {
        throw Error(ErrorKind::Config, "sector angle must be positive");
    }
    if (omega >= 2.0 * pi) {
        throw Error(ErrorKind::Unsupported, "the extension is not defined for omega = 2 pi");
    }
    alpha_ = omega / (2.0 * pi - omega);
}

PolarVector ExtendedField::reflected(double r, double theta) const
{
    const double omega = field_.omega();
    // omega * (2 pi - theta) / (2 pi - omega) hits omega and 0 exactly at the seams
    const double mapped = omega * ((2.0 * pi - theta) / (2.0 * pi - omega));
    const PolarVector h = field_(r, mapped);
    return {-field_.alpha() * h.r, h.theta};
}

PolarVector ExtendedField::operator()(double r, double theta) const
{
    double t = std::fmod(theta, 2.0 * pi);
    if (t < 0.0) {
        t += 2.0 * pi;
    }
    if (t <= field_.omega()) {
        return field_(r, t);
    }
    return reflected(r, t);
}

Vec2 ExtendedField::cartesian(const Point& x) const
{
    const double r = x.norm();
    const double t = std::atan2(x.y(), x.x());
    const PolarVector h = (*this)(r, t);
    const double c = std::cos(t), s = std::sin(t);
    return {h.r * c - h.theta * s, h.r * s + h.theta * c};
}

ExtendedField extend(const PolarField& field) { return ExtendedField(field); }

std::vector<FluxRow> flux_check(const ExtendedField& field, const std::vector<double>& radii, int n_theta)
{
    if (n_theta < 2) {
        throw Error(ErrorKind::Config, "flux check needs at least 2 angular intervals");
    }
    const int half = n_theta / 2;
    const double omega = field.base().omega();
    const double w1 = omega / half;
    const double w2 = (2.0 * pi - omega) / half;
    std::vector<FluxRow> rows;
    for (double r : radii) {
        if (!(r > 0.0)) {
            throw Error(ErrorKind::Config, "flux radii must be positive");
        }
        double s1 = 0.0, s2 = 0.0;
        for (int j = 0; j <= half; ++j) {
            const double wt = (j == 0 || j == half) ? 0.5 : 1.0;
            s1 += wt * field(r, omega * j / half).r;
            const double t = (j == half) ? 2.0 * pi : omega + (2.0 * pi - omega) * j / half;
            s2 += wt * field.reflected(r, t).r;
        }
        rows.push_back({r, w1 * s1 + w2 * s2});
    }
    return rows;
}

void write_flux_csv(std::ostream& out, const std::vector<FluxRow>& rows)
{
    out << "r,flux\n";
    char buf[96];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", row.r, row.flux);
        out << buf;
    }
}

namespace {

std::pair<double, double> divergence_terms(const ExtendedField& field, double r, double theta, double dr,
                                           double dtheta)
{
    const double rp = r + dr, rm = r - dr;
    const double radial = (rp * field(rp, theta).r - rm * field(rm, theta).r) / (2.0 * dr);
    const double angular = (field(r, theta + dtheta).theta - field(r, theta - dtheta).theta) / (2.0 * dtheta);
    return {radial / r, angular / r};
}

}  // namespace

double polar_divergence(const ExtendedField& field, double r, double theta, double dr, double dtheta)
{
    const auto [radial, angular] = divergence_terms(field, r, theta, dr, dtheta);
    return radial + angular;
}

DivergenceReport divergence_report(const ExtendedField& field, double r_min, double r_max, int n_r, int n_theta)
{
    if (!(r_min > 0.0) || !(r_max > r_min) || n_r < 2 || n_theta < 4) {
        throw Error(ErrorKind::Config, "invalid divergence grid");
    }
    const double omega = field.base().omega();
    const double dtheta = 2.0 * pi / n_theta;
    const double q = std::pow(r_max / r_min, 1.0 / (n_r - 1));
    DivergenceReport rep{0.0, 0.0, 0.0, 0};
    double scale = 0.0;
    double sum = 0.0;
    for (int i = 0; i < n_r; ++i) {
        const double r = r_min * std::pow(q, i);
        const double dr = 0.5 * r * (q - 1.0);
        for (int j = 0; j < n_theta; ++j) {
            const double t = (j + 0.5) * dtheta;
            const bool straddles = std::abs(t - omega) < dtheta || t < dtheta || 2.0 * pi - t < dtheta;
            if (straddles) {
                continue;
            }
            const auto [radial, angular] = divergence_terms(field, r, t, dr, 0.5 * dtheta);
            const double d = radial + angular;
            scale = std::max(scale, std::abs(radial) + std::abs(angular));
            rep.max_abs = std::max(rep.max_abs, std::abs(d));
            sum += d * d;
            ++rep.points;
        }
    }
    rep.rms = rep.points ? std::sqrt(sum / rep.points) : 0.0;
    rep.relative = scale > 0.0 ? rep.max_abs / scale : 0.0;
    return rep;
}

SeamReport seam_check(const ExtendedField& field, const std::vector<double>& radii)
{
    const double omega = field.base().omega();
    SeamReport rep{0.0, 0.0};
    for (double r : radii) {
        rep.omega_jump = std::max(rep.omega_jump, std::abs(field(r, omega).theta - field.reflected(r, omega).theta));
        rep.zero_jump = std::max(rep.zero_jump, std::abs(field(r, 0.0).theta - field.reflected(r, 2.0 * pi).theta));
    }
    return rep;
}

PolarSampler polar_sampler(const std::function<Vec2(const Point&)>& cartesian)
{
    return [cartesian](double r, double theta) {
        const double c = std::cos(theta), s = std::sin(theta);
        const Vec2 h = cartesian(Point(r * c, r * s));
        return PolarVector{h.x() * c + h.y() * s, -h.x() * s + h.y() * c};
    };
}

}  // namespace sectorhomog
