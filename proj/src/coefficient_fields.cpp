#include "sectorhomog/coefficient_fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "sectorhomog/error.hpp"

namespace sectorhomog {

namespace {

double frac(double t) { return t - std::floor(t); }

std::vector<std::uint8_t> checkerboard_pattern(std::uint64_t seed, int tiles)
{
    std::vector<std::uint8_t> high(static_cast<std::size_t>(tiles * tiles));
    if (seed == 0) {
        for (int i = 0; i < tiles; ++i) {
            for (int j = 0; j < tiles; ++j) {
                high[static_cast<std::size_t>(i * tiles + j)] = ((i + j) % 2 == 0) ? 1 : 0;
            }
        }
        return high;
    }
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    for (auto& h : high) {
        h = coin(rng) ? 1 : 0;
    }
    return high;
}

}  // namespace

CellProfile default_periodic_cell(double kappa)
{
    return [kappa](const Point& y) {
        return std::exp(kappa * std::sin(2.0 * pi * y.x()) * std::sin(2.0 * pi * y.y()));
    };
}

CellProfile laminate_cell(double first, double second)
{
    return [first, second](const Point& y) { return frac(y.x()) < 0.5 ? first : second; };
}

CoeffField::CoeffField(Variant v) : variant_(std::move(v)) { compute_lambda(); }

CoeffField CoeffField::constant(const Mat2& value)
{
    if ((value - value.transpose()).norm() > 1e-14 * value.norm()) {
        throw Error(ErrorKind::Config, "constant coefficient must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat2> eig(value);
    if (eig.eigenvalues().minCoeff() <= 0.0) {
        throw Error(ErrorKind::Config, "constant coefficient must be positive definite");
    }
    return CoeffField(ConstantCoeff{value});
}

CoeffField CoeffField::rotated_periodic(CellProfile profile, double rotation, double epsilon,
                                       double normalization, std::string label)
{
    if (!(epsilon > 0.0)) {
        throw Error(ErrorKind::Config, "epsilon must be positive");
    }
    if (!(normalization > 0.0)) {
        throw Error(ErrorKind::Config, "normalization must be positive");
    }
    return CoeffField(RotatedPeriodicCoeff{std::move(profile), rotation, epsilon, normalization, std::move(label)});
}

CoeffField CoeffField::checkerboard(double contrast, double epsilon, std::uint64_t seed)
{
    if (!(contrast > 1.0)) {
        throw Error(ErrorKind::Config, "checkerboard contrast must exceed 1");
    }
    if (!(epsilon > 0.0)) {
        throw Error(ErrorKind::Config, "epsilon must be positive");
    }
    const int tiles = seed == 0 ? 2 : random_tiles;
    return CoeffField(CheckerboardCoeff{contrast, epsilon, seed, tiles, checkerboard_pattern(seed, tiles)});
}

Mat2 CoeffField::cell_value(const Point& y) const
{
    return std::visit(
        [&](const auto& c) -> Mat2 {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConstantCoeff>) {
                return c.value;
            } else if constexpr (std::is_same_v<T, RotatedPeriodicCoeff>) {
                const Point yy(frac(y.x()), frac(y.y()));
                return (c.profile(yy) / c.normalization) * Mat2::Identity();
            } else {
                const int i = std::min(c.tiles - 1, static_cast<int>(frac(y.x()) * c.tiles));
                const int j = std::min(c.tiles - 1, static_cast<int>(frac(y.y()) * c.tiles));
                const double s = std::sqrt(c.contrast);
                const bool hi = c.high[static_cast<std::size_t>(i * c.tiles + j)] != 0;
                return (hi ? s : 1.0 / s) * Mat2::Identity();
            }
        },
        variant_);
}

Mat2 CoeffField::operator()(const Point& x) const
{
    return std::visit(
        [&](const auto& c) -> Mat2 {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConstantCoeff>) {
                return c.value;
            } else if constexpr (std::is_same_v<T, RotatedPeriodicCoeff>) {
                // S^T x / epsilon
                const double cs = std::cos(c.rotation);
                const double sn = std::sin(c.rotation);
                const Point y((cs * x.x() + sn * x.y()) / c.epsilon, (-sn * x.x() + cs * x.y()) / c.epsilon);
                return (c.profile(Point(frac(y.x()), frac(y.y()))) / c.normalization) * Mat2::Identity();
            } else {
                const double period = c.epsilon * c.tiles;
                return cell_value(x / period);
            }
        },
        variant_);
}

double CoeffField::period() const
{
    return std::visit(
        [](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConstantCoeff>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, RotatedPeriodicCoeff>) {
                return c.epsilon;
            } else {
                return c.epsilon * c.tiles;
            }
        },
        variant_);
}

double CoeffField::epsilon() const
{
    return std::visit(
        [](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConstantCoeff>) {
                return 0.0;
            } else {
                return c.epsilon;
            }
        },
        variant_);
}

double CoeffField::rotation() const
{
    if (const auto* p = std::get_if<RotatedPeriodicCoeff>(&variant_)) {
        return p->rotation;
    }
    return 0.0;
}

bool CoeffField::is_scalar() const
{
    if (const auto* c = std::get_if<ConstantCoeff>(&variant_)) {
        return c->value(0, 1) == 0.0 && c->value(0, 0) == c->value(1, 1);
    }
    return true;
}

CoeffField CoeffField::divided_by(double c) const
{
    if (!(c > 0.0)) {
        throw Error(ErrorKind::Config, "normalization constant must be positive");
    }
    return std::visit(
        [&](const auto& v) -> CoeffField {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantCoeff>) {
                return CoeffField(ConstantCoeff{v.value / c});
            } else if constexpr (std::is_same_v<T, RotatedPeriodicCoeff>) {
                T copy = v;
                copy.normalization *= c;
                return CoeffField(std::move(copy));
            } else {
                // express as a rotated-periodic field over the same pattern
                auto pattern = std::make_shared<CheckerboardCoeff>(v);
                CellProfile profile = [pattern](const Point& y) {
                    const int i = std::min(pattern->tiles - 1, static_cast<int>(y.x() * pattern->tiles));
                    const int j = std::min(pattern->tiles - 1, static_cast<int>(y.y() * pattern->tiles));
                    const double s = std::sqrt(pattern->contrast);
                    return pattern->high[static_cast<std::size_t>(i * pattern->tiles + j)] ? s : 1.0 / s;
                };
                return CoeffField(RotatedPeriodicCoeff{std::move(profile), 0.0, v.epsilon * v.tiles, c,
                                                       "checkerboard"});
            }
        },
        variant_);
}

CoeffField CoeffField::with_epsilon(double epsilon) const
{
    if (!(epsilon > 0.0)) {
        throw Error(ErrorKind::Config, "epsilon must be positive");
    }
    return std::visit(
        [&](const auto& v) -> CoeffField {
            using T = std::decay_t<decltype(v)>;
            T copy = v;
            if constexpr (!std::is_same_v<T, ConstantCoeff>) {
                copy.epsilon = epsilon;
            }
            return CoeffField(std::move(copy));
        },
        variant_);
}

void CoeffField::compute_lambda()
{
    double lo = 0.0, hi = 0.0;
    if (const auto* c = std::get_if<ConstantCoeff>(&variant_)) {
        Eigen::SelfAdjointEigenSolver<Mat2> eig(c->value);
        lo = eig.eigenvalues().minCoeff();
        hi = eig.eigenvalues().maxCoeff();
    } else if (const auto* cb = std::get_if<CheckerboardCoeff>(&variant_)) {
        lo = 1.0 / std::sqrt(cb->contrast);
        hi = std::sqrt(cb->contrast);
    } else {
        // sample the cell profile on a lattice that contains the quarter points
        const int n = 256;
        lo = std::numeric_limits<double>::max();
        hi = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double v = cell_value(Point(static_cast<double>(i) / n, static_cast<double>(j) / n))(0, 0);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    lambda_ = std::min(lo, 1.0 / hi);
}

std::string CoeffField::describe() const
{
    std::ostringstream out;
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConstantCoeff>) {
                out << "constant[" << c.value(0, 0) << "," << c.value(0, 1) << ";" << c.value(1, 0) << ","
                    << c.value(1, 1) << "]";
            } else if constexpr (std::is_same_v<T, RotatedPeriodicCoeff>) {
                out << "periodic[" << (c.label.empty() ? "custom" : c.label) << ",rotation=" << c.rotation
                    << ",epsilon=" << c.epsilon << ",normalization=" << c.normalization << "]";
            } else {
                out << "checkerboard[contrast=" << c.contrast << ",epsilon=" << c.epsilon << ",seed=" << c.seed
                    << ",tiles=" << c.tiles << "]";
            }
        },
        variant_);
    return out.str();
}

CoeffField normalize_to_identity(const CoeffField& field, const Mat2& abar)
{
    const double trace = abar.trace();
    const double anisotropy = std::abs(abar(0, 0) - abar(1, 1)) + 2.0 * std::abs(abar(0, 1));
    if (!(trace > 0.0) || anisotropy > 0.1 * trace) {
        std::ostringstream msg;
        msg << "homogenized matrix is not close to a multiple of Id (anisotropy " << anisotropy << ", trace "
            << trace << ")";
        throw Error(ErrorKind::NotNormalizable, msg.str());
    }
    return field.divided_by(0.5 * trace);
}

EllipticityBounds sample_ellipticity(const CoeffField& field, std::size_t samples, std::uint64_t seed,
                                     double extent)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-extent, extent);
    EllipticityBounds b{std::numeric_limits<double>::max(), 0.0, 0.0};
    for (std::size_t s = 0; s < samples; ++s) {
        const Point x(u(rng), u(rng));
        const Mat2 a = field(x);
        b.max_asymmetry = std::max(b.max_asymmetry, std::abs(a(0, 1) - a(1, 0)));
        Eigen::SelfAdjointEigenSolver<Mat2> eig(a);
        b.min_eigenvalue = std::min(b.min_eigenvalue, eig.eigenvalues().minCoeff());
        b.max_eigenvalue = std::max(b.max_eigenvalue, eig.eigenvalues().maxCoeff());
    }
    return b;
}

}  // namespace sectorhomog
