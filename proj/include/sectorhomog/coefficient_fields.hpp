#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "sectorhomog/types.hpp"

namespace sectorhomog {

/// Unit-periodic scalar profile on the reference cell [0,1)^2.
using CellProfile = std::function<double(const Point& y)>;

/// y -> exp(kappa sin(2 pi y1) sin(2 pi y2)).
CellProfile default_periodic_cell(double kappa = 1.5);

/// Two-phase laminate: `first` on frac(y1) < 1/2, `second` elsewhere.
CellProfile laminate_cell(double first, double second);

struct ConstantCoeff {
    Mat2 value;
};

/// a(x) = profile(S^T x / epsilon) / normalization * Id, S the rotation by `rotation` radians.
struct RotatedPeriodicCoeff {
    CellProfile profile;
    double rotation = 0.0;
    double epsilon = 1.0;
    double normalization = 1.0;
    std::string label;
};

/// Squares of side epsilon carrying sqrt(contrast) or 1/sqrt(contrast).
/// seed == 0 gives the regular two-colour board (period 2 squares); any other
/// seed draws an i.i.d. fair pattern on a periodic block of `random_tiles` squares.
struct CheckerboardCoeff {
    double contrast = 4.0;
    double epsilon = 1.0;
    std::uint64_t seed = 0;
    int tiles = 2;
    std::vector<std::uint8_t> high;  // tiles*tiles flags, row-major in (i1, i2)
};

/// Heterogeneous coefficient field a : R^2 -> SPD(2).
class CoeffField {
public:
    static constexpr int random_tiles = 16;

    static CoeffField constant(const Mat2& value);
    static CoeffField identity() { return constant(Mat2::Identity()); }
    static CoeffField rotated_periodic(CellProfile profile, double rotation, double epsilon,
                                       double normalization = 1.0, std::string label = {});
    static CoeffField checkerboard(double contrast, double epsilon, std::uint64_t seed = 0);

    /// Value at a physical point.
    Mat2 operator()(const Point& x) const;

    /// Value in un-rotated unit-cell coordinates y in [0,1)^2 (one full period).
    Mat2 cell_value(const Point& y) const;

    /// Length of one period in physical units; 0 for constant fields.
    double period() const;

    /// Oscillation scale epsilon; 0 for constant fields.
    double epsilon() const;

    double rotation() const;

    bool is_constant() const { return std::holds_alternative<ConstantCoeff>(variant_); }
    bool is_scalar() const;

    /// Ellipticity constant: eigenvalues of a(x) lie in [lambda, 1/lambda].
    double lambda() const noexcept { return lambda_; }

    /// Same field divided by `c`.
    CoeffField divided_by(double c) const;

    /// Same cell profile, new oscillation scale.
    CoeffField with_epsilon(double epsilon) const;

    const auto& variant() const noexcept { return variant_; }

    std::string describe() const;

private:
    using Variant = std::variant<ConstantCoeff, RotatedPeriodicCoeff, CheckerboardCoeff>;
    explicit CoeffField(Variant v);
    void compute_lambda();

    Variant variant_;
    double lambda_ = 1.0;
};

/// Divide the field by c = trace(abar)/2 so that its homogenized matrix becomes Id.
/// Throws NotNormalizable when abar is too far from a multiple of Id.
CoeffField normalize_to_identity(const CoeffField& field, const Mat2& abar);

struct EllipticityBounds {
    double min_eigenvalue;
    double max_eigenvalue;
    double max_asymmetry;
};

/// Eigenvalue range over random samples in the box [-extent, extent]^2.
EllipticityBounds sample_ellipticity(const CoeffField& field, std::size_t samples, std::uint64_t seed,
                                     double extent = 1.0);

}  // namespace sectorhomog
