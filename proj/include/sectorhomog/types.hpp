#pragma once

#include <Eigen/Dense>
#include <functional>
#include <numbers>

namespace sectorhomog {

using Point = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

using ScalarFunction = std::function<double(const Point&)>;
using VectorFunction = std::function<Vec2(const Point&)>;

inline constexpr double pi = std::numbers::pi;

}  // namespace sectorhomog
