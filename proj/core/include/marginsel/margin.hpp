#pragma once

#include <span>
#include <utility>
#include <vector>

namespace marginsel {

/// A convex nondecreasing phi on [0, inf) with phi(0) = 0.
///
/// Two kinds are supported: the power family phi(x) = (h x^2)^kappa with
/// h > 0 (h = +inf allowed, meaning no function of the model moves away
/// from f*) and kappa >= 1, and a tabulated piecewise-linear phi given by
/// knots, extended linearly past the last knot.
class MarginFunction {
public:
  enum class Kind { power, tabulated };

  static MarginFunction power(double h, double kappa = 1.0);
  /// Knots (y_i, phi_i) with y_0 = 0, phi_0 = 0 and strictly increasing
  /// y. Convexity and monotonicity are checked; std::invalid_argument
  /// otherwise.
  static MarginFunction tabulated(std::vector<std::pair<double, double>> knots);

  Kind kind() const noexcept { return kind_; }
  double h() const noexcept { return h_; }
  double kappa() const noexcept { return kappa_; }
  std::span<const std::pair<double, double>> knots() const noexcept { return knots_; }

  double operator()(double y) const;

  /// phi*(x) = sup_{y >= 0} { x y - phi(y) } for x >= 0. Closed form for
  /// the power kind; for the tabulated kind, maximum over y = 0 and a
  /// geometric grid of kConjugateGridPoints points on [1e-6, 1e3].
  double conjugate(double x) const;

  static constexpr int kConjugateGridPoints = 2000;
  static constexpr double kConjugateGridMin = 1e-6;
  static constexpr double kConjugateGridMax = 1e3;

private:
  MarginFunction() = default;

  Kind kind_ = Kind::power;
  double h_ = 1.0;
  double kappa_ = 1.0;
  std::vector<std::pair<double, double>> knots_;
};

} // namespace marginsel
