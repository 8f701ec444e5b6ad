#include "marginsel/margin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace marginsel {

MarginFunction MarginFunction::power(double h, double kappa) {
  if (!(h > 0.0)) throw std::invalid_argument("MarginFunction::power: h must be > 0");
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw std::invalid_argument("MarginFunction::power: kappa must be >= 1");
  MarginFunction phi;
  phi.kind_ = Kind::power;
  phi.h_ = h;
  phi.kappa_ = kappa;
  return phi;
}

MarginFunction MarginFunction::tabulated(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw std::invalid_argument("MarginFunction::tabulated: need at least two knots");
  if (knots.front().first != 0.0 || knots.front().second != 0.0) {
    throw std::invalid_argument("MarginFunction::tabulated: first knot must be (0, 0)");
  }
  double prev_slope = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double dy = knots[i].first - knots[i - 1].first;
    if (!(dy > 0.0)) throw std::invalid_argument("MarginFunction::tabulated: knots must be strictly increasing");
    const double slope = (knots[i].second - knots[i - 1].second) / dy;
    if (slope < -1e-12) throw std::invalid_argument("MarginFunction::tabulated: not nondecreasing");
    if (slope < prev_slope - 1e-12) throw std::invalid_argument("MarginFunction::tabulated: not convex");
    prev_slope = slope;
  }
  MarginFunction phi;
  phi.kind_ = Kind::tabulated;
  phi.knots_ = std::move(knots);
  return phi;
}

double MarginFunction::operator()(double y) const {
  if (y < 0.0) throw std::invalid_argument("MarginFunction: negative argument");
  if (kind_ == Kind::power) {
    if (std::isinf(h_)) return y == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::pow(h_ * y * y, kappa_);
  }
  auto it = std::upper_bound(knots_.begin(), knots_.end(), y,
                             [](double v, const std::pair<double, double>& k) { return v < k.first; });
  std::size_t hi = it == knots_.end() ? knots_.size() - 1 : static_cast<std::size_t>(it - knots_.begin());
  if (hi == 0) hi = 1;
  const auto& [y0, p0] = knots_[hi - 1];
  const auto& [y1, p1] = knots_[hi];
  return p0 + (p1 - p0) * (y - y0) / (y1 - y0);
}

double MarginFunction::conjugate(double x) const {
  if (x < 0.0) throw std::invalid_argument("MarginFunction::conjugate: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (kind_ == Kind::power) {
    if (std::isinf(h_)) return 0.0;
    // Stationary point of x y - h^kappa y^(2 kappa).
    const double two_k = 2.0 * kappa_;
    const double y = std::pow(x / (two_k * std::pow(h_, kappa_)), 1.0 / (two_k - 1.0));
    return x * y * (1.0 - 1.0 / two_k);
  }
  double best = 0.0;
  const double log_lo = std::log(kConjugateGridMin);
  const double step = (std::log(kConjugateGridMax) - log_lo) / (kConjugateGridPoints - 1);
  for (int i = 0; i < kConjugateGridPoints; ++i) {
    const double y = std::exp(log_lo + step * i);
    best = std::max(best, x * y - (*this)(y));
  }
  return best;
}

} // namespace marginsel
