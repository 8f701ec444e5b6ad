#include "marginsel/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace marginsel {

namespace {

// Stirling error ln(n!) - ln(sqrt(2 pi n) (n/e)^n). Exact table for n <= 15,
// asymptotic series beyond.
double stirlerr(double n) {
  static constexpr double kS0 = 1.0 / 12.0;
  static constexpr double kS1 = 1.0 / 360.0;
  static constexpr double kS2 = 1.0 / 1260.0;
  static constexpr double kS3 = 1.0 / 1680.0;
  static constexpr double kS4 = 1.0 / 1188.0;
  static constexpr double kTable[31] = {
      0.0,
      0.1534264097200273452913848,  0.0810614667953272582196702, 0.0548141210519176538961390,
      0.0413406959554092940938221,  0.03316287351993628748511048, 0.02767792568499833914878929,
      0.02374616365629749597132920, 0.02079067210376509311152277, 0.01848845053267318523077934,
      0.01664469118982119216319487, 0.01513497322191737887351255, 0.01387612882307074799874573,
      0.01281046524292022692424986, 0.01189670994589177009505572, 0.01110455975820691732662991,
      0.010411265261972096497478567, 0.009799416126158803298389475, 0.009255462182712732917728637,
      0.008768700134139385462952823, 0.008330563433362871256469318, 0.007934114564314020547248100,
      0.007573675487951840794972024, 0.007244554301320383179543912, 0.006942840107209529865664152,
      0.006665247032707682442354394, 0.006408994188004207068439631, 0.006171712263039457647532867,
      0.005951370112758847735624416, 0.005746216513010115682023589, 0.005554733551962801371038690};
  if (n <= 15.0) {
    const double nn = n + n;
    if (nn == std::floor(nn)) return kTable[static_cast<int>(nn)];
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  const double nn = n * n;
  if (n > 500.0) return (kS0 - kS1 / nn) / n;
  if (n > 80.0) return (kS0 - (kS1 - kS2 / nn) / nn) / n;
  if (n > 35.0) return (kS0 - (kS1 - (kS2 - kS3 / nn) / nn) / nn) / n;
  return (kS0 - (kS1 - (kS2 - (kS3 - kS4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x ln(x/np) + np - x, computed without cancellation.
double bd0(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / static_cast<double>(2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
  }
  return x * std::log(x / np) + np - x;
}

} // namespace

double binom_pmf(std::uint64_t n, double p, std::uint64_t k) {
  if (k > n) throw std::domain_error("binom_pmf: k must be <= n");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binom_pmf: p must lie in [0, 1]");
  const double q = 1.0 - p;
  if (p == 0.0) return k == 0 ? 1.0 : 0.0;
  if (q == 0.0) return k == n ? 1.0 : 0.0;
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  if (k == 0) return std::exp(nd * std::log1p(-p));
  if (k == n) return std::exp(nd * std::log(p));
  const double lc = stirlerr(nd) - stirlerr(kd) - stirlerr(nd - kd) - bd0(kd, nd * p) - bd0(nd - kd, nd * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(kd) + std::log1p(-kd / nd);
  return std::exp(lc - 0.5 * lf);
}

FloorReport pmf_floor(std::uint64_t n, double a, double b, double c, bool exact) {
  if (n == 0) throw std::invalid_argument("pmf_floor: n must be >= 1");
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("pmf_floor: a and b must be > 0");
  if (!(c > 0.0 && c < 0.5)) throw std::invalid_argument("pmf_floor: c must lie in (0, 1/2)");

  const double nd = static_cast<double>(n);
  const double root = std::sqrt(nd);
  const double k_radius = std::min(a * root, nd / 2.0);
  const double p_radius = std::min(b / root, c);
  const double p_lo = 0.5 - p_radius;
  const double p_hi = 0.5 + p_radius;
  const auto k_lo = static_cast<std::uint64_t>(std::max(0.0, std::ceil(nd / 2.0 - k_radius - 1e-12)));
  const auto k_hi = static_cast<std::uint64_t>(std::min(nd, std::floor(nd / 2.0 + k_radius + 1e-12)));

  std::vector<double> dense;
  if (!exact) {
    constexpr int kPoints = 201;
    for (int i = 0; i < kPoints; ++i) dense.push_back(p_lo + (p_hi - p_lo) * i / (kPoints - 1));
  }

  FloorReport report;
  report.n = n;
  report.min_value = std::numeric_limits<double>::infinity();
  auto visit = [&](std::uint64_t k, double p) {
    const FloorPoint pt{k, p, root * binom_pmf(n, p, k)};
    report.grid.push_back(pt);
    if (pt.value < report.min_value) {
      report.min_value = pt.value;
      report.argmin = pt;
    }
  };
  for (std::uint64_t k = k_lo; k <= k_hi; ++k) {
    if (exact) {
      visit(k, p_lo);
      const double mode = static_cast<double>(k) / nd;
      if (mode > p_lo && mode < p_hi) visit(k, mode);
      visit(k, p_hi);
    } else {
      for (double p : dense) visit(k, p);
    }
  }
  return report;
}

} // namespace marginsel
