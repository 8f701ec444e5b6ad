#include "marginsel/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace marginsel {

std::vector<double> DeltaGrid::points() const {
  if (!(min > 0.0) || !(max > min) || !(ratio > 1.0)) throw std::invalid_argument("DeltaGrid: invalid grid");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double s = min * std::pow(ratio, i);
    if (s >= max * (1.0 - 1e-12)) break;
    out.push_back(s);
  }
  out.push_back(max);
  return out;
}

void ComplexityConfig::validate() const {
  if (!(q > 1.0)) throw std::invalid_argument("ComplexityConfig: q must be > 1");
  if (!(Kbar > 0.0) || !(Khat > 0.0) || !(chat > 0.0)) {
    throw std::invalid_argument("ComplexityConfig: constants must be positive");
  }
  if (!(t > 0.0)) throw std::invalid_argument("ComplexityConfig: t must be > 0");
  if (!(grid.min < grid.max)) throw std::invalid_argument("ComplexityConfig: grid min must be < grid max");
  if (!(grid.min > 0.0) || !(grid.ratio > 1.0)) throw std::invalid_argument("ComplexityConfig: invalid grid");
}

ComplexityReport fixed_point_on_grid(std::span<const double> grid, const std::function<double(double)>& u, double q,
                                     ComplexityKind kind) {
  if (grid.empty()) throw std::invalid_argument("fixed_point_on_grid: empty grid");
  ComplexityReport report;
  report.kind = kind;
  report.threshold = 1.0 / (2.0 * q);
  report.certificate.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    report.certificate[i].sigma = grid[i];
    report.certificate[i].ratio = u(grid[i]) / grid[i];
  }
  double running = -1.0;
  for (std::size_t i = grid.size(); i-- > 0;) {
    running = std::max(running, report.certificate[i].ratio);
    report.certificate[i].suffix_sup = running;
  }
  report.saturated = true;
  report.delta = grid.back();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (report.certificate[i].suffix_sup <= report.threshold) {
      report.delta = grid[i];
      report.saturated = false;
      break;
    }
  }
  return report;
}

double u_ideal(const Model& model, const DiscreteDistribution& dist, std::size_t n, double sigma,
               const ComplexityConfig& cfg) {
  if (!(sigma > 0.0)) throw std::invalid_argument("u_ideal: sigma must be > 0");
  if (cfg.mc_reps == 0) throw std::invalid_argument("u_ideal: mc_reps must be >= 1");
  const double tn = cfg.t / static_cast<double>(n);
  const auto modulus = expected_modulus(model, dist, n, sigma, cfg.mc_reps, cfg.seed);
  return cfg.Kbar * (modulus.mean + diameter(model, dist, sigma) * std::sqrt(tn) + tn);
}

double u_hat(const Model& model, const Sample& sample, double sigma, const ComplexityConfig& cfg,
             std::span<const int> eps) {
  if (!(sigma > 0.0)) throw std::invalid_argument("u_hat: sigma must be > 0");
  const double tn = cfg.t / static_cast<double>(sample.size());
  const double level = cfg.chat * sigma;
  return cfg.Khat * (rademacher_modulus(model, sample, level, eps) + diameter(model, sample, level) * std::sqrt(tn) + tn);
}

ComplexityReport fixed_point_ideal(const Model& model, const DiscreteDistribution& dist, std::size_t n,
                                   const ComplexityConfig& cfg) {
  cfg.validate();
  if (cfg.mc_reps == 0) throw std::invalid_argument("fixed_point_ideal: mc_reps must be >= 1");
  const PopulationGeometry geometry(model, dist);
  const auto modulus = expected_modulus_by_prefix(model, dist, geometry, n, cfg.mc_reps, cfg.seed);
  const double tn = cfg.t / static_cast<double>(n);
  double max_se = 0.0;
  auto u = [&](double sigma) {
    const std::size_t k = geometry.prefix_size(sigma);
    max_se = std::max(max_se, modulus[k - 1].std_error);
    return cfg.Kbar * (modulus[k - 1].mean + std::sqrt(geometry.diameter_sq(k)) * std::sqrt(tn) + tn);
  };
  const auto grid = cfg.grid.points();
  auto report = fixed_point_on_grid(grid, u, cfg.q, ComplexityKind::ideal);
  report.modulus_std_error = max_se;
  return report;
}

ComplexityReport fixed_point_empirical(const Model& model, const Sample& sample, const ComplexityConfig& cfg,
                                       std::span<const int> eps) {
  cfg.validate();
  const EmpiricalGeometry geometry(model, sample, eps);
  const double tn = cfg.t / static_cast<double>(sample.size());
  auto u = [&](double sigma) {
    const std::size_t k = geometry.prefix_size(cfg.chat * sigma);
    return cfg.Khat * (geometry.rademacher(k) + geometry.diameter(k) * std::sqrt(tn) + tn);
  };
  const auto grid = cfg.grid.points();
  return fixed_point_on_grid(grid, u, cfg.q, ComplexityKind::empirical);
}

double bernstein_radius(const ModelFamily& family, std::size_t m, const DiscreteDistribution& dist,
                        const LossFunction& fstar, double t_m, std::size_t n) {
  const Model& model = family[m];
  const auto& fm = model[population_minimizer(model, dist)];
  return std::sqrt(2.0 * t_m / static_cast<double>(n) * population_variance(fm, fstar, dist));
}

double ideal_penalty(const Model& model, const Sample& sample, const DiscreteDistribution& dist) {
  const auto& fhat = erm(model, sample);
  return population_mean(fhat, dist) - empirical_mean(fhat, sample);
}

bool AssumptionReport::all_pen_minor() const {
  return std::all_of(pen_minor.begin(), pen_minor.end(), [](bool b) { return b; });
}

bool AssumptionReport::all_min_pen() const {
  return std::all_of(min_pen.begin(), min_pen.end(),
                     [](const auto& row) { return std::all_of(row.begin(), row.end(), [](bool b) { return b; }); });
}

bool AssumptionReport::all_bernstein() const {
  return std::all_of(bernstein.begin(), bernstein.end(), [](bool b) { return b; });
}

AssumptionReport assumption_checker(const ModelFamily& family, const Sample& sample, const DiscreteDistribution& dist,
                                    const LossFunction& fstar, std::span<const double> pen, double c,
                                    std::span<const double> t_m, double C1, double C2) {
  const std::size_t count = family.size();
  if (pen.size() != count || t_m.size() != count) {
    throw std::invalid_argument("assumption_checker: one penalty and one t_m per model");
  }
  const double n = static_cast<double>(sample.size());
  AssumptionReport report;
  report.pen_minor.resize(count);
  report.bernstein.resize(count);
  report.v.resize(count);
  report.estimation_gap.resize(count);
  report.min_pen.assign(count, std::vector<bool>(count, true));

  std::vector<double> excess(count);
  for (std::size_t m = 0; m < count; ++m) {
    const Model& model = family[m];
    const auto& fm = model[population_minimizer(model, dist)];
    const auto& fhat = erm(model, sample);
    // (P - P_n)(fhat - fm) = -(P_n - P)(fhat - fm).
    const double gap = -centered_difference(fhat, fm, sample, dist);
    const double rhs = gap + t_m[m] / n;
    report.estimation_gap[m] = gap;
    report.pen_minor[m] = (1.0 - c) * pen[m] >= rhs - kCompareTol && rhs >= -kCompareTol;

    report.v[m] = std::sqrt(2.0 * t_m[m] / n * population_variance(fm, fstar, dist));
    excess[m] = excess_risk(fm, dist, fstar);
    const double dev = std::abs(centered_difference(fm, fstar, sample, dist));
    report.bernstein[m] = dev <= report.v[m] + t_m[m] / (3.0 * n) + kCompareTol;
  }
  for (std::size_t m = 0; m < count; ++m) {
    for (std::size_t mp = 0; mp < count; ++mp) {
      if (!family.is_subset(mp, m)) continue;
      report.min_pen[m][mp] = c * pen[m] >= report.v[m] - C1 * report.v[mp] - C2 * excess[mp] - kCompareTol;
    }
  }
  return report;
}

} // namespace marginsel
