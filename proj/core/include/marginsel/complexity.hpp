#pragma once

// Local complexity functionals and their fixed points.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "marginsel/core.hpp"
#include "marginsel/erm.hpp"

namespace marginsel {

/// Geometric grid min, min*ratio, ..., closed with `max`.
struct DeltaGrid {
  double min = 1e-6;
  double max = 4.0;
  double ratio = 1.05;

  std::vector<double> points() const;
};

struct ComplexityConfig {
  double Kbar = 1.0;
  double q = 2.0;
  double Khat = 1.0;
  double chat = 2.0;
  double t = 1.0;
  DeltaGrid grid;
  std::size_t mc_reps = 200;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on q <= 1, nonpositive constants or an
  /// empty grid.
  void validate() const;
  double threshold() const noexcept { return 1.0 / (2.0 * q); }
};

enum class ComplexityKind { ideal, empirical };

struct CertificatePoint {
  double sigma = 0.0;
  double ratio = 0.0;      // U(sigma) / sigma
  double suffix_sup = 0.0; // sup over grid points >= sigma
};

struct ComplexityReport {
  ComplexityKind kind = ComplexityKind::empirical;
  double delta = 0.0;
  bool saturated = false;
  double threshold = 0.0;
  std::vector<CertificatePoint> certificate;
  /// Largest Monte Carlo standard error of the modulus term used (ideal
  /// kind only).
  double modulus_std_error = 0.0;
};

/// Smallest grid sigma whose suffix supremum of u(sigma)/sigma is at most
/// 1/(2q); saturated with delta = grid max when none is.
ComplexityReport fixed_point_on_grid(std::span<const double> grid, const std::function<double(double)>& u,
                                     double q, ComplexityKind kind);

/// U_n(F_m; sigma; t) = Kbar (phi_n(sigma) + D_P(sigma) sqrt(t/n) + t/n),
/// phi_n estimated with cfg.mc_reps samples seeded by cfg.seed.
double u_ideal(const Model& model, const DiscreteDistribution& dist, std::size_t n, double sigma,
               const ComplexityConfig& cfg);

/// U-hat_n(F_m; sigma; t) = Khat (phi-hat_n(chat sigma) + D-hat_n(chat sigma) sqrt(t/n) + t/n).
double u_hat(const Model& model, const Sample& sample, double sigma, const ComplexityConfig& cfg,
             std::span<const int> eps);

/// delta-bar_n(F_m; t).
ComplexityReport fixed_point_ideal(const Model& model, const DiscreteDistribution& dist, std::size_t n,
                                   const ComplexityConfig& cfg);

/// delta-hat_n(F_m; t) for one sample and one Rademacher draw shared by
/// every grid point.
ComplexityReport fixed_point_empirical(const Model& model, const Sample& sample, const ComplexityConfig& cfg,
                                       std::span<const int> eps);

/// v(m) = sqrt(2 t_m / n Var_P(f_m - f*)), f_m the population minimizer of
/// model m (ties to the smallest id).
double bernstein_radius(const ModelFamily& family, std::size_t m, const DiscreteDistribution& dist,
                        const LossFunction& fstar, double t_m, std::size_t n);

/// (P - P_n)(f-hat_m).
double ideal_penalty(const Model& model, const Sample& sample, const DiscreteDistribution& dist);

struct AssumptionReport {
  /// (1-c) pen(m) >= (P - P_n)(f-hat_m - f_m) + t_m/n >= 0, per model.
  std::vector<bool> pen_minor;
  /// c pen(m) >= v(m) - C1 v(m') - C2 P(f_m' - f*) for every m' whose model
  /// is contained in model m; indexed [m][m'], true where not applicable.
  std::vector<std::vector<bool>> min_pen;
  /// |(P_n - P)(f_m - f*)| <= v(m) + t_m/(3n), per model.
  std::vector<bool> bernstein;
  std::vector<double> v;
  std::vector<double> estimation_gap; // (P - P_n)(f-hat_m - f_m)

  bool all_pen_minor() const;
  bool all_min_pen() const;
  bool all_bernstein() const;
};

AssumptionReport assumption_checker(const ModelFamily& family, const Sample& sample, const DiscreteDistribution& dist,
                                    const LossFunction& fstar, std::span<const double> pen, double c,
                                    std::span<const double> t_m, double C1, double C2);

} // namespace marginsel
