#pragma once

// Penalized model selection and oracle-inequality right-hand sides.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "marginsel/complexity.hpp"
#include "marginsel/core.hpp"
#include "marginsel/margin.hpp"

namespace marginsel {

/// pen(m) = scale * delta-hat_n(F_m; t), with one Rademacher draw per
/// (sample, model) seeded from eps_seed and the model index.
struct LocalRademacherPenalty {
  double scale = 3.5;
  ComplexityConfig cfg;
  std::uint64_t eps_seed = 0;
};

/// Oracle penalty built from the ideal penalty penid(m) = (P - P_n)(f-hat_m):
/// pen(m) = scale * (max(penid(m), 0) + t_m/n) / (1 - c). Needs P.
struct IdealOraclePenalty {
  double scale = 1.0;
  double c = 0.5;
};

struct ConstantPenalty {
  std::vector<double> values;
};

struct VAugmentedPenalty;

using PenaltySpec = std::variant<LocalRademacherPenalty, IdealOraclePenalty, ConstantPenalty,
                                 std::shared_ptr<const VAugmentedPenalty>>;

/// base + v(m)/c. The oracle variant uses the exact Bernstein radius v(m)
/// (needs P); the data-driven variant adds C sqrt(t_m P_n(f-hat_m) / n).
struct VAugmentedPenalty {
  enum class Variant { oracle, data_driven };

  PenaltySpec base;
  double c = 0.5;
  Variant variant = Variant::oracle;
  double data_driven_constant = 1.0;
};

PenaltySpec v_augmented(PenaltySpec base, double c, VAugmentedPenalty::Variant variant,
                        double data_driven_constant = 1.0);

/// Ground truth needed by oracle penalties and by the excess-risk report.
struct Truth {
  const DiscreteDistribution& dist;
  const LossFunction& fstar;
};

struct ModelRow {
  std::size_t erm_index = 0;
  FunctionId erm_id = 0;
  double empirical_risk = 0.0;
  double penalty = 0.0;
  double criterion = 0.0;
};

struct SelectionOutcome {
  std::size_t chosen = 0;
  std::vector<ModelRow> per_model;
  /// P(f-hat_chosen - f*); NaN when no truth was supplied.
  double excess = 0.0;
};

/// delta-hat_n(F_m; t_m) for every model, with the Rademacher draw that
/// the local_rademacher penalty uses for this sample.
std::vector<ComplexityReport> local_rademacher_complexities(const ModelFamily& family, const Sample& sample,
                                                            const LocalRademacherPenalty& penalty,
                                                            std::span<const double> t_m);

/// Penalty values per model. Oracle kinds throw std::invalid_argument when
/// `truth` is empty.
std::vector<double> compute_penalties(const ModelFamily& family, const Sample& sample, const PenaltySpec& penalty,
                                      std::span<const double> t_m, const std::optional<Truth>& truth);

/// argmin_m P_n(f-hat_m) + pen(m), ties to the smallest index.
SelectionOutcome select_with_penalties(const ModelFamily& family, const Sample& sample, std::span<const double> pen,
                                       const std::optional<Truth>& truth);

SelectionOutcome select(const ModelFamily& family, const Sample& sample, const PenaltySpec& penalty,
                        std::span<const double> t_m, const std::optional<Truth>& truth);

struct MarginFit {
  /// phi(x) = h x^2 (h = +inf when every variance vanishes).
  MarginFunction phi;
  double h = 0.0;
  /// (excess, variance) of every f - f* in the model.
  std::vector<std::pair<double, double>> cloud;
};

/// Largest h with P(f - f*) >= h Var_P(f - f*) for every f in the model.
MarginFit extract_margin(const Model& model, const DiscreteDistribution& dist, const LossFunction& fstar);

/// Right-hand side of the nested-family oracle inequality, infimum over m.
/// Throws std::invalid_argument if eps is outside (0, 1).
double oracle_rhs_nested(const ModelFamily& family, const DiscreteDistribution& dist, const LossFunction& fstar,
                         std::span<const double> pen, std::span<const double> t_m, double C1, double C2, double eps,
                         std::size_t n, std::span<const MarginFunction> margins);

/// Single-model bracket of oracle_rhs_nested (before the infimum).
double oracle_rhs_nested_term(const ModelFamily& family, std::size_t m, const DiscreteDistribution& dist,
                              const LossFunction& fstar, double pen, double t_m, double C1, double C2, double eps,
                              std::size_t n, const MarginFunction& margin);

struct GeneralRhs {
  double main = 0.0;
  double v_n = 0.0;
};

/// main = (1-eps)^-1 inf_m {P(f_m - f*) + pen(m) + v(m) + t_m/(3n)},
/// V_n = (1-eps)^-1 sup_m {v(m) - eps P(f_m - f*) - c pen(m)}.
GeneralRhs oracle_rhs_general(const ModelFamily& family, const DiscreteDistribution& dist, const LossFunction& fstar,
                              std::span<const double> pen, std::span<const double> t_m, double c, double eps,
                              std::size_t n);

} // namespace marginsel
