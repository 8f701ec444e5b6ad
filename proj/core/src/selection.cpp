#include "marginsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "marginsel/erm.hpp"
#include "marginsel/rng.hpp"

namespace marginsel {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const Truth& require_truth(const std::optional<Truth>& truth, const char* what) {
  if (!truth) throw std::invalid_argument(std::string(what) + " needs the true distribution");
  return *truth;
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("oracle rhs: eps must lie in (0, 1)");
}

} // namespace

PenaltySpec v_augmented(PenaltySpec base, double c, VAugmentedPenalty::Variant variant, double data_driven_constant) {
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("v_augmented: c must lie in (0, 1)");
  return std::make_shared<const VAugmentedPenalty>(
      VAugmentedPenalty{std::move(base), c, variant, data_driven_constant});
}

std::vector<ComplexityReport> local_rademacher_complexities(const ModelFamily& family, const Sample& sample,
                                                            const LocalRademacherPenalty& penalty,
                                                            std::span<const double> t_m) {
  if (t_m.size() != family.size()) throw std::invalid_argument("local_rademacher: one t_m per model");
  std::vector<ComplexityReport> out;
  out.reserve(family.size());
  const std::uint64_t base = derive_seed(penalty.eps_seed, sample.seed());
  for (std::size_t m = 0; m < family.size(); ++m) {
    ComplexityConfig cfg = penalty.cfg;
    cfg.t = t_m[m];
    const auto eps = rademacher_draw(sample.size(), derive_seed(base, m));
    out.push_back(fixed_point_empirical(family[m], sample, cfg, eps));
  }
  return out;
}

std::vector<double> compute_penalties(const ModelFamily& family, const Sample& sample, const PenaltySpec& penalty,
                                      std::span<const double> t_m, const std::optional<Truth>& truth) {
  const std::size_t count = family.size();
  if (t_m.size() != count) throw std::invalid_argument("compute_penalties: one t_m per model");
  const double n = static_cast<double>(sample.size());

  return std::visit(
      Overloaded{
          [&](const LocalRademacherPenalty& p) {
            if (!(p.scale > 0.0)) throw std::invalid_argument("local_rademacher: scale must be > 0");
            std::vector<double> out;
            for (const auto& report : local_rademacher_complexities(family, sample, p, t_m)) {
              out.push_back(p.scale * report.delta);
            }
            return out;
          },
          [&](const IdealOraclePenalty& p) {
            if (!(p.scale > 0.0)) throw std::invalid_argument("ideal_oracle: scale must be > 0");
            if (!(p.c >= 0.0 && p.c < 1.0)) throw std::invalid_argument("ideal_oracle: c must lie in [0, 1)");
            const Truth& tr = require_truth(truth, "ideal_oracle penalty");
            std::vector<double> out(count);
            for (std::size_t m = 0; m < count; ++m) {
              const double penid = ideal_penalty(family[m], sample, tr.dist);
              out[m] = p.scale * (std::max(penid, 0.0) + t_m[m] / n) / (1.0 - p.c);
            }
            return out;
          },
          [&](const ConstantPenalty& p) {
            if (p.values.size() != count) throw std::invalid_argument("constant penalty: one value per model");
            for (double v : p.values) {
              if (v < 0.0) throw std::invalid_argument("constant penalty: values must be >= 0");
            }
            return p.values;
          },
          [&](const std::shared_ptr<const VAugmentedPenalty>& p) {
            auto out = compute_penalties(family, sample, p->base, t_m, truth);
            for (std::size_t m = 0; m < count; ++m) {
              if (p->variant == VAugmentedPenalty::Variant::oracle) {
                const Truth& tr = require_truth(truth, "oracle v_augmented penalty");
                out[m] += bernstein_radius(family, m, tr.dist, tr.fstar, t_m[m], sample.size()) / p->c;
              } else {
                const double risk = empirical_mean(erm(family[m], sample), sample);
                out[m] += p->data_driven_constant * std::sqrt(t_m[m] * risk / n);
              }
            }
            return out;
          },
      },
      penalty);
}

SelectionOutcome select_with_penalties(const ModelFamily& family, const Sample& sample, std::span<const double> pen,
                                       const std::optional<Truth>& truth) {
  if (family.size() == 0) throw std::invalid_argument("select: empty family");
  if (pen.size() != family.size()) throw std::invalid_argument("select: one penalty per model");
  SelectionOutcome out;
  out.per_model.resize(family.size());
  for (std::size_t m = 0; m < family.size(); ++m) {
    auto& row = out.per_model[m];
    row.erm_index = erm_index(family[m], sample);
    row.erm_id = family[m][row.erm_index].id();
    row.empirical_risk = empirical_mean(family[m][row.erm_index], sample);
    row.penalty = pen[m];
    row.criterion = row.empirical_risk + pen[m];
    if (row.criterion < out.per_model[out.chosen].criterion) out.chosen = m;
  }
  if (truth) {
    const auto& chosen = family[out.chosen][out.per_model[out.chosen].erm_index];
    out.excess = excess_risk(chosen, truth->dist, truth->fstar);
  } else {
    out.excess = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

SelectionOutcome select(const ModelFamily& family, const Sample& sample, const PenaltySpec& penalty,
                        std::span<const double> t_m, const std::optional<Truth>& truth) {
  const auto pen = compute_penalties(family, sample, penalty, t_m, truth);
  return select_with_penalties(family, sample, pen, truth);
}

MarginFit extract_margin(const Model& model, const DiscreteDistribution& dist, const LossFunction& fstar) {
  MarginFit fit{MarginFunction::power(std::numeric_limits<double>::infinity()),
                std::numeric_limits<double>::infinity(),
                {}};
  for (const auto& f : model.functions()) {
    const double excess = excess_risk(f, dist, fstar);
    const double var = population_variance(f, fstar, dist);
    fit.cloud.emplace_back(excess, var);
    if (var > 0.0) fit.h = std::min(fit.h, excess / var);
  }
  if (fit.h > 0.0) {
    fit.phi = MarginFunction::power(fit.h);
  } else {
    // h = 0 only for a function with positive variance and zero excess; no
    // nontrivial power margin holds. Represent it by the tabulated phi = 0.
    fit.phi = MarginFunction::tabulated({{0.0, 0.0}, {1.0, 0.0}});
  }
  return fit;
}

double oracle_rhs_nested_term(const ModelFamily& family, std::size_t m, const DiscreteDistribution& dist,
                              const LossFunction& fstar, double pen, double t_m, double C1, double C2, double eps,
                              std::size_t n, const MarginFunction& margin) {
  check_eps(eps);
  const Model& model = family[m];
  const auto& fm = model[population_minimizer(model, dist)];
  const double nd = static_cast<double>(n);
  const double excess = excess_risk(fm, dist, fstar);
  const double remainder =
      std::min(margin.conjugate(std::sqrt(2.0 * t_m / (eps * eps * nd))), std::sqrt(2.0 * t_m / nd));
  const double bracket = (1.0 + eps + C2 + eps * C1) * excess + pen + (1.0 + std::max(1.0, C1)) * remainder +
                         t_m / (3.0 * nd);
  return bracket / (1.0 - eps);
}

double oracle_rhs_nested(const ModelFamily& family, const DiscreteDistribution& dist, const LossFunction& fstar,
                         std::span<const double> pen, std::span<const double> t_m, double C1, double C2, double eps,
                         std::size_t n, std::span<const MarginFunction> margins) {
  check_eps(eps);
  if (pen.size() != family.size() || t_m.size() != family.size() || margins.size() != family.size()) {
    throw std::invalid_argument("oracle_rhs_nested: one penalty, t_m and margin per model");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < family.size(); ++m) {
    best = std::min(best, oracle_rhs_nested_term(family, m, dist, fstar, pen[m], t_m[m], C1, C2, eps, n, margins[m]));
  }
  return best;
}

GeneralRhs oracle_rhs_general(const ModelFamily& family, const DiscreteDistribution& dist, const LossFunction& fstar,
                              std::span<const double> pen, std::span<const double> t_m, double c, double eps,
                              std::size_t n) {
  check_eps(eps);
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("oracle_rhs_general: c must lie in (0, 1)");
  if (pen.size() != family.size() || t_m.size() != family.size()) {
    throw std::invalid_argument("oracle_rhs_general: one penalty and t_m per model");
  }
  const double nd = static_cast<double>(n);
  double inf_term = std::numeric_limits<double>::infinity();
  double sup_term = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < family.size(); ++m) {
    const Model& model = family[m];
    const auto& fm = model[population_minimizer(model, dist)];
    const double excess = excess_risk(fm, dist, fstar);
    const double v = std::sqrt(2.0 * t_m[m] / nd * population_variance(fm, fstar, dist));
    inf_term = std::min(inf_term, excess + pen[m] + v + t_m[m] / (3.0 * nd));
    sup_term = std::max(sup_term, v - eps * excess - c * pen[m]);
  }
  return GeneralRhs{inf_term / (1.0 - eps), sup_term / (1.0 - eps)};
}

} // namespace marginsel
