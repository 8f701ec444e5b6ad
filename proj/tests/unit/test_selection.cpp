#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "marginsel/classes.hpp"
#include "marginsel/distributions.hpp"
#include "marginsel/erm.hpp"
#include "marginsel/harness.hpp"
#include "marginsel/selection.hpp"

using namespace marginsel;
using marginsel::testing::sample_of;

namespace {

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

} // namespace

TEST(Select, ZeroPenaltyIsGlobalErm) {
  const auto d = random_distribution(8, 4);
  const auto fam = build_family(ThresholdsSpec{8}, 8);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = draw_sample(d, 60, seed);
    const auto out = select(fam, s, ConstantPenalty{zeros(fam.size())}, zeros(fam.size()), std::nullopt);
    double best = 1.0;
    for (const auto& f : fam[fam.size() - 1].functions()) best = std::min(best, empirical_mean(f, s));
    EXPECT_DOUBLE_EQ(out.per_model[out.chosen].criterion, best);
    EXPECT_TRUE(std::isnan(out.excess));
  }
}

TEST(Select, SingletonsIsErmBetweenTwo) {
  const auto inst = build_counterexample(64);
  const auto fam = build_family(SingletonsSpec{{inst.f0, inst.f1}}, 2);
  const Model pair("pair", {inst.f0, inst.f1});
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = draw_sample(inst.p1, 64, seed);
    const auto out = select(fam, s, ConstantPenalty{zeros(2)}, zeros(2), Truth{inst.p1, inst.fstar1});
    EXPECT_EQ(out.per_model[out.chosen].erm_id, erm(pair, s).id());
    EXPECT_NEAR(out.excess, excess_risk(erm(pair, s), inst.p1, inst.fstar1), 1e-15);
  }
}

TEST(Select, PicksSmallerCriterionAndBreaksTiesLow) {
  const DiscreteDistribution d(1, {0.5, 0.5});
  const ModelFamily fam({Model("a", {LossFunction(0, {0.2, 0.2})}), Model("b", {LossFunction(1, {0.15, 0.15})})},
                        false);
  const auto s = sample_of({0, 1}, 2);
  auto out = select_with_penalties(fam, s, std::vector<double>{0.10, 0.10}, std::nullopt);
  EXPECT_NEAR(out.per_model[0].criterion, 0.30, 1e-15);
  EXPECT_NEAR(out.per_model[1].criterion, 0.25, 1e-15);
  EXPECT_EQ(out.chosen, 1u);
  out = select_with_penalties(fam, s, std::vector<double>{0.05, 0.10}, std::nullopt);
  EXPECT_EQ(out.chosen, 0u);
  EXPECT_THROW(select_with_penalties(fam, s, std::vector<double>{0.0}, std::nullopt), std::invalid_argument);
}

TEST(Select, CriterionMonotoneInPenalty) {
  const auto d = random_distribution(8, 5);
  const auto fam = build_family(ThresholdsSpec{8}, 8);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = draw_sample(d, 40, seed);
    std::vector<double> a, b;
    for (std::size_t m = 0; m < fam.size(); ++m) {
      a.push_back(0.01 * m);
      b.push_back(m % 2 == 0 ? 0.01 * m : 0.004 * m);
    }
    const auto oa = select_with_penalties(fam, s, a, std::nullopt);
    const auto ob = select_with_penalties(fam, s, b, std::nullopt);
    EXPECT_LE(ob.per_model[ob.chosen].criterion, oa.per_model[oa.chosen].criterion);
  }
}

TEST(Penalties, KindsAndRequirements) {
  const auto inst = build_counterexample(32);
  const auto fam = build_family(SingletonsSpec{{inst.f0, inst.f1}}, 2);
  const auto s = draw_sample(inst.p1, 32, 1);
  const std::vector<double> t{2.0, 2.0};
  const Truth truth{inst.p1, inst.fstar1};

  EXPECT_THROW(compute_penalties(fam, s, IdealOraclePenalty{}, t, std::nullopt), std::invalid_argument);
  EXPECT_THROW(compute_penalties(fam, s, ConstantPenalty{{-1.0, 0.0}}, t, std::nullopt), std::invalid_argument);

  const auto ideal = compute_penalties(fam, s, IdealOraclePenalty{1.0, 0.5}, t, truth);
  for (std::size_t m = 0; m < 2; ++m) {
    const double penid = ideal_penalty(fam[m], s, inst.p1);
    EXPECT_NEAR(ideal[m], (std::max(penid, 0.0) + 2.0 / 32) / 0.5, 1e-15);
  }

  const auto base = ConstantPenalty{{0.1, 0.2}};
  const auto aug = compute_penalties(fam, s, v_augmented(base, 0.5, VAugmentedPenalty::Variant::oracle), t, truth);
  for (std::size_t m = 0; m < 2; ++m) {
    EXPECT_NEAR(aug[m], base.values[m] + bernstein_radius(fam, m, inst.p1, inst.fstar1, 2.0, 32) / 0.5, 1e-15);
  }
  EXPECT_THROW(compute_penalties(fam, s, v_augmented(base, 0.5, VAugmentedPenalty::Variant::oracle), t, std::nullopt),
               std::invalid_argument);
  const auto dd =
      compute_penalties(fam, s, v_augmented(base, 0.5, VAugmentedPenalty::Variant::data_driven, 2.0), t, std::nullopt);
  for (std::size_t m = 0; m < 2; ++m) {
    EXPECT_NEAR(dd[m], base.values[m] + 2.0 * std::sqrt(2.0 * empirical_mean(fam[m][0], s) / 32), 1e-15);
  }
  EXPECT_THROW(v_augmented(base, 1.0, VAugmentedPenalty::Variant::oracle), std::invalid_argument);
}

TEST(Penalties, LocalRademacherIsScaledFixedPoint) {
  const auto inst = chain_instance(2.0, 4, 256);
  const auto fam = odd_chain(inst, 4);
  const auto s = draw_sample(inst.dist, 256, 3);
  const std::vector<double> t(4, 3.0);
  LocalRademacherPenalty spec;
  spec.eps_seed = 17;
  const auto reports = local_rademacher_complexities(fam, s, spec, t);
  const auto pen = compute_penalties(fam, s, spec, t, std::nullopt);
  ASSERT_EQ(reports.size(), 4u);
  for (std::size_t m = 0; m < 4; ++m) EXPECT_EQ(pen[m], 3.5 * reports[m].delta);
  // same draw every call
  EXPECT_EQ(pen, compute_penalties(fam, s, spec, t, std::nullopt));
}

TEST(ExtractMargin, Examples) {
  const auto inst = build_counterexample(2);
  const auto fit = extract_margin(Model("f1", {inst.f1}), inst.p1, inst.fstar1);
  EXPECT_NEAR(fit.h, 4.0 / 3.0, 1e-14);
  ASSERT_EQ(fit.cloud.size(), 1u);
  EXPECT_NEAR(fit.cloud[0].second, 0.1875, 1e-15);

  EXPECT_TRUE(std::isinf(extract_margin(Model("star", {inst.fstar1}), inst.p1, inst.fstar1).h));

  const auto gap = build_margin_gap(2.0, 8, 16);
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_GE(extract_margin(Model("even", {gap.fs[2 * k]}), gap.dist, gap.fstar).h, 1.0);
  }
}

TEST(OracleRhsNested, DegenerateSingletonIsZero) {
  const auto d = random_distribution(3, 2);
  const auto fstar = bayes_loss(d, 0);
  const ModelFamily fam({Model("star", {fstar})}, true);
  const std::vector<MarginFunction> phi{MarginFunction::power(1.0)};
  EXPECT_EQ(oracle_rhs_nested(fam, d, fstar, zeros(1), zeros(1), std::sqrt(2.0), 1.0, 0.5, 100, phi), 0.0);
  EXPECT_THROW(oracle_rhs_nested(fam, d, fstar, zeros(1), zeros(1), 1.0, 1.0, 1.0, 100, phi), std::invalid_argument);
  EXPECT_THROW(oracle_rhs_nested(fam, d, fstar, zeros(1), zeros(1), 1.0, 1.0, 0.0, 100, phi), std::invalid_argument);
}

TEST(OracleRhsNested, PowerMarginUsesClosedFormConjugate) {
  const auto inst = chain_instance(2.0, 4, 512);
  const auto fam = odd_chain(inst, 4);
  const double h = 0.8, kappa = 1.5, eps = 0.5, t = 4.0, n = 512;
  const auto phi = MarginFunction::power(h, kappa);
  const double x = std::sqrt(2 * t / (eps * eps * n));
  const double L = (2 * kappa - 1) / (2 * kappa) * std::pow(2 * kappa * std::pow(h, kappa), -1 / (2 * kappa - 1));
  const double conj = L * std::pow(x, 2 * kappa / (2 * kappa - 1));
  EXPECT_NEAR(phi.conjugate(x), conj, 1e-14);

  const double C1 = std::sqrt(2.0), C2 = 1.0;
  const double excess = excess_risk(fam[0][population_minimizer(fam[0], inst.dist)], inst.dist, inst.fstar);
  const double expect =
      ((1 + eps + C2 + eps * C1) * excess + 0.05 + (1 + C1) * std::min(conj, std::sqrt(2 * t / n)) + t / (3 * n)) /
      (1 - eps);
  EXPECT_NEAR(oracle_rhs_nested_term(fam, 0, inst.dist, inst.fstar, 0.05, t, C1, C2, eps, 512, phi), expect, 1e-14);
}

TEST(OracleRhsNested, InfimumAndPenaltyMonotonicity) {
  const auto inst = chain_instance(2.0, 4, 512);
  const auto fam = odd_chain(inst, 4);
  std::vector<MarginFunction> margins;
  for (const auto& m : fam.models()) margins.push_back(extract_margin(m, inst.dist, inst.fstar).phi);
  std::vector<double> pen{0.02, 0.03, 0.05, 0.08};
  const std::vector<double> t(4, 2.0);
  for (double eps : {0.1, 0.5, 0.9}) {
    const double rhs = oracle_rhs_nested(fam, inst.dist, inst.fstar, pen, t, std::sqrt(2.0), 1.0, eps, 512, margins);
    for (std::size_t m = 0; m < 4; ++m) {
      const double term =
          oracle_rhs_nested_term(fam, m, inst.dist, inst.fstar, pen[m], t[m], std::sqrt(2.0), 1.0, eps, 512, margins[m]);
      EXPECT_LE(rhs, term);
      auto bigger = pen;
      bigger[m] += 0.1;
      EXPECT_GE(oracle_rhs_nested(fam, inst.dist, inst.fstar, bigger, t, std::sqrt(2.0), 1.0, eps, 512, margins), rhs);
    }
  }
}

TEST(OracleRhsGeneral, Properties) {
  const auto g = build_general_instance();
  const auto fam = general_family(g);
  const std::vector<double> t(3, std::log(3.0) + 3 * std::log(200.0));
  const std::vector<double> pen(3, 0.0);

  // uniform margin from the union of the models
  std::vector<LossFunction> all;
  for (const auto& m : fam.models())
    for (const auto& f : m.functions()) all.push_back(f);
  const auto phi = extract_margin(Model("union", all), g.dist, g.fstar).phi;
  for (double eps = 0.1; eps < 0.95; eps += 0.1) {
    const auto rhs = oracle_rhs_general(fam, g.dist, g.fstar, pen, t, 0.5, eps, 200);
    EXPECT_LE(rhs.v_n, phi.conjugate(std::sqrt(2 * t[0] / (eps * eps * 200))) / (1 - eps) + 1e-12);
  }

  // v(m) = 0 everywhere when every f_m is f*
  const ModelFamily stars({Model("a", {g.fstar}), Model("b", {g.fstar})}, false);
  EXPECT_LE(oracle_rhs_general(stars, g.dist, g.fstar, zeros(2), zeros(2), 0.5, 0.5, 200).v_n, 0.0);

  // single model: main is that model's bracket
  const ModelFamily one({fam[2]}, false);
  const auto& fm = fam[2][population_minimizer(fam[2], g.dist)];
  const double e = excess_risk(fm, g.dist, g.fstar);
  const double v = std::sqrt(2 * t[0] / 200 * population_variance(fm, g.fstar, g.dist));
  const auto r = oracle_rhs_general(one, g.dist, g.fstar, std::vector<double>{0.01}, std::vector<double>{t[0]}, 0.5,
                                    0.3, 200);
  EXPECT_NEAR(r.main, (e + 0.01 + v + t[0] / 600) / 0.7, 1e-14);
  EXPECT_THROW(oracle_rhs_general(one, g.dist, g.fstar, zeros(1), zeros(1), 1.0, 0.3, 200), std::invalid_argument);
}
