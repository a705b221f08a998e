#include <doctest.h>

#include <cmath>
#include <iomanip>
#include <limits>
#include <string>

#include "pinnreg/error.hpp"
#include "pinnreg/loss.hpp"
#include "pinnreg/tape.hpp"
#include "support/naive.hpp"
#include "support/oracles.hpp"

using namespace pinnreg;

namespace {

NetworkArch tiny_arch(const PdeProblem& p, int width = 6) { return {p.input_dim(), p.output_dim(), 1, 2, width}; }

RegulatorSet random_regulator(const PdeProblem& p, std::size_t n, std::uint64_t seed, double weight = 1.0) {
  RegulatorSet r;
  r.points = qmc_points(p, n, Region::interior, seed);
  r.targets = oracle::random_points(static_cast<int>(n), p.output_dim(), seed + 1);
  r.weight = weight;
  return r;
}

TrainSet small_set(const PdeProblem& p, std::uint64_t seed, bool with_regulator) {
  TrainSet s = make_train_set(p, PointBudget{40, 12, 10}, seed, 0);
  if (with_regulator) s.regulator = random_regulator(p, 9, seed + 7, 0.7);
  return s;
}

std::vector<PdeProblem> all_problems() { return {make_burgers(), make_wave(), make_ns(true)}; }

}  // namespace

TEST_CASE("composite loss equals an independently coded sum of means") {
  for (const auto& problem : all_problems())
    for (bool reg : {false, true}) {
      const auto params = oracle::random_params(tiny_arch(problem, 10), 21);
      const auto set = small_set(problem, 3, reg);
      const LossWeights w{1.3, 0.6, 2.0, 0.9};
      const auto report = composite_loss(params, problem, set, w);
      const double expect = naive::composite<double>(problem, params.arch, params.values, set, w);
      CHECK(report.total == doctest::Approx(expect).epsilon(1e-12));
      CHECK(report.domain == doctest::Approx(naive::domain_loss<double>(problem, params.arch, params.values, set.domain))
                                 .epsilon(1e-12));
    }
}

TEST_CASE("total is exactly the weighted sum of non-negative terms") {
  for (const auto& problem : all_problems()) {
    const auto params = oracle::random_params(tiny_arch(problem), 5);
    const auto set = small_set(problem, 4, true);
    const LossWeights w{0.3, 1.7, 0.2, 1.1};
    const auto r = LossEvaluator(problem, set, w).evaluate(params);
    CHECK(r.domain >= 0.0);
    CHECK(r.initial >= 0.0);
    CHECK(r.boundary >= 0.0);
    CHECK(r.data > 0.0);
    CHECK(r.weights.data == doctest::Approx(1.1 * 0.7).epsilon(1e-15));
    CHECK(r.total == r.weights.domain * r.domain + r.weights.initial * r.initial + r.weights.boundary * r.boundary +
                         r.weights.data * r.data);
  }
}

TEST_CASE("an empty regulator contributes nothing") {
  const auto problem = make_burgers();
  const auto params = oracle::random_params(tiny_arch(problem), 6);
  TrainSet bare = small_set(problem, 8, false);
  TrainSet empty = bare;
  empty.regulator = RegulatorSet{Coords(0, 2), Eigen::MatrixXd(0, 1), RegulatorKind::sparse, 1.0};
  const auto a = composite_loss(params, problem, bare, {});
  const auto b = composite_loss(params, problem, empty, {});
  CHECK(b.data == 0.0);
  CHECK(a.total == b.total);
  CHECK(b.total == a.domain + a.initial + a.boundary);
}

TEST_CASE("raising one weight never lowers the total") {
  const auto problem = make_wave();
  const auto params = oracle::random_params(tiny_arch(problem), 7);
  const auto set = small_set(problem, 9, true);
  const auto base = composite_loss(params, problem, set, {});
  for (int term = 0; term < 4; ++term) {
    LossWeights w;
    (term == 0 ? w.domain : term == 1 ? w.initial : term == 2 ? w.boundary : w.data) = 2.5;
    CHECK(composite_loss(params, problem, set, w).total > base.total);
  }
}

TEST_CASE("scaling the mismatches by c scales each term by c squared") {
  // The wave equation is linear and its boundary and (here) data targets are
  // zero, so scaling the linear head by c scales those mismatches by c.
  const auto problem = make_wave();
  const auto params = oracle::random_params(tiny_arch(problem), 8);
  TrainSet set = small_set(problem, 10, true);
  set.regulator->targets.setZero();
  auto scaled = params;
  const auto head = layer_layout(params.arch).back();
  const double c = 3.0;
  for (std::size_t i = head.weight_offset; i < params.size(); ++i) scaled.values[i] *= c;
  const auto a = composite_loss(params, problem, set, {});
  const auto b = composite_loss(scaled, problem, set, {});
  CHECK(b.domain == doctest::Approx(c * c * a.domain).epsilon(1e-12));
  CHECK(b.boundary == doctest::Approx(c * c * a.boundary).epsilon(1e-12));
  CHECK(b.data == doctest::Approx(c * c * a.data).epsilon(1e-12));
}

TEST_CASE("uniform flow satisfies every NS term without a block") {
  const auto problem = make_ns(false);
  const NetworkArch arch = tiny_arch(problem);
  NetworkParams p{arch, std::vector<double>(parameter_count(arch), 0.0)};
  p.values[layer_layout(arch).back().bias_offset] = problem.inflow;
  const auto set = make_train_set(problem, PointBudget{300, 100, 100}, 2, 0);
  const auto r = composite_loss(p, problem, set, {});
  CHECK(r.total < 1e-10);
  CHECK(r.total == 0.0);
}

TEST_CASE("data term vanishes when targets equal the prediction") {
  const auto problem = make_ns(true);
  const auto params = oracle::random_params(tiny_arch(problem), 12);
  TrainSet set = small_set(problem, 11, true);
  set.regulator->targets = forward(params, set.regulator->points);
  CHECK(composite_loss(params, problem, set, {}).data < 1e-30);
}

TEST_CASE("loss gradient matches finite differences and the tape") {
  for (const auto& problem : all_problems()) {
    const NetworkArch arch = tiny_arch(problem);
    REQUIRE(parameter_count(arch) <= 500);
    const auto params = oracle::random_params(arch, 13, 0.5);
    const auto set = small_set(problem, 14, true);
    const LossWeights w{1.0, 0.8, 1.2, 1.5};
    const LossEvaluator eval(problem, set, w);
    const auto g = eval.evaluate_with_gradient(params);
    CHECK(g.report.total == eval.evaluate(params).total);
    const auto fd = oracle::fd_gradient(params, [&](const NetworkParams& q) { return eval.evaluate(q).total; });
    const double cos = oracle::cosine(g.gradient, fd);
    MESSAGE(to_string(problem.kind) << ": cosine " << std::setprecision(17) << cos);
    CHECK(cos > 1 - 1e-8);

    const auto tg = tape::grad_params(params, [&](std::span<const tape::Var> th) {
      return naive::composite<tape::Var>(problem, arch, th, set, w);
    });
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < tg.size(); ++i) {
      worst = std::max(worst, std::abs(tg[i] - g.gradient[i]));
      scale = std::max(scale, std::abs(tg[i]));
    }
    CHECK(worst / scale < 1e-11);
  }
}

TEST_CASE("zero-weight terms drop out of the gradient") {
  const auto problem = make_burgers();
  const auto params = oracle::random_params(tiny_arch(problem), 15);
  const auto set = small_set(problem, 16, true);
  const auto only_domain = LossEvaluator(problem, set, {1.0, 0.0, 0.0, 0.0}).evaluate_with_gradient(params);
  const auto g = tape::grad_params(params, [&](std::span<const tape::Var> th) {
    return naive::domain_loss<tape::Var>(problem, params.arch, th, set.domain);
  });
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(only_domain.gradient[i] == doctest::Approx(g[i]).epsilon(1e-11));
}

TEST_CASE("results do not depend on the worker count") {
  const auto problem = make_burgers();
  const auto params = oracle::random_params(NetworkArch{2, 1, 2, 2, 16}, 17);
  const auto set = make_train_set(problem, PointBudget{3 * kLossChunk + 77, 1500, 1100}, 18, 0);
  set_loss_threads(1);
  const auto a = LossEvaluator(problem, set, {}).evaluate_with_gradient(params);
  set_loss_threads(3);
  const auto b = LossEvaluator(problem, set, {}).evaluate_with_gradient(params);
  set_loss_threads(0);
  CHECK(a.report.total == b.report.total);
  CHECK(a.gradient == b.gradient);
}

TEST_CASE("non-finite terms are named") {
  const auto problem = make_burgers();
  const auto params = oracle::random_params(tiny_arch(problem), 19);
  TrainSet set = small_set(problem, 20, true);
  set.regulator->targets(3, 0) = 1e200;  // finite target, overflowing square
  try {
    composite_loss(params, problem, set, {});
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("data") != std::string::npos);
  }
  auto bad = params;
  bad.values[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(composite_loss(bad, problem, small_set(problem, 20, false), {}), NumericalError);
}

TEST_CASE("mismatched regulator dimensions are rejected") {
  const auto problem = make_ns(true);
  TrainSet set = small_set(problem, 21, false);
  set.regulator = RegulatorSet{Coords::Zero(3, 3), Eigen::MatrixXd::Zero(3, 1), RegulatorKind::sparse, 1.0};
  CHECK_THROWS_AS(LossEvaluator(problem, set, {}), DimensionError);
}
