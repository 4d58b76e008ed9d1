#include <doctest.h>

#include "support/test_models.hpp"
#include "tsmdp/policy_eval.hpp"
#include "tsmdp/synthetic.hpp"

using namespace tsmdp;
using testing::DeterministicChain;
using testing::EnumerableMdp;
using testing::TablePolicy;

TEST_CASE("deterministic chain value is the exact geometric sum") {
  DeterministicChain chain(1.0);
  ConstantPolicy<int> always0{0};
  StreamFactory streams(123);
  const auto est =
      estimate_value(chain, Vector::Zero(1), always0, 3, 0, 16, 0.5, streams);
  CHECK(est.mean == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(est.standard_error == 0.0);
  CHECK(est.horizon == 3);
}

TEST_CASE("single-step value is the first utility") {
  DeterministicChain chain(0.37);
  ConstantPolicy<int> always0{0};
  StreamFactory streams(9);
  const auto est = estimate_value(chain, Vector::Zero(1), always0, 1, 5, 8, 0.9, streams);
  CHECK(est.mean == doctest::Approx(0.37));
}

TEST_CASE("monte carlo value matches exhaustive path enumeration") {
  EnumerableMdp::UtilityTable u{0.2, -0.4, 0.9, 0.1, -0.3, 0.5, 0.0, 0.7};
  EnumerableMdp mdp(u);
  Vector theta(4);
  theta << 0.3, -0.8, 1.2, 0.1;
  TablePolicy policy{{1, 0}};

  const double exact = mdp.exact_value(theta, policy, 4, 0, 0.9);
  StreamFactory streams(2024);
  const auto est = estimate_value(mdp, theta, policy, 4, 0, 100000, 0.9, streams);
  CHECK(std::fabs(est.mean - exact) < 3.0 * est.standard_error);
}

TEST_CASE("value never exceeds the discount bound") {
  EnumerableMdp::UtilityTable u{1, -1, 1, -1, 1, -1, 1, -1};
  EnumerableMdp mdp(u);
  RngStream param_rng(5);
  StreamFactory streams(77);
  for (int trial = 0; trial < 20; ++trial) {
    Vector theta(4);
    for (int j = 0; j < 4; ++j) theta[j] = param_rng.uniform(-2.0, 2.0);
    const double gamma = param_rng.uniform(0.1, 0.99);
    const int horizon = 1 + static_cast<int>(param_rng.uniform_index(8));
    const auto est = estimate_value(mdp, theta, TablePolicy{{0, 1}}, horizon, 0, 64,
                                    gamma, streams.child(trial));
    const double bound = (1.0 - std::pow(gamma, horizon)) / (1.0 - gamma);
    CHECK(std::fabs(est.mean) <= bound + 1e-12);
  }
}

TEST_CASE("gamma zero reduces to the first-step utility") {
  DeterministicChain chain(0.6);
  ConstantPolicy<int> always0{0};
  StreamFactory streams(4);
  const auto est =
      estimate_value(chain, Vector::Zero(1), always0, 5, 0, 32, 0.0, streams);
  CHECK(est.mean == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("common random numbers make repeated evaluation identical") {
  EnumerableMdp::UtilityTable u{0.1, 0.3, -0.2, 0.8, 0.4, -0.1, 0.6, 0.2};
  EnumerableMdp mdp(u);
  Vector theta(4);
  theta << 0.5, 0.5, -0.5, 1.0;
  StreamFactory streams(31);
  const auto a = estimate_value(mdp, theta, TablePolicy{{0, 1}}, 6, 0, 128, 0.9, streams);
  const auto b = estimate_value(mdp, theta, TablePolicy{{0, 1}}, 6, 0, 128, 0.9, streams);
  CHECK(a.mean == b.mean);
  CHECK(a.standard_error == b.standard_error);
}

TEST_CASE("standard error halves when rollouts quadruple") {
  EnumerableMdp::UtilityTable u{0.9, -0.9, 0.5, -0.5, 0.7, -0.7, 0.3, -0.3};
  EnumerableMdp mdp(u);
  Vector theta = Vector::Zero(4);
  double ratio_sum = 0.0;
  const int repeats = 20;
  for (int r = 0; r < repeats; ++r) {
    StreamFactory streams(800 + r);
    const auto small =
        estimate_value(mdp, theta, TablePolicy{{0, 1}}, 5, 0, 250, 0.9, streams.child(0));
    const auto large = estimate_value(mdp, theta, TablePolicy{{0, 1}}, 5, 0, 1000, 0.9,
                                      streams.child(1));
    ratio_sum += large.standard_error / small.standard_error;
  }
  CHECK(ratio_sum / repeats == doctest::Approx(0.5).epsilon(0.20));
}

TEST_CASE("argmax over one policy returns that policy") {
  DeterministicChain chain(1.0);
  FiniteClass<ConstantPolicy<int>> one{ConstantPolicy<int>{1}};
  OptimizeOptions opts;
  opts.rollouts = 4;
  opts.gamma = 0.5;
  StreamFactory streams(6);
  const auto r = optimize_policy(chain, Vector::Zero(1), one, 3, 0, opts, streams);
  CHECK(r.policy.action == 1);
  CHECK(r.evaluations == 1);
}

TEST_CASE("argmax picks the higher-value candidate") {
  DeterministicChain chain(1.0);  // action 0 pays 1 per step, action 1 pays 0
  FiniteClass<ConstantPolicy<int>> two{ConstantPolicy<int>{0}, ConstantPolicy<int>{1}};
  OptimizeOptions opts;
  opts.rollouts = 4;
  opts.gamma = 0.5;
  StreamFactory streams(6);
  const auto r = optimize_policy(chain, Vector::Zero(1), two, 3, 0, opts, streams);
  CHECK(r.policy.action == 0);
  CHECK(r.value.mean == doctest::Approx(1.75));
  CHECK(r.params[0] == 0.0);
}

TEST_CASE("equal-value candidates resolve to the lowest index") {
  DeterministicChain chain(0.0);  // both actions worth exactly zero
  FiniteClass<ConstantPolicy<int>> two{ConstantPolicy<int>{1}, ConstantPolicy<int>{0}};
  OptimizeOptions opts;
  opts.rollouts = 8;
  opts.gamma = 0.9;
  StreamFactory streams(14);
  const auto r = optimize_policy(chain, Vector::Zero(1), two, 4, 0, opts, streams);
  CHECK(r.params[0] == 0.0);
}

TEST_CASE("simplex search improves on an arbitrary threshold") {
  DriftChain::Config cfg;
  cfg.action_cost = 0.12;
  DriftChain chain(cfg);
  Vector theta = Vector::Constant(1, 0.6);
  ThresholdPolicyClass etas(-1.5, 1.5);

  OptimizeOptions opts;
  opts.rollouts = 64;
  opts.gamma = 0.9;
  opts.restarts = 2;
  StreamFactory streams(2718);
  const auto r = optimize_policy(chain, theta, etas, 12, 0.0, opts, streams);

  const StreamFactory crn = streams.child(stream_tag::kPolicySearch);
  const auto fixed = estimate_value(chain, theta, ThresholdPolicy{-1.5}, 12, 0.0,
                                    opts.rollouts, opts.gamma, crn);
  CHECK(r.value.mean >= fixed.mean);
  CHECK(!r.budget_exhausted);
}

TEST_CASE("exhausted budget is reported with the best so far") {
  DriftChain chain;
  Vector theta = Vector::Constant(1, 0.4);
  ThresholdPolicyClass etas;
  OptimizeOptions opts;
  opts.rollouts = 16;
  opts.gamma = 0.9;
  opts.eval_budget = 3;
  StreamFactory streams(12);
  const auto r = optimize_policy(chain, theta, etas, 5, 0.0, opts, streams);
  CHECK(r.budget_exhausted);
  CHECK(r.evaluations <= 4);  // budget plus the final re-evaluation
  CHECK(std::isfinite(r.value.mean));
}
