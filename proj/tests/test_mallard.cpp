#include <doctest.h>

#include "tsmdp/estimation.hpp"
#include "tsmdp/mallard.hpp"

using namespace tsmdp;
using namespace tsmdp::mallard;

TEST_CASE("reproduction rate values") {
  CHECK(reproduction_rate(0.0, 0.0) == doctest::Approx(0.7166).epsilon(1e-12));
  // 0.7166 + 0.1083*3.36 - 0.0373*8
  CHECK(reproduction_rate(3.36, 8.0) ==
        doctest::Approx(0.7166 + 0.363888 - 0.2984).epsilon(1e-12));
  // raw value -0.4024 clamps to zero
  CHECK(reproduction_rate(0.0, 30.0) == 0.0);
}

TEST_CASE("closed season with unit survival leaves populations unchanged") {
  MallardParameters p;
  p.survival_adult_male = {1, 1, 1, 1};
  p.survival_adult_female = {1, 1, 1, 1};
  p.survival_young_male = {1, 1, 1, 1};
  p.survival_young_female = {1, 1, 1, 1};
  p.harvest_adult_male = MallardParameters::derived_harvest(p.survival_adult_male);
  p.harvest_adult_female = MallardParameters::derived_harvest(p.survival_adult_female);
  p.harvest_young_male = MallardParameters::derived_harvest(p.survival_young_male);
  p.harvest_young_female = MallardParameters::derived_harvest(p.survival_young_female);
  MallardModel m(p);

  MallardState s = initial_state(30.0);  // N large forces R = 0
  REQUIRE(reproduction_rate(s.ponds, s.total()) == 0.0);
  RngStream rng(1);
  const auto tr = m.sample_transition(s, Practice::kClosed, p.beta(), rng);
  CHECK(tr.next.adult_males == s.adult_males);
  CHECK(tr.next.adult_females == s.adult_females);
  CHECK(tr.next.young_males == s.young_males);
  CHECK(tr.next.young_females == s.young_females);
  CHECK(tr.utility == 0.0);
}

TEST_CASE("population step matches hand-evaluated difference equations") {
  MallardModel m;
  const auto& p = m.params();
  MallardState s;
  s.adult_males = 2.0;
  s.adult_females = 2.0;
  s.young_males = 1.0;
  s.young_females = 1.0;
  s.ponds = 3.0;

  const double rate = 0.7166 + 0.1083 * 3.0 - 0.0373 * 6.0;
  const double psi_am = p.survival_adult_male[0];
  const double psi_af = p.survival_adult_female[0];
  const double psi_ym = p.survival_young_male[0];
  const double psi_yf = p.survival_young_female[0];
  const double am = 2.0 * psi_am + 0.897 * 2.0 * rate * psi_ym;
  const double af = 2.0 * (psi_af + rate * psi_yf);
  const double ym = 1.0 * psi_am + 0.897 * 1.0 * rate * psi_ym;
  const double yf = 1.0 * (psi_af + rate * psi_yf);

  const auto next = m.population_step(s, Practice::kLiberal);
  CHECK(next.adult_males == doctest::Approx(am).epsilon(1e-10));
  CHECK(next.adult_females == doctest::Approx(af).epsilon(1e-10));
  CHECK(next.young_males == doctest::Approx(ym).epsilon(1e-10));
  CHECK(next.young_females == doctest::Approx(yf).epsilon(1e-10));
  CHECK(next.reproduction == doctest::Approx(rate).epsilon(1e-12));
}

TEST_CASE("pond transition mean matches the autoregression") {
  MallardModel m;
  MallardState s = initial_state(8.0);
  s.ponds = 3.0;
  RngStream rng(17);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += m.sample_transition(s, Practice::kLiberal, m.params().beta(), rng).next.ponds;
  CHECK(sum / n == doctest::Approx(2.2127 + 0.3420 * 3.0).epsilon(0.003 / 3.2387));
}

TEST_CASE("pond log density values") {
  MallardModel m;
  MallardState s = initial_state(8.0);
  s.ponds = 3.0;
  MallardState next = m.population_step(s, Practice::kModerate);
  const Vector beta = m.params().beta();

  next.ponds = beta[0] + beta[1] * 3.0;  // residual 0
  const double at_zero = m.log_density(s, Practice::kModerate, next, beta);
  CHECK(at_zero == doctest::Approx(-0.5 * std::log(2.0 * M_PI * 0.0625)).epsilon(1e-12));

  next.ponds += 0.25;  // one standard deviation
  CHECK(m.log_density(s, Practice::kModerate, next, beta) ==
        doctest::Approx(at_zero - 0.5).epsilon(1e-12));
}

TEST_CASE("impossible population transition is rejected") {
  MallardModel m;
  MallardState s = initial_state(8.0);
  MallardState next = m.population_step(s, Practice::kLiberal);
  next.adult_males += 0.5;
  CHECK_THROWS_AS(m.log_density(s, Practice::kLiberal, next, m.params().beta()),
                  ImpossibleTransitionError);
}

TEST_CASE("cached likelihood equals the per-step sum over a 50-year run") {
  MallardModel m;
  RngStream rng(23);
  std::vector<Practice> actions;
  for (int i = 0; i < 50; ++i)
    actions.push_back(kAllPractices[rng.uniform_index(4)]);
  const auto sim = simulate_years(m, initial_state(8.0), actions, rng);

  Vector beta(2);
  beta << 2.0, 0.4;
  const auto cached = m.make_loglik(sim.history);
  CHECK(cached(beta) == doctest::Approx(log_likelihood(sim.history, m, beta)).epsilon(1e-10));
}

TEST_CASE("one-step harvest is ordered liberal through closed") {
  MallardModel m;
  MallardState s = initial_state(9.5);
  const double liberal = harvest_yield(s, Practice::kLiberal, m.params());
  const double moderate = harvest_yield(s, Practice::kModerate, m.params());
  const double restricted = harvest_yield(s, Practice::kRestricted, m.params());
  const double closed = harvest_yield(s, Practice::kClosed, m.params());
  CHECK(liberal > moderate);
  CHECK(moderate > restricted);
  CHECK(restricted > closed);
  CHECK(closed == 0.0);
}

TEST_CASE("pond process is stationary around beta0/(1-beta1)") {
  MallardModel m;
  MallardState s = initial_state(8.0);
  RngStream rng(41);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    s = m.sample_transition(s, Practice::kLiberal, m.params().beta(), rng).next;
    sum += s.ponds;
  }
  CHECK(sum / n == doctest::Approx(2.2127 / (1.0 - 0.3420)).epsilon(0.02));
}

TEST_CASE("populations stay nonnegative under random actions") {
  MallardModel m;
  RngStream rng(59);
  MallardState s = initial_state(rng.uniform(2.0, 20.0));
  for (int i = 0; i < 10000; ++i) {
    if (i % 500 == 0) s = initial_state(rng.uniform(0.5, 25.0), 1995, rng.uniform(0.0, 8.0));
    s = m.sample_transition(s, kAllPractices[rng.uniform_index(4)], m.params().beta(), rng)
            .next;
    CHECK(s.adult_males >= 0.0);
    CHECK(s.adult_females >= 0.0);
    CHECK(s.young_males >= 0.0);
    CHECK(s.young_females >= 0.0);
    CHECK(s.ponds >= 0.0);
  }
}

TEST_CASE("pond mle matches closed-form least squares") {
  MallardModel m;
  RngStream rng(101);
  std::vector<Practice> actions(200, Practice::kLiberal);
  const auto sim = simulate_years(m, initial_state(8.0), actions, rng);

  double n = 0, sp = 0, spp = 0, sq = 0, sqp = 0;
  for (std::size_t v = 1; v < sim.history.size(); ++v) {
    const double p = sim.history[v - 1].state.ponds;
    const double q = sim.history[v].state.ponds;
    n += 1;
    sp += p;
    spp += p * p;
    sq += q;
    sqp += q * p;
  }
  const double b1 = (n * sqp - sq * sp) / (n * spp - sp * sp);
  const double b0 = (sq - b1 * sp) / n;

  FitOptions opts;
  opts.ridge = 0.0;
  const FitResult fit = fit_mle(sim.history, m, Vector::Zero(2), opts);
  CHECK(fit.converged);
  CHECK(fit.theta_hat[0] == doctest::Approx(b0).epsilon(1e-6));
  CHECK(fit.theta_hat[1] == doctest::Approx(b1).epsilon(1e-6));
}

TEST_CASE("mallard state serialization round-trips") {
  MallardModel m;
  RngStream rng(7);
  MallardState s = initial_state(rng.uniform(5.0, 15.0), 2001, rng.uniform(1.0, 6.0));
  s = m.sample_transition(s, Practice::kModerate, m.params().beta(), rng).next;
  const MallardState back = state_from_string(state_to_string(s));
  CHECK(back.adult_males == s.adult_males);
  CHECK(back.adult_females == s.adult_females);
  CHECK(back.young_males == s.young_males);
  CHECK(back.young_females == s.young_females);
  CHECK(back.ponds == s.ponds);
  CHECK(back.reproduction == s.reproduction);
  CHECK(back.year == s.year);
}

TEST_CASE("practice names round-trip") {
  for (Practice p : kAllPractices) CHECK(practice_from_name(practice_name(p)) == p);
  CHECK_THROWS_AS(practice_from_name("open"), ConfigError);
}
