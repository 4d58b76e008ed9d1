#include "tsmdp/mallard.hpp"

#include <cmath>
#include <sstream>

namespace tsmdp::mallard {

const char* practice_name(Practice p) {
  switch (p) {
    case Practice::kLiberal: return "liberal";
    case Practice::kModerate: return "moderate";
    case Practice::kRestricted: return "restricted";
    case Practice::kClosed: return "closed";
  }
  return "?";
}

Practice practice_from_name(const std::string& name) {
  for (Practice p : kAllPractices)
    if (name == practice_name(p)) return p;
  throw ConfigError("unknown practice '" + name + "'");
}

double harvest_yield(const MallardState& s, Practice a, const MallardParameters& p) {
  const int i = static_cast<int>(a);
  return s.adult_males * p.harvest_adult_male[i] +
         s.adult_females * p.harvest_adult_female[i] +
         s.young_males * p.harvest_young_male[i] +
         s.young_females * p.harvest_young_female[i];
}

MallardState MallardModel::population_step(const MallardState& s, Practice a) const {
  const int i = static_cast<int>(a);
  const double rate = reproduction_rate(s.ponds, s.total());
  const double psi_am = params_.survival_adult_male[i];
  const double psi_af = params_.survival_adult_female[i];
  const double psi_ym = params_.survival_young_male[i];
  const double psi_yf = params_.survival_young_female[i];

  MallardState next;
  next.adult_males = s.adult_males * psi_am + 0.897 * s.adult_males * rate * psi_ym;
  next.adult_females = s.adult_females * (psi_af + rate * psi_yf);
  next.young_males = s.young_males * psi_am + 0.897 * s.young_females * rate * psi_ym;
  next.young_females = s.young_females * (psi_af + rate * psi_yf);
  next.adult_males = std::max(0.0, next.adult_males);
  next.adult_females = std::max(0.0, next.adult_females);
  next.young_males = std::max(0.0, next.young_males);
  next.young_females = std::max(0.0, next.young_females);
  next.ponds = s.ponds;
  next.reproduction = rate;
  next.year = s.year + 1;
  return next;
}

Transition<MallardState> MallardModel::sample_transition(const MallardState& s,
                                                         const Practice& a,
                                                         const Vector& theta,
                                                         RngStream& rng) const {
  MallardState next = population_step(s, a);
  next.ponds = std::max(0.0, theta[0] + theta[1] * s.ponds +
                                 params_.pond_sd * rng.normal());
  const double utility = harvest_yield(s, a, params_) * kUtilityScale;
  return {next, utility};
}

double MallardModel::log_density(const MallardState& s, const Practice& a,
                                 const MallardState& next, const Vector& theta) const {
  const MallardState expected = population_step(s, a);
  const double mismatch =
      std::max({std::fabs(expected.adult_males - next.adult_males),
                std::fabs(expected.adult_females - next.adult_females),
                std::fabs(expected.young_males - next.young_males),
                std::fabs(expected.young_females - next.young_females)});
  if (mismatch > 1e-8)
    throw ImpossibleTransitionError(
        "population components differ from the deterministic map by " +
        std::to_string(mismatch));

  const double r = next.ponds - theta[0] - theta[1] * s.ponds;
  const double v = params_.pond_sd * params_.pond_sd;
  return -0.5 * (std::log(2.0 * M_PI * v) + r * r / v);
}

std::function<double(const Vector&)> MallardModel::make_loglik(
    const History<MallardState, Practice>& history) const {
  // Only the pond series carries information about theta; fold it into the
  // sufficient statistics of the Gaussian regression once.
  double n = 0, sp = 0, spp = 0, sq = 0, sqp = 0, sqq = 0;
  for (std::size_t v = 1; v < history.size(); ++v) {
    const MallardState expected =
        population_step(history[v - 1].state, history[v - 1].action);
    const MallardState& next = history[v].state;
    if (std::fabs(expected.adult_males - next.adult_males) > 1e-8 ||
        std::fabs(expected.adult_females - next.adult_females) > 1e-8 ||
        std::fabs(expected.young_males - next.young_males) > 1e-8 ||
        std::fabs(expected.young_females - next.young_females) > 1e-8)
      throw ImpossibleTransitionError("history contains an impossible transition");
    const double p = history[v - 1].state.ponds;
    const double q = next.ponds;
    n += 1;
    sp += p;
    spp += p * p;
    sq += q;
    sqp += q * p;
    sqq += q * q;
  }
  const double v2 = params_.pond_sd * params_.pond_sd;
  const double constant = -0.5 * n * std::log(2.0 * M_PI * v2);
  return [=](const Vector& th) {
    const double b0 = th[0], b1 = th[1];
    const double rss = sqq + n * b0 * b0 + b1 * b1 * spp - 2.0 * b0 * sq -
                       2.0 * b1 * sqp + 2.0 * b0 * b1 * sp;
    return constant - 0.5 * rss / v2;
  };
}

FiniteClass<FixedPracticePolicy> fixed_practice_class() {
  std::vector<FixedPracticePolicy> policies;
  std::vector<Vector> labels;
  for (Practice p : kAllPractices) {
    policies.push_back({p});
    labels.push_back(Vector::Constant(1, static_cast<double>(p)));
  }
  return FiniteClass<FixedPracticePolicy>(std::move(policies), std::move(labels));
}

MallardState initial_state(double total_millions, int year, double ponds) {
  MallardState s;
  s.adult_males = 0.30 * total_millions;
  s.adult_females = 0.30 * total_millions;
  s.young_males = 0.20 * total_millions;
  s.young_females = 0.20 * total_millions;
  s.ponds = ponds;
  s.reproduction = reproduction_rate(ponds, total_millions);
  s.year = year;
  return s;
}

std::vector<Practice> default_historical_actions(int years) {
  std::vector<Practice> actions(years, Practice::kLiberal);
  if (years > 0) actions[0] = Practice::kModerate;
  if (years > 1) actions[1] = Practice::kModerate;
  return actions;
}

SimulatedYears simulate_years(const MallardModel& model, const MallardState& start,
                              const std::vector<Practice>& actions, RngStream& rng) {
  SimulatedYears out;
  MallardState state = start;
  const Vector beta = model.params().beta();
  for (Practice a : actions) {
    auto tr = model.sample_transition(state, a, beta, rng);
    out.history.append(state, a, tr.utility);
    state = tr.next;
  }
  out.final_state = state;
  return out;
}

std::string state_to_string(const MallardState& s) {
  using H = History<double, int>;
  std::ostringstream os;
  os << H::double_to_hex(s.adult_males) << ';' << H::double_to_hex(s.adult_females)
     << ';' << H::double_to_hex(s.young_males) << ';'
     << H::double_to_hex(s.young_females) << ';' << H::double_to_hex(s.ponds) << ';'
     << H::double_to_hex(s.reproduction) << ';' << s.year;
  return os.str();
}

MallardState state_from_string(const std::string& text) {
  std::istringstream is(text);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(is, field, ';')) fields.push_back(field);
  if (fields.size() != 7) throw Error("malformed mallard state: " + text);
  using H = History<double, int>;
  MallardState s;
  s.adult_males = H::hex_to_double(fields[0]);
  s.adult_females = H::hex_to_double(fields[1]);
  s.young_males = H::hex_to_double(fields[2]);
  s.young_females = H::hex_to_double(fields[3]);
  s.ponds = H::hex_to_double(fields[4]);
  s.reproduction = H::hex_to_double(fields[5]);
  s.year = std::stoi(fields[6]);
  return s;
}

}  // namespace tsmdp::mallard
