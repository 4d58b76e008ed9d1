#pragma once

#include <array>
#include <string>
#include <vector>

#include "tsmdp/model.hpp"
#include "tsmdp/policy.hpp"

namespace tsmdp::mallard {

enum class Practice : int { kLiberal = 0, kModerate = 1, kRestricted = 2, kClosed = 3 };

inline constexpr std::array<Practice, 4> kAllPractices = {
    Practice::kLiberal, Practice::kModerate, Practice::kRestricted, Practice::kClosed};

const char* practice_name(Practice p);
Practice practice_from_name(const std::string& name);

/// Age/sex-structured population in millions, plus the pond count driving
/// reproduction. The reproduction field is the rate realized in the step
/// that produced this state.
struct MallardState {
  double adult_males = 0.0;
  double adult_females = 0.0;
  double young_males = 0.0;
  double young_females = 0.0;
  double ponds = 0.0;
  double reproduction = 0.0;
  int year = 0;

  double total() const {
    return adult_males + adult_females + young_males + young_females;
  }
};

/// Per-practice rate, indexed liberal / moderate / restricted / closed.
using PracticeTable = std::array<double, 4>;

/// System dynamics constants. The survival tables are treated as known to
/// the manager; only the pond autoregression (beta0, beta1) is estimated
/// online. Harvest rates default to the survival gap relative to a closed
/// season, which makes a closed year harvest-free by construction.
struct MallardParameters {
  double beta0 = 2.2127;
  double beta1 = 0.3420;
  double pond_sd = 0.25;

  PracticeTable survival_adult_male{0.81, 0.84, 0.88, 0.92};
  PracticeTable survival_adult_female{0.68, 0.71, 0.75, 0.79};
  PracticeTable survival_young_male{0.77, 0.80, 0.85, 0.90};
  PracticeTable survival_young_female{0.64, 0.67, 0.72, 0.77};

  PracticeTable harvest_adult_male = derived_harvest(survival_adult_male);
  PracticeTable harvest_adult_female = derived_harvest(survival_adult_female);
  PracticeTable harvest_young_male = derived_harvest(survival_young_male);
  PracticeTable harvest_young_female = derived_harvest(survival_young_female);

  static PracticeTable derived_harvest(const PracticeTable& survival) {
    PracticeTable h{};
    for (int a = 0; a < 4; ++a) h[a] = survival[3] - survival[a];
    return h;
  }

  Vector beta() const {
    Vector b(2);
    b << beta0, beta1;
    return b;
  }
};

/// Reproductive rate clamped at zero; the linear form goes negative for
/// large populations and a negative rate has no biological meaning.
inline double reproduction_rate(double ponds, double total_population) {
  const double raw = 0.7166 + 0.1083 * ponds - 0.0373 * total_population;
  return raw > 0.0 ? raw : 0.0;
}

// Harvest is reported in raw millions; utilities are scaled so the unit
// bound holds for every reachable state.
inline constexpr double kUtilityScale = 1.0 / 30.0;

double harvest_yield(const MallardState& s, Practice a, const MallardParameters& p);

/// Parametric dynamics model over theta = (beta0, beta1); both coordinates
/// are already unconstrained. Populations evolve deterministically given the
/// practice; only the pond transition is stochastic.
class MallardModel {
 public:
  using State = MallardState;
  using Action = Practice;

  MallardModel() = default;
  explicit MallardModel(MallardParameters params) : params_(std::move(params)) {}

  Eigen::Index parameter_dim() const { return 2; }
  Vector to_natural(const Vector& th) const { return th; }
  Vector to_unconstrained(const Vector& th) const { return th; }

  /// Deterministic population map; the pond component of the result is left
  /// at the current value and the reproduction field records the rate used.
  MallardState population_step(const MallardState& s, Practice a) const;

  Transition<MallardState> sample_transition(const MallardState& s, const Practice& a,
                                             const Vector& theta, RngStream& rng) const;

  double log_density(const MallardState& s, const Practice& a, const MallardState& next,
                     const Vector& theta) const;

  std::function<double(const Vector&)> make_loglik(
      const History<MallardState, Practice>& history) const;

  const MallardParameters& params() const { return params_; }

 private:
  MallardParameters params_;
};

struct FixedPracticePolicy {
  Practice practice;
  Practice act(const MallardState&, RngStream&) const { return practice; }
};

FiniteClass<FixedPracticePolicy> fixed_practice_class();

/// Builds the initial population for a given total size. Adults take 60%
/// of the population, young 40%, with even sex ratios throughout.
MallardState initial_state(double total_millions, int year = 1995,
                           double ponds = 3.363);

/// Default pre-management practice sequence, liberal-dominant like the
/// published record: two moderate seasons followed by liberal ones.
std::vector<Practice> default_historical_actions(int years = 22);

struct SimulatedYears {
  History<MallardState, Practice> history;
  MallardState final_state;
};

/// Rolls the true model forward under a fixed action sequence, recording
/// one history record per year.
SimulatedYears simulate_years(const MallardModel& model, const MallardState& start,
                              const std::vector<Practice>& actions, RngStream& rng);

std::string state_to_string(const MallardState& s);
MallardState state_from_string(const std::string& text);

}  // namespace tsmdp::mallard
