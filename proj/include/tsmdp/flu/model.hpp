#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>

#include "tsmdp/flu/topology.hpp"
#include "tsmdp/model.hpp"

namespace tsmdp::flu {

inline double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Natural-scale dynamics parameters. The initial-susceptibility regression
/// (zeta) is fit once from the first cross-section and frozen; the 15
/// remaining coordinates are estimated online. Probabilities map to logits
/// and the AR coefficient to atanh on the unconstrained scale.
struct FluParameters {
  double zeta0 = 4.16;
  double zeta1 = -0.119;
  double p_retired_public = 0.5;   // infected retiree attends the public space
  double p_student_school = 0.5;   // infected student attends school (weekday)
  double p_student_public = 0.5;   // infected student attends public (weekend)
  double p_employee_work = 0.5;    // infected employee attends work (weekday)
  double p_employee_public = 0.5;  // infected employee attends public (weekend)
  double rho = 0.8;                // susceptibility autoregression
  double nu = -0.01;               // treatment effect on susceptibility
  double p_contact = 0.8;          // transmission chance given a contact
  std::array<double, 7> vartheta{-0.5, -0.01, 0.8, -3.5, -3.5, -6.0, -0.001};

  static constexpr int kOnlineDim = 15;
  static constexpr int kFullDim = 17;
  static constexpr double kSusceptibilitySd = 0.5;  // variance 0.25, known

  Vector online_unconstrained() const;
  static FluParameters from_online(const Vector& u, double zeta0, double zeta1);
  Vector full_unconstrained() const;
  static FluParameters from_full(const Vector& u);
};

enum class Loc : std::uint8_t { kHome = 0, kSchool = 1, kWork = 2, kPublic = 3 };

/// Mutable per-day population state. `attendance` records where each agent
/// spent the day that produced this state, so the transition density can be
/// evaluated from consecutive states alone. Day 0 is a Monday.
struct FluPopulationState {
  std::vector<std::uint8_t> status;  // 0 susceptible, 1 infected, 2 recovered
  std::vector<double> susceptibility;
  std::vector<Loc> attendance;
  int day = 0;

  int count(std::uint8_t s) const {
    int c = 0;
    for (auto v : status) c += v == s;
    return c;
  }
};

using FluAction = std::vector<std::uint8_t>;

/// Where an agent goes today, as a distribution over locations given role,
/// day type and current infection status. Healthy agents follow fixed rules;
/// infected agents randomize between their usual place and home.
struct LocationProbs {
  double home = 0.0, school = 0.0, work = 0.0, pub = 0.0;
  double at(Loc loc) const {
    switch (loc) {
      case Loc::kHome: return home;
      case Loc::kSchool: return school;
      case Loc::kWork: return work;
      case Loc::kPublic: return pub;
    }
    return 0.0;
  }
};

LocationProbs attendance_distribution(Role role, bool weekday, bool infected,
                                      const FluParameters& p);

/// Per-contact transmission probability p_c * expit(linear predictor).
double per_contact_probability(const FluParameters& p, double age_l, double susc_l,
                               int treat_l, int treat_i, double age_i);

struct ContactTerm {
  int treat_contact = 0;
  double age_contact = 0.0;
};

/// 1 - prod over infected contacts of (1 - per-contact probability).
double infection_probability(const FluParameters& p, double age_l, double susc_l,
                             int treat_l, std::span<const ContactTerm> contacts);

/// Breakdown of a transition log-density into its stochastic term groups.
/// Deterministic sub-transitions (healthy-agent attendance, recovery, which
/// is a known constant rate outside theta) contribute zero to every part.
struct FluLogDensityParts {
  double attendance = 0.0;
  double infection = 0.0;
  double susceptibility = 0.0;
  double total() const { return attendance + infection + susceptibility; }
};

class FluModel {
 public:
  using State = FluPopulationState;
  using Action = FluAction;

  FluModel(std::shared_ptr<const FluTopology> topology, FluParameters true_params,
           double recovery_prob = 0.25);

  Eigen::Index parameter_dim() const { return FluParameters::kOnlineDim; }
  Vector to_natural(const Vector& theta) const;
  Vector to_unconstrained(const Vector& natural) const;

  /// Natural-scale parameter bundle for an online theta, with the frozen
  /// zeta coordinates filled in.
  FluParameters params_from_theta(const Vector& theta) const;

  Transition<FluPopulationState> sample_transition(const FluPopulationState& s,
                                                   const FluAction& a, const Vector& theta,
                                                   RngStream& rng) const;

  double log_density(const FluPopulationState& s, const FluAction& a,
                     const FluPopulationState& next, const Vector& theta) const;

  FluLogDensityParts log_density_parts(const FluPopulationState& s, const FluAction& a,
                                       const FluPopulationState& next,
                                       const Vector& theta) const;

  std::function<double(const Vector&)> make_loglik(
      const History<FluPopulationState, FluAction>& history) const;

  /// Agents infected at the start of the day who could transmit to agent l,
  /// given everyone's location: same place, linked by that place's network.
  void infectious_contacts(const FluPopulationState& s, const std::vector<Loc>& where,
                           int agent, std::vector<std::int32_t>& out) const;

  FluPopulationState initial_state(double infected_fraction, RngStream& rng) const;

  const FluTopology& topology() const { return *topology_; }
  std::shared_ptr<const FluTopology> topology_ptr() const { return topology_; }
  const FluParameters& true_params() const { return true_params_; }
  double recovery_prob() const { return recovery_prob_; }

 private:
  std::shared_ptr<const FluTopology> topology_;
  FluParameters true_params_;
  double recovery_prob_;
};

/// OLS fit of susceptibility on age over one cross-section.
std::pair<double, double> fit_zeta(const FluTopology& topo,
                                   const FluPopulationState& state);

std::string state_to_string(const FluPopulationState& s);
FluPopulationState state_from_string(const std::string& text);
std::string action_to_string(const FluAction& a);
FluAction action_from_string(const std::string& text);

/// One row per agent: id, status, age, susceptibility, family, school, work.
void write_state_snapshot(std::ostream& out, const FluTopology& topo,
                          const FluPopulationState& state);

}  // namespace tsmdp::flu
