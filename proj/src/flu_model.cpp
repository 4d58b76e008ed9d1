#include "tsmdp/flu/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tsmdp::flu {

namespace {

constexpr double kSuscVar =
    FluParameters::kSusceptibilitySd * FluParameters::kSusceptibilitySd;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Loc healthy_location(Role role, bool weekday) {
  switch (role) {
    case Role::kStudent: return weekday ? Loc::kSchool : Loc::kPublic;
    case Role::kEmployed: return weekday ? Loc::kWork : Loc::kPublic;
    case Role::kRetired: return Loc::kPublic;
  }
  return Loc::kHome;
}

// Attendance parameter cell: retiree / student x day type / employee x day
// type. Infected agents leave home with the cell's probability.
int attendance_cell(Role role, bool weekday) {
  switch (role) {
    case Role::kRetired: return 0;
    case Role::kStudent: return weekday ? 1 : 2;
    case Role::kEmployed: return weekday ? 3 : 4;
  }
  return 0;
}

double cell_probability(const FluParameters& p, int cell) {
  switch (cell) {
    case 0: return p.p_retired_public;
    case 1: return p.p_student_school;
    case 2: return p.p_student_public;
    case 3: return p.p_employee_work;
    case 4: return p.p_employee_public;
  }
  return 0.0;
}

Loc infected_out_location(Role role, bool weekday) {
  if (role == Role::kStudent && weekday) return Loc::kSchool;
  if (role == Role::kEmployed && weekday) return Loc::kWork;
  return Loc::kPublic;
}

double gauss_log(double residual, double variance) {
  return -0.5 * (std::log(2.0 * M_PI * variance) + residual * residual / variance);
}

}  // namespace

Vector FluParameters::online_unconstrained() const {
  Vector u(kOnlineDim);
  u[0] = logit(p_retired_public);
  u[1] = logit(p_student_school);
  u[2] = logit(p_student_public);
  u[3] = logit(p_employee_work);
  u[4] = logit(p_employee_public);
  u[5] = std::atanh(rho);
  u[6] = nu;
  u[7] = logit(p_contact);
  for (int i = 0; i < 7; ++i) u[8 + i] = vartheta[i];
  return u;
}

FluParameters FluParameters::from_online(const Vector& u, double z0, double z1) {
  FluParameters p;
  p.zeta0 = z0;
  p.zeta1 = z1;
  p.p_retired_public = expit(u[0]);
  p.p_student_school = expit(u[1]);
  p.p_student_public = expit(u[2]);
  p.p_employee_work = expit(u[3]);
  p.p_employee_public = expit(u[4]);
  p.rho = std::tanh(u[5]);
  p.nu = u[6];
  p.p_contact = expit(u[7]);
  for (int i = 0; i < 7; ++i) p.vartheta[i] = u[8 + i];
  return p;
}

Vector FluParameters::full_unconstrained() const {
  Vector u(kFullDim);
  u[0] = zeta0;
  u[1] = zeta1;
  u.segment(2, kOnlineDim) = online_unconstrained();
  return u;
}

FluParameters FluParameters::from_full(const Vector& u) {
  return from_online(u.segment(2, kOnlineDim), u[0], u[1]);
}

LocationProbs attendance_distribution(Role role, bool weekday, bool infected,
                                      const FluParameters& p) {
  LocationProbs probs;
  if (!infected) {
    switch (healthy_location(role, weekday)) {
      case Loc::kSchool: probs.school = 1.0; break;
      case Loc::kWork: probs.work = 1.0; break;
      case Loc::kPublic: probs.pub = 1.0; break;
      case Loc::kHome: probs.home = 1.0; break;
    }
    return probs;
  }
  const double go = cell_probability(p, attendance_cell(role, weekday));
  probs.home = 1.0 - go;
  switch (infected_out_location(role, weekday)) {
    case Loc::kSchool: probs.school = go; break;
    case Loc::kWork: probs.work = go; break;
    default: probs.pub = go; break;
  }
  return probs;
}

double per_contact_probability(const FluParameters& p, double age_l, double susc_l,
                               int treat_l, int treat_i, double age_i) {
  const double dage = age_l - age_i;
  const double lin = p.vartheta[0] + p.vartheta[1] * age_l + p.vartheta[2] * susc_l +
                     p.vartheta[3] * treat_l + p.vartheta[4] * treat_i +
                     p.vartheta[5] * treat_i * treat_l + p.vartheta[6] * dage * dage;
  return p.p_contact * expit(lin);
}

double infection_probability(const FluParameters& p, double age_l, double susc_l,
                             int treat_l, std::span<const ContactTerm> contacts) {
  double no_infection = 1.0;
  for (const ContactTerm& c : contacts)
    no_infection *=
        1.0 - per_contact_probability(p, age_l, susc_l, treat_l, c.treat_contact,
                                      c.age_contact);
  return 1.0 - no_infection;
}

FluModel::FluModel(std::shared_ptr<const FluTopology> topology, FluParameters true_params,
                   double recovery_prob)
    : topology_(std::move(topology)),
      true_params_(true_params),
      recovery_prob_(recovery_prob) {}

Vector FluModel::to_natural(const Vector& theta) const {
  const FluParameters p = params_from_theta(theta);
  Vector nat(FluParameters::kOnlineDim);
  nat << p.p_retired_public, p.p_student_school, p.p_student_public, p.p_employee_work,
      p.p_employee_public, p.rho, p.nu, p.p_contact, p.vartheta[0], p.vartheta[1],
      p.vartheta[2], p.vartheta[3], p.vartheta[4], p.vartheta[5], p.vartheta[6];
  return nat;
}

Vector FluModel::to_unconstrained(const Vector& natural) const {
  FluParameters p;
  p.p_retired_public = natural[0];
  p.p_student_school = natural[1];
  p.p_student_public = natural[2];
  p.p_employee_work = natural[3];
  p.p_employee_public = natural[4];
  p.rho = natural[5];
  p.nu = natural[6];
  p.p_contact = natural[7];
  for (int i = 0; i < 7; ++i) p.vartheta[i] = natural[8 + i];
  return p.online_unconstrained();
}

FluParameters FluModel::params_from_theta(const Vector& theta) const {
  return FluParameters::from_online(theta, true_params_.zeta0, true_params_.zeta1);
}

void FluModel::infectious_contacts(const FluPopulationState& s,
                                   const std::vector<Loc>& where, int agent,
                                   std::vector<std::int32_t>& out) const {
  out.clear();
  const Loc loc = where[agent];
  const FluTopology& topo = *topology_;
  auto consider = [&](std::int32_t other) {
    if (other != agent && s.status[other] == 1 && where[other] == loc)
      out.push_back(other);
  };
  switch (loc) {
    case Loc::kHome:
      for (std::int32_t member : topo.family_members[topo.family[agent]])
        consider(member);
      break;
    case Loc::kSchool:
      for (std::int32_t other : topo.school_net[agent]) consider(other);
      break;
    case Loc::kWork:
      for (std::int32_t other : topo.work_net[agent]) consider(other);
      break;
    case Loc::kPublic:
      for (std::int32_t other : topo.public_net[agent]) consider(other);
      break;
  }
}

Transition<FluPopulationState> FluModel::sample_transition(const FluPopulationState& s,
                                                           const FluAction& a,
                                                           const Vector& theta,
                                                           RngStream& rng) const {
  const FluTopology& topo = *topology_;
  const int L = topo.population;
  if (static_cast<int>(a.size()) != L)
    throw DomainError("action vector size != population");
  const FluParameters p = params_from_theta(theta);
  const bool weekday = is_weekday(s.day);

  // Draw order is fixed: attendance, infections, recoveries, susceptibility,
  // each in agent-index order, so a replay is bit-identical.
  std::vector<Loc> where(L);
  for (int i = 0; i < L; ++i) {
    if (s.status[i] == 1) {
      const double go = cell_probability(p, attendance_cell(topo.role[i], weekday));
      where[i] = rng.bernoulli(go) ? infected_out_location(topo.role[i], weekday)
                                   : Loc::kHome;
    } else {
      where[i] = healthy_location(topo.role[i], weekday);
    }
  }

  FluPopulationState next;
  next.status = s.status;
  next.susceptibility.resize(L);
  next.attendance = where;
  next.day = s.day + 1;

  int new_infections = 0;
  std::vector<std::int32_t> contacts;
  for (int i = 0; i < L; ++i) {
    if (s.status[i] != 0) continue;
    infectious_contacts(s, where, i, contacts);
    if (contacts.empty()) continue;
    double no_infection = 1.0;
    for (std::int32_t c : contacts)
      no_infection *= 1.0 - per_contact_probability(p, topo.age[i], s.susceptibility[i],
                                                    a[i], a[c], topo.age[c]);
    if (rng.bernoulli(1.0 - no_infection)) {
      next.status[i] = 1;
      ++new_infections;
    }
  }

  for (int i = 0; i < L; ++i) {
    if (s.status[i] == 1 && rng.bernoulli(recovery_prob_)) next.status[i] = 2;
  }

  for (int i = 0; i < L; ++i) {
    next.susceptibility[i] = p.rho * s.susceptibility[i] + p.nu * a[i] +
                             FluParameters::kSusceptibilitySd * rng.normal();
  }

  const double utility = -static_cast<double>(new_infections) / L;
  return {std::move(next), utility};
}

FluLogDensityParts FluModel::log_density_parts(const FluPopulationState& s,
                                               const FluAction& a,
                                               const FluPopulationState& next,
                                               const Vector& theta) const {
  const FluTopology& topo = *topology_;
  const int L = topo.population;
  const FluParameters p = params_from_theta(theta);
  const bool weekday = is_weekday(s.day);

  FluLogDensityParts parts;
  if (static_cast<int>(a.size()) != L || static_cast<int>(next.status.size()) != L ||
      static_cast<int>(s.status.size()) != L) {
    parts.infection = kNegInf;
    return parts;
  }

  std::vector<std::int32_t> contacts;
  for (int i = 0; i < L; ++i) {
    const std::uint8_t from = s.status[i], to = next.status[i];
    const bool legal = (from == 0 && (to == 0 || to == 1)) ||
                       (from == 1 && (to == 1 || to == 2)) || (from == 2 && to == 2);
    if (!legal) {  // resurrection or un-recovery cannot occur
      parts.infection = kNegInf;
      return parts;
    }

    // Attendance: infected agents randomize; everyone else is deterministic
    // and contributes nothing.
    const Loc went = next.attendance[i];
    if (from == 1) {
      const double go = cell_probability(p, attendance_cell(topo.role[i], weekday));
      if (went == infected_out_location(topo.role[i], weekday))
        parts.attendance += std::log(go);
      else if (went == Loc::kHome)
        parts.attendance += std::log1p(-go);
      else
        parts.attendance = kNegInf;
    } else if (went != healthy_location(topo.role[i], weekday)) {
      parts.attendance = kNegInf;
    }

    if (from == 0) {
      infectious_contacts(s, next.attendance, i, contacts);
      double no_infection = 1.0;
      for (std::int32_t c : contacts)
        no_infection *= 1.0 - per_contact_probability(p, topo.age[i],
                                                      s.susceptibility[i], a[i], a[c],
                                                      topo.age[c]);
      if (to == 1)
        parts.infection += no_infection < 1.0 ? std::log(1.0 - no_infection) : kNegInf;
      else
        parts.infection += no_infection > 0.0 ? std::log(no_infection) : kNegInf;
    }

    const double residual =
        next.susceptibility[i] - p.rho * s.susceptibility[i] - p.nu * a[i];
    parts.susceptibility += gauss_log(residual, kSuscVar);
  }
  return parts;
}

double FluModel::log_density(const FluPopulationState& s, const FluAction& a,
                             const FluPopulationState& next, const Vector& theta) const {
  return log_density_parts(s, a, next, theta).total();
}

namespace {

/// Digest of a history: everything the likelihood needs, laid out flat.
struct FluLoglikCache {
  // Susceptibility Gaussian sufficient statistics.
  double n = 0, s_pp = 0, s_pn = 0, s_an = 0, s_pa = 0, s_aa = 0, s_nn = 0;
  // Attendance outcomes of infected agents, per parameter cell.
  std::array<double, 5> went{};
  std::array<double, 5> stayed{};
  // Exposure records: per susceptible agent-day with contacts.
  std::vector<double> pair_data;  // (age_l, susc_l, treat_l, treat_i, dage^2)*
  std::vector<std::int64_t> offsets{0};
  std::vector<std::uint8_t> infected;
};

}  // namespace

std::function<double(const Vector&)> FluModel::make_loglik(
    const History<FluPopulationState, FluAction>& history) const {
  const FluTopology& topo = *topology_;
  const int L = topo.population;
  auto cache = std::make_shared<FluLoglikCache>();

  std::vector<std::int32_t> contacts;
  for (std::size_t v = 1; v < history.size(); ++v) {
    const FluPopulationState& cur = history[v - 1].state;
    const FluPopulationState& nxt = history[v].state;
    const FluAction& act = history[v - 1].action;
    const bool weekday = is_weekday(cur.day);

    for (int i = 0; i < L; ++i) {
      const std::uint8_t from = cur.status[i], to = nxt.status[i];
      const bool legal = (from == 0 && (to == 0 || to == 1)) ||
                         (from == 1 && (to == 1 || to == 2)) || (from == 2 && to == 2);
      if (!legal)
        throw ImpossibleTransitionError("illegal status transition in history");

      if (from == 1) {
        const int cell = attendance_cell(topo.role[i], weekday);
        if (nxt.attendance[i] == Loc::kHome)
          cache->stayed[cell] += 1;
        else
          cache->went[cell] += 1;
      }

      if (from == 0) {
        infectious_contacts(cur, nxt.attendance, i, contacts);
        if (!contacts.empty()) {
          for (std::int32_t c : contacts) {
            const double dage = double(topo.age[i]) - double(topo.age[c]);
            cache->pair_data.insert(cache->pair_data.end(),
                                    {double(topo.age[i]), cur.susceptibility[i],
                                     double(act[i]), double(act[c]), dage * dage});
          }
          cache->offsets.push_back(static_cast<std::int64_t>(cache->pair_data.size() / 5));
          cache->infected.push_back(to == 1 ? 1 : 0);
        } else if (to == 1) {
          throw ImpossibleTransitionError("infection without any infectious contact");
        }
      }

      const double prev = cur.susceptibility[i];
      const double nextv = nxt.susceptibility[i];
      const double treat = act[i];
      cache->n += 1;
      cache->s_pp += prev * prev;
      cache->s_pn += prev * nextv;
      cache->s_an += treat * nextv;
      cache->s_pa += prev * treat;
      cache->s_aa += treat * treat;
      cache->s_nn += nextv * nextv;
    }
  }

  return [cache](const Vector& theta) {
    const FluParameters p = FluParameters::from_online(theta, 0.0, 0.0);

    double ll = -0.5 * cache->n * std::log(2.0 * M_PI * kSuscVar);
    const double rho = p.rho, nu = p.nu;
    const double rss = cache->s_nn + rho * rho * cache->s_pp + nu * nu * cache->s_aa -
                       2.0 * rho * cache->s_pn - 2.0 * nu * cache->s_an +
                       2.0 * rho * nu * cache->s_pa;
    ll += -0.5 * rss / kSuscVar;

    for (int cell = 0; cell < 5; ++cell) {
      const double go = cell_probability(p, cell);
      if (cache->went[cell] > 0) ll += cache->went[cell] * std::log(go);
      if (cache->stayed[cell] > 0) ll += cache->stayed[cell] * std::log1p(-go);
    }

    const double* d = cache->pair_data.data();
    for (std::size_t obs = 0; obs + 1 < cache->offsets.size(); ++obs) {
      double no_infection = 1.0;
      for (std::int64_t k = cache->offsets[obs]; k < cache->offsets[obs + 1]; ++k) {
        const double* row = d + 5 * k;
        const double lin = p.vartheta[0] + p.vartheta[1] * row[0] +
                           p.vartheta[2] * row[1] + p.vartheta[3] * row[2] +
                           p.vartheta[4] * row[3] + p.vartheta[5] * row[2] * row[3] +
                           p.vartheta[6] * row[4];
        no_infection *= 1.0 - p.p_contact * expit(lin);
      }
      if (cache->infected[obs])
        ll += no_infection < 1.0 ? std::log(1.0 - no_infection) : kNegInf;
      else
        ll += no_infection > 0.0 ? std::log(no_infection) : kNegInf;
    }
    return ll;
  };
}

FluPopulationState FluModel::initial_state(double infected_fraction,
                                           RngStream& rng) const {
  const FluTopology& topo = *topology_;
  const int L = topo.population;
  FluPopulationState s;
  s.status.assign(L, 0);
  s.susceptibility.resize(L);
  s.attendance.assign(L, Loc::kHome);
  s.day = 0;

  for (int i = 0; i < L; ++i)
    s.susceptibility[i] =
        true_params_.zeta0 + true_params_.zeta1 * topo.age[i] + rng.normal();

  const int n_infected =
      std::min(L, static_cast<int>(std::lround(infected_fraction * L)));
  std::vector<std::int32_t> order(L);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < n_infected; ++i) {
    const int j = i + static_cast<int>(rng.uniform_index(L - i));
    std::swap(order[i], order[j]);
    s.status[order[i]] = 1;
  }
  return s;
}

std::pair<double, double> fit_zeta(const FluTopology& topo,
                                   const FluPopulationState& state) {
  const int L = topo.population;
  double sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (int i = 0; i < L; ++i) {
    const double x = topo.age[i];
    const double y = state.susceptibility[i];
    sx += x;
    sxx += x * x;
    sy += y;
    sxy += x * y;
  }
  const double denom = L * sxx - sx * sx;
  if (std::fabs(denom) < 1e-12) return {sy / L, 0.0};
  const double z1 = (L * sxy - sx * sy) / denom;
  const double z0 = (sy - z1 * sx) / L;
  return {z0, z1};
}

std::string state_to_string(const FluPopulationState& s) {
  using H = History<double, int>;
  std::ostringstream os;
  os << s.day << '|';
  for (auto v : s.status) os << char('0' + v);
  os << '|';
  for (auto v : s.attendance) os << char('0' + static_cast<int>(v));
  os << '|';
  for (std::size_t i = 0; i < s.susceptibility.size(); ++i) {
    if (i) os << ';';
    os << H::double_to_hex(s.susceptibility[i]);
  }
  return os.str();
}

FluPopulationState state_from_string(const std::string& text) {
  using H = History<double, int>;
  FluPopulationState s;
  std::istringstream is(text);
  std::string day_field, status_field, att_field, susc_field;
  if (!std::getline(is, day_field, '|') || !std::getline(is, status_field, '|') ||
      !std::getline(is, att_field, '|') || !std::getline(is, susc_field))
    throw Error("malformed flu state");
  s.day = std::stoi(day_field);
  s.status.reserve(status_field.size());
  for (char c : status_field) s.status.push_back(static_cast<std::uint8_t>(c - '0'));
  for (char c : att_field) s.attendance.push_back(static_cast<Loc>(c - '0'));
  std::istringstream ss(susc_field);
  std::string item;
  while (std::getline(ss, item, ';')) s.susceptibility.push_back(H::hex_to_double(item));
  return s;
}

std::string action_to_string(const FluAction& a) {
  std::string out;
  out.reserve(a.size());
  for (auto v : a) out.push_back(char('0' + v));
  return out;
}

FluAction action_from_string(const std::string& text) {
  FluAction a;
  a.reserve(text.size());
  for (char c : text) a.push_back(static_cast<std::uint8_t>(c - '0'));
  return a;
}

void write_state_snapshot(std::ostream& out, const FluTopology& topo,
                          const FluPopulationState& state) {
  out << "agent,status,age,susceptibility,family,school,work\n";
  for (int i = 0; i < topo.population; ++i) {
    out << i << ',' << int(state.status[i]) << ',' << topo.age[i] << ','
        << state.susceptibility[i] << ',' << topo.family[i] << ',' << topo.school[i]
        << ',' << topo.work[i] << '\n';
  }
}

}  // namespace tsmdp::flu
