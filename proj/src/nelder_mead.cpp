#include <algorithm>
#include <numeric>

#include "tsmdp/policy_eval.hpp"

namespace tsmdp::detail {

namespace {

struct Simplex {
  std::vector<Vector> points;
  std::vector<double> values;  // objective, maximized

  void sort_descending() {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<Vector> p(points.size());
    std::vector<double> v(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      p[i] = points[order[i]];
      v[i] = values[order[i]];
    }
    points.swap(p);
    values.swap(v);
  }

  double diameter() const {
    double d = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
      d = std::max(d, (points[i] - points[0]).norm());
    return d;
  }
};

}  // namespace

NelderMeadResult nelder_mead_maximize(const std::function<double(const Vector&)>& f,
                                      const std::vector<Vector>& initial_points,
                                      const NelderMeadOptions& opts) {
  NelderMeadResult out;
  out.evaluations = 0;
  out.budget_exhausted = false;
  out.best_value = -std::numeric_limits<double>::infinity();

  auto eval = [&](const Vector& x) {
    ++out.evaluations;
    const double v = f(x);
    if (v > out.best_value) {
      out.best_value = v;
      out.best_point = x;
    }
    return v;
  };
  auto budget_left = [&] { return out.evaluations < opts.eval_budget; };

  for (const Vector& x0 : initial_points) {
    if (!budget_left()) {
      out.budget_exhausted = true;
      break;
    }
    const Eigen::Index n = x0.size();
    Simplex s;
    s.points.push_back(x0);
    s.values.push_back(eval(x0));
    for (Eigen::Index j = 0; j < n && budget_left(); ++j) {
      Vector p = x0;
      p[j] += (p[j] != 0.0) ? 0.25 * std::abs(p[j]) + 0.1 : 0.25;
      s.points.push_back(p);
      s.values.push_back(eval(p));
    }
    if (s.points.size() < static_cast<std::size_t>(n) + 1) {
      out.budget_exhausted = true;
      break;
    }

    for (int iter = 0; iter < opts.max_iterations && budget_left(); ++iter) {
      s.sort_descending();
      if (s.diameter() < opts.tol) break;

      const std::size_t worst = s.points.size() - 1;
      Vector centroid = Vector::Zero(n);
      for (std::size_t i = 0; i < worst; ++i) centroid += s.points[i];
      centroid /= static_cast<double>(worst);

      const Vector reflected = centroid + (centroid - s.points[worst]);
      const double fr = eval(reflected);

      if (fr > s.values[0]) {
        if (!budget_left()) break;
        const Vector expanded = centroid + 2.0 * (centroid - s.points[worst]);
        const double fe = eval(expanded);
        if (fe > fr) {
          s.points[worst] = expanded;
          s.values[worst] = fe;
        } else {
          s.points[worst] = reflected;
          s.values[worst] = fr;
        }
      } else if (fr > s.values[worst - 1]) {
        s.points[worst] = reflected;
        s.values[worst] = fr;
      } else {
        if (!budget_left()) break;
        const Vector contracted = centroid + 0.5 * (s.points[worst] - centroid);
        const double fc = eval(contracted);
        if (fc > s.values[worst]) {
          s.points[worst] = contracted;
          s.values[worst] = fc;
        } else {
          // Shrink toward the best vertex.
          for (std::size_t i = 1; i < s.points.size() && budget_left(); ++i) {
            s.points[i] = s.points[0] + 0.5 * (s.points[i] - s.points[0]);
            s.values[i] = eval(s.points[i]);
          }
        }
      }
    }
    if (!budget_left()) out.budget_exhausted = true;
  }
  return out;
}

}  // namespace tsmdp::detail
