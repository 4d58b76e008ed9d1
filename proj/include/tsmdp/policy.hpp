#pragma once

#include <vector>

#include "tsmdp/model.hpp"

namespace tsmdp {

/// Finite policy class backed by an explicit candidate list. params(i) is
/// the candidate index unless labels are provided.
template <class P>
class FiniteClass {
 public:
  using PolicyType = P;

  FiniteClass() = default;
  FiniteClass(std::initializer_list<P> policies) : policies_(policies) {}
  explicit FiniteClass(std::vector<P> policies) : policies_(std::move(policies)) {}
  FiniteClass(std::vector<P> policies, std::vector<Vector> labels)
      : policies_(std::move(policies)), labels_(std::move(labels)) {}

  void add(P policy) { policies_.push_back(std::move(policy)); }

  std::size_t size() const { return policies_.size(); }
  const P& policy(std::size_t i) const { return policies_[i]; }
  Vector params(std::size_t i) const {
    if (!labels_.empty()) return labels_[i];
    Vector v(1);
    v[0] = static_cast<double>(i);
    return v;
  }

 private:
  std::vector<P> policies_;
  std::vector<Vector> labels_;
};

/// Plays one fixed action everywhere.
template <class A>
struct ConstantPolicy {
  A action;
  template <class S>
  A act(const S&, RngStream&) const {
    return action;
  }
};

}  // namespace tsmdp
