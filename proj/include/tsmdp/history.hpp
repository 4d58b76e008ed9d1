#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tsmdp/errors.hpp"

namespace tsmdp {

template <class S, class A>
struct Record {
  S state;
  A action;
  double utility = 0.0;
};

/// Append-only stream of (state, action, utility) records observed by the
/// decision maker. Utilities are rejected outside [-1, 1]; the engine's
/// guarantees are void without that bound, so a violation is a hard error.
template <class S, class A>
class History {
 public:
  using RecordType = Record<S, A>;

  void append(S state, A action, double utility) {
    if (!(std::fabs(utility) <= 1.0)) {
      throw UtilityBoundError("utility " + std::to_string(utility) +
                              " outside [-1, 1]");
    }
    records_.push_back(RecordType{std::move(state), std::move(action), utility});
  }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const RecordType& operator[](std::size_t i) const { return records_[i]; }
  const RecordType& back() const { return records_.back(); }

  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  /// Streams records as CSV rows (t, state, action, utility). The state and
  /// action columns use the environment-supplied encodings, which must not
  /// contain commas. Doubles are written as hex floats so a reload is
  /// bit-exact.
  template <class StateEnc, class ActionEnc>
  void write_csv(std::ostream& out, StateEnc&& enc_state, ActionEnc&& enc_action) const {
    out << "t,state,action,utility\n";
    for (std::size_t i = 0; i < records_.size(); ++i) {
      out << (i + 1) << ',' << enc_state(records_[i].state) << ','
          << enc_action(records_[i].action) << ',' << double_to_hex(records_[i].utility)
          << '\n';
    }
  }

  template <class StateEnc, class ActionEnc>
  void save_csv(const std::string& path, StateEnc&& enc_state, ActionEnc&& enc_action) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    write_csv(out, enc_state, enc_action);
  }

  template <class StateDec, class ActionDec>
  static History load_csv(std::istream& in, StateDec&& dec_state, ActionDec&& dec_action) {
    History h;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::size_t p1 = line.find(',');
      std::size_t p2 = line.find(',', p1 + 1);
      std::size_t p3 = line.rfind(',');
      if (p1 == std::string::npos || p2 == std::string::npos || p3 <= p2)
        throw Error("malformed history row: " + line);
      h.append(dec_state(line.substr(p1 + 1, p2 - p1 - 1)),
               dec_action(line.substr(p2 + 1, p3 - p2 - 1)),
               hex_to_double(line.substr(p3 + 1)));
    }
    return h;
  }

  template <class StateDec, class ActionDec>
  static History load_csv_file(const std::string& path, StateDec&& dec_state,
                               ActionDec&& dec_action) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return load_csv(in, dec_state, dec_action);
  }

  static std::string double_to_hex(double v) {
    std::ostringstream os;
    os << std::hexfloat << v;
    return os.str();
  }

  static double hex_to_double(const std::string& s) {
    return std::strtod(s.c_str(), nullptr);
  }

 private:
  std::vector<RecordType> records_;
};

}  // namespace tsmdp
