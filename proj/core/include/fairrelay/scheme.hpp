#pragma once

#include <stdexcept>
#include <string>

namespace fairrelay {

enum class SchemeKind { proposed, opportunistic, random };

/// A relay-selection protocol. `beta` is only meaningful for `proposed`;
/// `random` behaves as the proposed timers with beta = 0.
struct Scheme {
  SchemeKind kind = SchemeKind::proposed;
  double beta = 1.0;

  static Scheme proposed(double beta) { return {SchemeKind::proposed, beta}; }
  static Scheme opportunistic() { return {SchemeKind::opportunistic, 0.0}; }
  static Scheme random() { return {SchemeKind::random, 0.0}; }

  bool uses_timers() const { return kind != SchemeKind::opportunistic; }
  double timer_exponent() const { return kind == SchemeKind::proposed ? beta : 0.0; }

  std::string name() const {
    switch (kind) {
      case SchemeKind::proposed: return "proposed";
      case SchemeKind::opportunistic: return "opportunistic";
      case SchemeKind::random: return "random";
    }
    return "unknown";
  }

  static Scheme parse(const std::string& name, double beta) {
    if (name == "proposed") {
      if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
      return proposed(beta);
    }
    if (name == "opportunistic") return opportunistic();
    if (name == "random") return random();
    throw std::invalid_argument("unknown scheme '" + name + "'");
  }
};

}  // namespace fairrelay
