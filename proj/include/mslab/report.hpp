#pragma once

#include <string>

namespace mslab {

// Outcome of one inequality check. margin > 0 means the bound holds with
// room to spare; its unit depends on the check (absolute or log-space).
struct BoundCheck {
  bool premise_ok = true;
  bool bound_ok = true;
  double margin = 0.0;

  bool violated_with_premise() const { return premise_ok && !bound_ok; }
  std::string status() const {
    if (bound_ok) return "ok";
    return premise_ok ? "bound_violated" : "premise_violated";
  }
};

}  // namespace mslab
