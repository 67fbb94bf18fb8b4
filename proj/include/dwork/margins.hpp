#pragma once

#include <string>
#include <vector>

namespace dwork {

// One compared quantity: `margin` is the valuation of the residual (capped at
// the precision it is known to), `required` the valuation the identity
// demands.
struct MarginRow {
  std::string label;
  int margin = 0;
  int required = 0;
  bool certified = true;
  bool passed() const { return !certified || margin >= required; }
};

struct MarginReport {
  std::string name;
  std::string unit;  // "pi" or "p"
  std::vector<MarginRow> rows;

  bool all_passed() const {
    for (const auto& r : rows)
      if (!r.passed()) return false;
    return true;
  }
  int certified_count() const {
    int c = 0;
    for (const auto& r : rows) c += r.certified ? 1 : 0;
    return c;
  }
  // Smallest margin - required over certified rows.
  int worst_slack() const {
    int w = 1 << 30;
    for (const auto& r : rows)
      if (r.certified && r.margin - r.required < w) w = r.margin - r.required;
    return w;
  }
};

}  // namespace dwork
