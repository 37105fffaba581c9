#pragma once

// Reference implementations used only by tests. Each one is written from
// the definitions directly and shares no code with the library beyond the
// plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "fiper/model.hpp"
#include "fiper/study.hpp"

namespace oracle {

/// Per-predicate evaluation with explicit comparisons.
inline bool predicate_holds(const fiper::Predicate& p, const fiper::Value& v) {
  if (p.is_interval()) {
    const double x = std::get<double>(v);
    const auto& iv = p.interval();
    bool ok_low = true, ok_high = true;
    if (iv.lower.has_value()) ok_low = iv.lower_open ? (*iv.lower < x) : (*iv.lower <= x);
    if (iv.upper.has_value()) ok_high = iv.upper_open ? (x < *iv.upper) : (x <= *iv.upper);
    return ok_low && ok_high;
  }
  const std::string& label = std::get<std::string>(v);
  int hits = 0;
  for (const auto& l : p.set().labels) hits += (l == label);
  return hits > 0;
}

inline bool covers(const fiper::Instance& x, const fiper::Rule& r) {
  int failed = 0;
  for (const auto& p : r.premise) failed += predicate_holds(p, x.values.at(p.feature)) ? 0 : 1;
  return failed == 0;
}

/// Hyndman-Fan type 7 via 1-based ranks: h = 1 + p (n - 1).
inline double quantile(std::vector<double> v, long double p) {
  std::sort(v.begin(), v.end());
  const long double h = 1.0L + p * static_cast<long double>(v.size() - 1);
  const auto k = static_cast<std::size_t>(std::floor(h));  // 1-based
  const long double frac = h - static_cast<long double>(k);
  const long double xk = v[k - 1];
  const long double xk1 = k < v.size() ? v[k] : v[k - 1];
  return static_cast<double>(xk + frac * (xk1 - xk));
}

struct Five {
  double min, q1, median, q3, max;
};

inline Five five_numbers(const std::vector<double>& v) {
  double lo = v.front(), hi = v.front();
  for (double x : v) lo = x < lo ? x : lo, hi = x > hi ? x : hi;
  return {lo, quantile(v, 0.25L), quantile(v, 0.5L), quantile(v, 0.75L), hi};
}

inline std::vector<std::size_t> counts(const std::vector<std::string>& values, const std::vector<std::string>& domain) {
  std::vector<std::size_t> out;
  for (const auto& label : domain) out.push_back(static_cast<std::size_t>(std::count(values.begin(), values.end(), label)));
  return out;
}

inline fiper::study::ErrorCounts score(const std::vector<std::uint8_t>& answer, const std::vector<std::uint8_t>& truth) {
  fiper::study::ErrorCounts c;
  for (std::size_t i = 0; i < answer.size(); ++i) {
    const int d = int(answer[i] != 0) - int(truth[i] != 0);
    c.e1 += d == 1;
    c.e2 += d == -1;
  }
  return c;
}

inline double tlx(const std::array<int, 6>& r) {
  double s = 0;
  for (int x : r) s += x;
  return s / 6;
}

struct Ues {
  double fa, pu, ae, rw, overall;
};

inline Ues ues(std::array<int, 12> items, const std::vector<int>& reverse) {
  std::vector<bool> rev(12, false);
  for (int r : reverse) rev[static_cast<std::size_t>(r - 1)] = true;
  double sub[4] = {0, 0, 0, 0}, all = 0;
  for (std::size_t i = 0; i < 12; ++i) {
    const double v = rev[i] ? 6 - items[i] : items[i];
    sub[i / 3] += v;
    all += v;
  }
  return {sub[0] / 3, sub[1] / 3, sub[2] / 3, sub[3] / 3, all / 12};
}

}  // namespace oracle
