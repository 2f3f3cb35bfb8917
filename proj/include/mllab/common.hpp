#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace mllab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_inf(double x) { return std::isinf(x) && x > 0; }

/// lhs/rhs with the 0/0 -> 0 convention used by all ratio reports.
struct RatioReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

inline double safe_ratio(double lhs, double rhs) {
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : kInf;
  return lhs / rhs;
}

inline RatioReport make_ratio(double lhs, double rhs) {
  return RatioReport{lhs, rhs, safe_ratio(lhs, rhs)};
}

/// Fixed "%.15g" rendering; all printed numbers in CLI and CSV go through
/// this so reruns are byte-identical.
inline std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", x);
  return std::string(buf);
}

inline double rel_err(double got, double want) {
  const double scale = std::fmax(std::fabs(want), std::fabs(got));
  if (scale == 0.0) return 0.0;
  return std::fabs(got - want) / scale;
}

}  // namespace mllab
