#pragma once

#include <cstdio>
#include <string>

namespace d3ap {

// Fixed-format floating output so reruns emit byte-identical files.
inline std::string fmt_g(double v, int prec = 12) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
  return buf;
}

// Filename fragment for an x value (integers render without a decimal point).
inline std::string fmt_xq(double x) { return fmt_g(x, 10); }

}  // namespace d3ap
