#include "d3ap/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace d3ap {

const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule r;
  r.x.assign(n, 0.0);
  r.w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

cplx integrate_gl(const std::function<cplx(double)>& f, double a, double b, int n) {
  const GaussRule& r = gauss_legendre(n);
  const double h = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  cplx acc = 0.0;
  for (int i = 0; i < n; ++i) acc += r.w[i] * f(mid + h * r.x[i]);
  return acc * h;
}

namespace {

struct Segment {
  double a, b;
  cplx coarse;
  double tol;
};

}  // namespace

QuadResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                              double abs_tol, long max_evals,
                              const std::function<double(double)>& width_hint) {
  QuadResult res;
  if (!(b > a)) return res;

  // initial partition guided by the width hint
  std::vector<Segment> stack;
  {
    std::vector<std::pair<double, double>> init;
    double t = a;
    const double min_w = (b - a) * 1e-9;
    while (t < b) {
      double w = b - t;
      if (width_hint) w = std::min(w, std::max(width_hint(t), min_w));
      init.emplace_back(t, std::min(t + w, b));
      t += w;
      if (init.size() > 100000) throw std::runtime_error("integrate_adaptive: width hint produced too many panels");
    }
    double tol_each = abs_tol / static_cast<double>(init.size());
    for (auto it = init.rbegin(); it != init.rend(); ++it) {
      stack.push_back({it->first, it->second, integrate_gl(f, it->first, it->second, 16), tol_each});
      res.evals += 16;
    }
  }

  while (!stack.empty()) {
    Segment s = stack.back();
    stack.pop_back();
    double mid = 0.5 * (s.a + s.b);
    cplx left = integrate_gl(f, s.a, mid, 16);
    cplx right = integrate_gl(f, mid, s.b, 16);
    res.evals += 32;
    double err = std::abs(left + right - s.coarse);
    if (err <= s.tol || (s.b - s.a) < 1e-14 * (b - a)) {
      res.value += left + right;
      res.err += err;
      continue;
    }
    if (res.evals > max_evals) {
      // best effort: flush remaining segments at their coarse estimates
      res.value += left + right;
      res.err += err;
      for (const auto& rest : stack) {
        res.value += rest.coarse;
        res.err += rest.tol;
      }
      res.converged = false;
      return res;
    }
    stack.push_back({s.a, mid, left, 0.5 * s.tol});
    stack.push_back({mid, s.b, right, 0.5 * s.tol});
  }
  return res;
}

namespace {

void simpson_rec(const std::function<cplx(double)>& f, double a, double b, cplx fa, cplx fm,
                 cplx fb, cplx whole, double tol, int depth, QuadResult& res) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  cplx flm = f(lm), frm = f(rm);
  res.evals += 2;
  cplx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  cplx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double err = std::abs(left + right - whole) / 15.0;
  if (depth <= 0 || err <= tol) {
    res.value += left + right + (left + right - whole) / 15.0;
    res.err += err;
    if (depth <= 0 && err > tol) res.converged = false;
    return;
  }
  simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, res);
  simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, res);
}

}  // namespace

QuadResult integrate_adaptive_simpson(const std::function<cplx(double)>& f, double a, double b,
                                      double abs_tol, int max_depth) {
  QuadResult res;
  if (!(b > a)) return res;
  cplx fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  res.evals = 3;
  cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth, res);
  return res;
}

}  // namespace d3ap
