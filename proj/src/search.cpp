#include "lgwpr/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lgwpr/error.hpp"

namespace lgwpr {

GoldenResult golden_section(const std::function<double(double)>& f, double lo,
                            double hi, double tol) {
  if (!(lo < hi) || !(tol > 0))
    throw InvalidArgument("golden section needs lo < hi and tol > 0");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  GoldenResult best{lo, std::numeric_limits<double>::infinity(), 0};
  auto eval = [&](double x) {
    const double fx = f(x);
    ++best.evaluations;
    if (fx < best.fx || (fx == best.fx && x < best.x)) {
      best.x = x;
      best.fx = fx;
    }
    return fx;
  };

  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > tol) {
    const bool go_left = fc < fd || (fc == fd && !std::isinf(fc));
    if (go_left) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  if (std::isinf(best.fx)) best.x = std::numeric_limits<double>::quiet_NaN();
  return best;
}

GoldenResult scan_then_golden(const std::function<double(double)>& f, double lo,
                              double hi, double tol, int scan_points) {
  if (!(lo > 0) || !(lo < hi) || !(tol > 0) || scan_points < 2)
    throw InvalidArgument("scan needs 0 < lo < hi, tol > 0 and >= 2 points");
  const double llo = std::log(lo), lhi = std::log(hi);
  std::vector<double> grid(static_cast<std::size_t>(scan_points));
  for (int i = 0; i < scan_points; ++i)
    grid[static_cast<std::size_t>(i)] = llo + (lhi - llo) * i / (scan_points - 1);

  GoldenResult best{std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::infinity(), 0};
  std::size_t at = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double b = i + 1 == grid.size() ? hi : i == 0 ? lo : std::exp(grid[i]);
    const double fx = f(b);
    ++best.evaluations;
    if (fx < best.fx) {
      best.fx = fx;
      best.x = b;
      at = i;
    }
  }
  if (std::isinf(best.fx)) return best;
  const double a = grid[at == 0 ? 0 : at - 1];
  const double b = grid[std::min(at + 1, grid.size() - 1)];
  const GoldenResult refine =
      golden_section([&](double t) { return f(std::exp(t)); }, a, b, tol / hi);
  best.evaluations += refine.evaluations;
  const double x = std::exp(refine.x);
  if (refine.fx < best.fx || (refine.fx == best.fx && x < best.x)) {
    best.x = x;
    best.fx = refine.fx;
  }
  return best;
}

}  // namespace lgwpr
