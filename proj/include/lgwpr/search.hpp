#pragma once

#include <functional>

namespace lgwpr {

struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
};

/// Golden-section minimisation of f over [lo, hi], stopping once the bracket
/// is narrower than tol. f may return +inf for infeasible points; when both
/// interior points are infeasible the bracket moves toward hi. Ties keep the
/// left (smaller) point. Returns the best point evaluated.
GoldenResult golden_section(const std::function<double(double)>& f, double lo,
                            double hi, double tol);

/// Scans `scan_points` log-spaced candidates over [lo, hi], then runs
/// golden_section on log b between the neighbours of the best one, down to a
/// log-bracket width of tol / hi (so the precision is relative and the number
/// of evaluations is the same for every f). Bandwidth criteria are often
/// multimodal over the full bracket, where a plain golden section can settle
/// in the wrong basin. Ties go to the smaller point.
GoldenResult scan_then_golden(const std::function<double(double)>& f, double lo,
                              double hi, double tol, int scan_points = 12);

}  // namespace lgwpr
