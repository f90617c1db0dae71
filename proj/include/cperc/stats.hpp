#pragma once

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdint>
#include <vector>

#include "error.hpp"

namespace cperc {

struct ChiSquare {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
};

// Pearson goodness of fit against exact cell probabilities; dof is cells minus one.
inline ChiSquare chi_square(const std::vector<std::uint64_t>& observed, const std::vector<double>& probs) {
  if (observed.size() != probs.size() || observed.size() < 2) throw InvalidInput("chi-square needs matching cells");
  double n = 0;
  for (auto o : observed) n += double(o);
  if (n <= 0) throw InvalidInput("chi-square needs observations");
  ChiSquare r;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    double e = n * probs[k];
    if (e <= 0) throw InvalidInput("chi-square cell with zero expectation");
    double d = double(observed[k]) - e;
    r.statistic += d * d / e;
  }
  r.dof = int(observed.size()) - 1;
  r.p_value = boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic);
  return r;
}

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("fit needs two or more points");
  double n = double(x.size()), sx = 0, sy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
  }
  double mx = sx / n, my = sy / n, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0) throw InvalidInput("fit needs distinct abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace cperc
