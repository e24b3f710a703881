#include "tomsim/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace tomsim::metrics {

bool false_belief(const std::vector<double>& belief, int true_type) {
  if (true_type < 0 || static_cast<size_t>(true_type) >= belief.size())
    throw std::invalid_argument("true type out of range");
  for (size_t j = 0; j < belief.size(); ++j)
    if (static_cast<int>(j) != true_type && belief[j] >= belief[true_type])
      return true;
  return false;
}

double belief_weighted(const std::vector<double>& belief,
                       const std::vector<double>& per_type) {
  if (belief.size() != per_type.size() || belief.empty())
    throw std::invalid_argument("belief/type supports mismatch");
  double e = 0.0;
  for (size_t i = 0; i < belief.size(); ++i) e += belief[i] * per_type[i];
  return e;
}

double regret_estimate(double observed, double expected) {
  return observed - expected;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q,
                     double eps) {
  if (p.size() != q.size() || p.empty())
    throw std::invalid_argument("kl: mismatched distributions");
  if (!(eps > 0.0)) throw std::invalid_argument("kl: smoothing must be positive");
  double zp = 0.0, zq = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    zp += p[i] + eps;
    zq += q[i] + eps;
  }
  double kl = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double pi = (p[i] + eps) / zp;
    const double qi = (q[i] + eps) / zq;
    kl += pi * std::log(pi / qi);
  }
  return kl;
}

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.n = static_cast<int>(xs.size());
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / (s.n - 1));
  }
  return s;
}

}  // namespace tomsim::metrics
