#include "tomsim/aleph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tomsim/compress.hpp"

namespace tomsim::aleph {

Flags combine(const Flags& prev, const Flags& z1, const Flags& z2) {
  if (prev.size() != z1.size() || prev.size() != z2.size())
    throw std::invalid_argument("flags: size mismatch");
  Flags out(prev.size());
  for (size_t i = 0; i < prev.size(); ++i) out[i] = prev[i] & z1[i] & z2[i];
  return out;
}

bool triggered(const Flags& f) {
  if (f.empty()) return false;
  for (uint8_t b : f)
    if (b) return false;
  return true;
}

double delta_schedule(int t, int horizon) {
  if (t < 1) throw std::invalid_argument("delta schedule: t must be >= 1");
  return std::max(static_cast<double>(horizon - t) / static_cast<double>(t), 0.5);
}

double quantile_nearest_rank(std::vector<double> xs, double p) {
  if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile: p out of range");
  std::sort(xs.begin(), xs.end());
  const int n = static_cast<int>(xs.size());
  int r = static_cast<int>(std::ceil(p * n));
  r = std::clamp(r, 1, n);
  return xs[r - 1];
}

Flags z1_delta(const std::vector<int>& observed,
               const std::vector<std::vector<std::vector<double>>>& model_dists,
               double delta) {
  const size_t k = model_dists.size();
  Flags out(k, 1);
  const size_t t = observed.size();
  if (t == 0) return out;
  for (size_t type = 0; type < k; ++type) {
    const auto& dists = model_dists[type];
    if (dists.size() < t) throw std::invalid_argument("typicality: model history too short");
    const size_t na = dists[0].size();
    std::vector<double> fbar(na, 0.0), fhat(na, 0.0);
    for (size_t tau = 0; tau < t; ++tau)
      for (size_t a = 0; a < na; ++a) fbar[a] += dists[tau][a];
    for (double& x : fbar) x /= static_cast<double>(t);
    for (size_t tau = 0; tau < t; ++tau) {
      const int a = observed[tau];
      if (a < 0 || static_cast<size_t>(a) >= na)
        throw std::invalid_argument("typicality: action out of range");
      fhat[a] += 1.0;
    }
    for (double& x : fhat) x /= static_cast<double>(t);
    for (size_t a = 0; a < na; ++a) {
      if (std::abs(fhat[a] - fbar[a]) > delta * fbar[a]) {
        out[type] = 0;
        break;
      }
    }
  }
  return out;
}

Flags z1_gzip(std::string_view observed,
              const std::vector<std::vector<std::string>>& samples, double delta) {
  Flags out(samples.size(), 1);
  if (observed.size() < 3) return out;
  const double c_obs = compression_ratio(observed);
  for (size_t type = 0; type < samples.size(); ++type) {
    const auto& seqs = samples[type];
    if (seqs.size() < 2) throw std::invalid_argument("sample size too small");
    std::vector<double> ratios;
    ratios.reserve(seqs.size());
    for (const auto& s : seqs) ratios.push_back(compression_ratio(s));
    const double lo = quantile_nearest_rank(ratios, delta);
    const double hi = quantile_nearest_rank(ratios, 1.0 - delta);
    if (c_obs < lo || c_obs > hi) out[type] = 0;
  }
  return out;
}

Flags z2_reward(double observed_cumulative,
                const std::vector<std::vector<double>>& sampled_cumulative,
                double omega, bool lower_only, bool rewards_visible) {
  Flags out(sampled_cumulative.size(), 1);
  if (!rewards_visible) return out;
  for (size_t type = 0; type < sampled_cumulative.size(); ++type) {
    const auto& cr = sampled_cumulative[type];
    if (cr.empty()) throw std::runtime_error("reward typicality: empty sample set");
    const double lo = quantile_nearest_rank(cr, omega);
    if (observed_cumulative < lo) {
      out[type] = 0;
      continue;
    }
    if (!lower_only) {
      const double hi = quantile_nearest_rank(cr, 1.0 - omega);
      if (observed_cumulative > hi) out[type] = 0;
    }
  }
  return out;
}

PolicyDistribution aleph_policy(const Flags& f, const PolicyDistribution& base,
                                const PolicyDistribution& oob) {
  return triggered(f) ? oob : base;
}

int minmax_row(const MatrixPayoffs& g) {
  int best = 0;
  double best_min = *std::min_element(g[0].begin(), g[0].end());
  for (int r = 1; r < 2; ++r) {
    const double m = *std::min_element(g[r].begin(), g[r].end());
    if (m > best_min) {
      best = r;
      best_min = m;
    }
  }
  return best;
}

}  // namespace tomsim::aleph
