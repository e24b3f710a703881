#include "tomsim/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tomsim {

namespace {

void check_simplex(const std::vector<double>& p, const char* what) {
  if (p.empty()) throw std::invalid_argument(std::string(what) + ": empty");
  double total = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0)
      throw std::invalid_argument(std::string(what) + ": negative or non-finite mass");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument(std::string(what) + ": mass does not sum to 1");
}

}  // namespace

void EngineConfig::validate() const {
  if (horizon < 1 || horizon > 32) throw std::invalid_argument("horizon out of range");
  if (temperature <= 0.0) throw std::invalid_argument("temperature must be positive");
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma out of range");
  if (delta < 0.0 || delta > 1.0) throw std::invalid_argument("delta out of range");
  if (omega < 0.0 || omega >= 0.5) throw std::invalid_argument("omega must lie in [0, 0.5)");
  if (mech_samples < 2) throw std::invalid_argument("sample size too small");
  if (planner_iterations < 1) throw std::invalid_argument("planner iterations must be positive");
}

BeliefVector::BeliefVector(std::vector<double> p) : p_(std::move(p)) {
  check_simplex(p_, "belief");
}

PolicyDistribution::PolicyDistribution(std::vector<double> p) : p_(std::move(p)) {
  check_simplex(p_, "policy");
}

int PolicyDistribution::sample(RandomSource& rng) const { return sample_index(p_, rng); }

std::string action_label(const GameAction& a) {
  struct V {
    std::string operator()(const Offer& o) const {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.9g", o.index / 10.0);
      return buf;
    }
    std::string operator()(const Response& r) const { return r.accept ? "accept" : "reject"; }
    std::string operator()(Row r) const { return r == Row::T ? "T" : "B"; }
    std::string operator()(Column c) const {
      switch (c) {
        case Column::L: return "L";
        case Column::M: return "M";
        default: return "R";
      }
    }
  };
  return std::visit(V{}, a);
}

std::vector<double> softmax_policy(const std::vector<double>& q, double temperature) {
  if (q.empty()) throw std::invalid_argument("softmax: no actions");
  if (temperature <= 0.0) throw std::invalid_argument("softmax: temperature must be positive");
  for (double x : q)
    if (!std::isfinite(x)) throw std::invalid_argument("softmax: non-finite value");
  const double m = *std::max_element(q.begin(), q.end());
  std::vector<double> p(q.size());
  double total = 0.0;
  for (size_t i = 0; i < q.size(); ++i) {
    p[i] = std::exp((q[i] - m) / temperature);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

int argmax_index(const std::vector<double>& q) {
  if (q.empty()) throw std::invalid_argument("argmax: no actions");
  size_t best = 0;
  for (size_t i = 1; i < q.size(); ++i)
    if (q[i] > q[best]) best = i;
  return static_cast<int>(best);
}

int sample_index(const std::vector<double>& probs, RandomSource& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

std::vector<double> bayes_update(const std::vector<double>& prior,
                                 const std::vector<double>& likelihood) {
  if (prior.size() != likelihood.size())
    throw std::invalid_argument("bayes: size mismatch");
  std::vector<double> post(prior.size());
  double total = 0.0;
  for (size_t i = 0; i < prior.size(); ++i) {
    const double lik = std::max(likelihood[i], 1e-300);
    post[i] = prior[i] * lik;
    total += post[i];
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw std::runtime_error("bayes: impossible observation");
  for (double& x : post) x /= total;
  return post;
}

double discounted_return(const std::vector<double>& rewards, double gamma) {
  double g = 0.0, w = 1.0;
  for (double r : rewards) {
    g += w * r;
    w *= gamma;
  }
  return g;
}

}  // namespace tomsim
