#pragma once

// skglass: catalog of normalized disorder environments.
//
// Every environment is a real law with mean 0 and variance 1 (checked to
// 1e-12) and finite third absolute moment. The catalog carries closed-form
// moments; discrete_custom laws compute them as exact atom sums.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "skglass/coupling.hpp"
#include "skglass/errors.hpp"
#include "skglass/rng.hpp"

namespace skglass {

enum class EnvFamily {
  gaussian,
  rademacher,
  uniform_centered,
  shifted_exponential,
  discrete_custom,
};

struct DiscreteAtom {
  double value = 0.0;
  double prob = 0.0;
};

struct MomentReport {
  double mean = 0.0;
  double variance = 0.0;
  double abs_third = 0.0;  // E|xi|^3
  double third = 0.0;      // E xi^3
  double fourth = 0.0;     // E xi^4 (+inf allowed)
  bool symmetric_class = false;  // E xi^3 == 0 and E xi^4 < inf
};

class EnvironmentSpec {
 public:
  static EnvironmentSpec gaussian() { return EnvironmentSpec(EnvFamily::gaussian); }
  static EnvironmentSpec rademacher() { return EnvironmentSpec(EnvFamily::rademacher); }
  static EnvironmentSpec uniform_centered() {
    return EnvironmentSpec(EnvFamily::uniform_centered);
  }
  static EnvironmentSpec shifted_exponential() {
    return EnvironmentSpec(EnvFamily::shifted_exponential);
  }

  // Finite discrete law; atoms must already satisfy the normalization
  // assumptions (positive probabilities summing to 1, mean 0, variance 1).
  static EnvironmentSpec discrete_custom(std::vector<DiscreteAtom> atoms) {
    EnvironmentSpec env(EnvFamily::discrete_custom);
    env.atoms_ = std::move(atoms);
    env.validate_atoms();
    return env;
  }

  // Convenience: shift/scale an arbitrary finite law onto mean 0, variance 1.
  static EnvironmentSpec standardized_discrete(std::vector<DiscreteAtom> atoms) {
    if (atoms.size() < 2)
      throw validation_error("discrete_custom: need at least two atoms");
    double total = 0.0;
    for (const auto& a : atoms) total += a.prob;
    if (!(total > 0))
      throw validation_error("discrete_custom: probabilities must be positive");
    double mean = 0.0;
    for (auto& a : atoms) {
      a.prob /= total;
      mean += a.prob * a.value;
    }
    double var = 0.0;
    for (const auto& a : atoms) var += a.prob * (a.value - mean) * (a.value - mean);
    if (!(var > 0))
      throw validation_error("discrete_custom: degenerate law, variance is 0");
    const double sd = std::sqrt(var);
    for (auto& a : atoms) a.value = (a.value - mean) / sd;
    return discrete_custom(std::move(atoms));
  }

  static EnvironmentSpec from_name(const std::string& name) {
    if (name == "gaussian") return gaussian();
    if (name == "rademacher") return rademacher();
    if (name == "uniform_centered") return uniform_centered();
    if (name == "shifted_exponential") return shifted_exponential();
    throw validation_error("unknown environment family: " + name);
  }

  EnvFamily family() const { return family_; }
  const std::vector<DiscreteAtom>& atoms() const { return atoms_; }

  bool is_discrete() const {
    return family_ == EnvFamily::rademacher ||
           family_ == EnvFamily::discrete_custom;
  }

  std::string name() const {
    switch (family_) {
      case EnvFamily::gaussian: return "gaussian";
      case EnvFamily::rademacher: return "rademacher";
      case EnvFamily::uniform_centered: return "uniform_centered";
      case EnvFamily::shifted_exponential: return "shifted_exponential";
      case EnvFamily::discrete_custom: return "discrete_custom";
    }
    return "?";
  }

  // Density of the continuous families (quadrature integrand factor).
  double density(double x) const {
    switch (family_) {
      case EnvFamily::gaussian:
        return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
      case EnvFamily::uniform_centered: {
        const double r = std::sqrt(3.0);
        return (x >= -r && x <= r) ? 1.0 / (2.0 * r) : 0.0;
      }
      case EnvFamily::shifted_exponential:
        return x >= -1.0 ? std::exp(-(x + 1.0)) : 0.0;
      default:
        throw validation_error("density(): " + name() + " is discrete");
    }
  }

  // Integration interval truncated so the omitted tail mass (including
  // polynomial weights up to x^4) is far below quadrature tolerance.
  std::pair<double, double> integration_domain() const {
    switch (family_) {
      case EnvFamily::gaussian: return {-12.0, 12.0};
      case EnvFamily::uniform_centered: {
        const double r = std::sqrt(3.0);
        return {-r, r};
      }
      case EnvFamily::shifted_exponential: return {-1.0, 50.0};
      default:
        throw validation_error("integration_domain(): " + name() +
                               " is discrete");
    }
  }

  friend bool operator==(const EnvironmentSpec& a, const EnvironmentSpec& b) {
    if (a.family_ != b.family_) return false;
    if (a.family_ != EnvFamily::discrete_custom) return true;
    if (a.atoms_.size() != b.atoms_.size()) return false;
    for (std::size_t i = 0; i < a.atoms_.size(); ++i) {
      if (a.atoms_[i].value != b.atoms_[i].value ||
          a.atoms_[i].prob != b.atoms_[i].prob)
        return false;
    }
    return true;
  }

 private:
  explicit EnvironmentSpec(EnvFamily family) : family_(family) {}

  void validate_atoms() const {
    constexpr double tol = 1e-12;
    if (atoms_.empty())
      throw validation_error("discrete_custom: empty atom list");
    double total = 0.0, mean = 0.0;
    for (const auto& a : atoms_) {
      if (!(a.prob > 0.0))
        throw validation_error(
            "discrete_custom: probabilities must be positive");
      if (!std::isfinite(a.value))
        throw validation_error("discrete_custom: atoms must be finite");
      total += a.prob;
      mean += a.prob * a.value;
    }
    if (std::abs(total - 1.0) > tol)
      throw validation_error(
          "discrete_custom: probabilities sum to " + std::to_string(total) +
          ", expected 1 within 1e-12");
    if (std::abs(mean) > tol)
      throw validation_error("discrete_custom: mean is " +
                             std::to_string(mean) +
                             ", environments must be centered (E xi = 0)");
    double var = 0.0;
    for (const auto& a : atoms_) var += a.prob * a.value * a.value;
    if (std::abs(var - 1.0) > tol)
      throw validation_error("discrete_custom: variance is " +
                             std::to_string(var) +
                             ", environments must be normalized (E xi^2 = 1)");
  }

  EnvFamily family_;
  std::vector<DiscreteAtom> atoms_;
};

// Closed-form (or exact finite-sum) moments of a catalog environment.
inline MomentReport analytic_moments(const EnvironmentSpec& env) {
  MomentReport r;
  switch (env.family()) {
    case EnvFamily::gaussian:
      r = {0.0, 1.0, 2.0 * std::sqrt(2.0 / std::numbers::pi), 0.0, 3.0, true};
      break;
    case EnvFamily::rademacher:
      r = {0.0, 1.0, 1.0, 0.0, 1.0, true};
      break;
    case EnvFamily::uniform_centered:
      // support [-sqrt(3), sqrt(3)]: E|x|^3 = 3*sqrt(3)/4, E x^4 = 9/5.
      r = {0.0, 1.0, 0.75 * std::sqrt(3.0), 0.0, 1.8, true};
      break;
    case EnvFamily::shifted_exponential:
      // Exp(1) - 1: E|x|^3 = 12/e - 2, central moments mu3 = 2, mu4 = 9.
      r = {0.0, 1.0, 12.0 / std::numbers::e - 2.0, 2.0, 9.0, false};
      break;
    case EnvFamily::discrete_custom: {
      double m1 = 0, m2 = 0, a3 = 0, m3 = 0, m4 = 0;
      for (const auto& a : env.atoms()) {
        const double x = a.value;
        m1 += a.prob * x;
        m2 += a.prob * x * x;
        a3 += a.prob * std::abs(x * x * x);
        m3 += a.prob * x * x * x;
        m4 += a.prob * x * x * x * x;
      }
      r = {m1, m2, a3, m3, m4, std::abs(m3) <= 1e-12 && std::isfinite(m4)};
      break;
    }
  }
  return r;
}

// Streams i.i.d. draws from an environment. Deterministic given the seed:
// gaussian uses Box-Muller on xoshiro256++ uniforms (pairs cached),
// uniform_centered inverts onto [-sqrt3, sqrt3], shifted_exponential uses
// -log(1-u) - 1, discrete laws walk the cumulative table.
class DisorderSampler {
 public:
  DisorderSampler(const EnvironmentSpec& env, std::uint64_t seed)
      : env_(env), engine_(seed) {
    if (env_.family() == EnvFamily::discrete_custom) {
      double c = 0.0;
      for (const auto& a : env_.atoms()) {
        c += a.prob;
        cumulative_.push_back(c);
      }
      cumulative_.back() = 1.0;
    }
  }

  double draw() {
    switch (env_.family()) {
      case EnvFamily::gaussian: {
        if (have_spare_) {
          have_spare_ = false;
          return spare_;
        }
        const double u1 = 1.0 - engine_.uniform01();  // (0, 1]
        const double u2 = engine_.uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
      }
      case EnvFamily::rademacher:
        return (engine_.next() >> 63) ? 1.0 : -1.0;
      case EnvFamily::uniform_centered:
        return std::sqrt(3.0) * (2.0 * engine_.uniform01() - 1.0);
      case EnvFamily::shifted_exponential:
        return -std::log1p(-engine_.uniform01()) - 1.0;
      case EnvFamily::discrete_custom: {
        const double u = engine_.uniform01();
        const auto it =
            std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const std::size_t idx = std::min(
            static_cast<std::size_t>(it - cumulative_.begin()),
            env_.atoms().size() - 1);
        return env_.atoms()[idx].value;
      }
    }
    return 0.0;
  }

 private:
  EnvironmentSpec env_;
  rng::Xoshiro256pp engine_;
  std::vector<double> cumulative_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// n^p i.i.d. draws; a pure function of (env, n, p, seed).
inline CouplingTensor sample_couplings(const EnvironmentSpec& env, int n,
                                       int p, std::uint64_t seed) {
  const std::int64_t count = tensor_entry_count(n, p);
  CouplingTensor tensor;
  tensor.n = n;
  tensor.p = p;
  tensor.env_id = env.name();
  tensor.seed = seed;
  tensor.values.resize(static_cast<std::size_t>(count));
  DisorderSampler sampler(env, seed);
  for (auto& v : tensor.values) v = sampler.draw();
  return tensor;
}

struct EmpiricalMomentReport {
  MomentReport moments;
  MomentReport stderrs;  // plug-in standard errors, componentwise
  std::int64_t count = 0;
};

// Sample moments of `count` draws plus plug-in standard errors. Two passes
// over the regenerated stream: mean first, then central powers.
inline EmpiricalMomentReport empirical_moments_detailed(
    const EnvironmentSpec& env, std::int64_t count, std::uint64_t seed) {
  if (count < 2) throw validation_error("empirical_moments: count must be >= 2");
  double sum = 0.0;
  {
    DisorderSampler sampler(env, seed);
    for (std::int64_t i = 0; i < count; ++i) sum += sampler.draw();
  }
  const double mean = sum / static_cast<double>(count);

  double c2 = 0, c3 = 0, a3 = 0, c4 = 0, c6 = 0, c8 = 0;
  {
    DisorderSampler sampler(env, seed);
    for (std::int64_t i = 0; i < count; ++i) {
      const double d = sampler.draw() - mean;
      const double d2 = d * d;
      c2 += d2;
      c3 += d2 * d;
      a3 += std::abs(d2 * d);
      c4 += d2 * d2;
      c6 += d2 * d2 * d2;
      c8 += d2 * d2 * d2 * d2;
    }
  }
  const double inv = 1.0 / static_cast<double>(count);
  c2 *= inv; c3 *= inv; a3 *= inv; c4 *= inv; c6 *= inv; c8 *= inv;

  EmpiricalMomentReport out;
  out.count = count;
  out.moments.mean = mean;
  out.moments.variance = c2;
  out.moments.abs_third = a3;
  out.moments.third = c3;
  out.moments.fourth = c4;

  const auto se = [&](double second_moment, double first_moment) {
    const double var = std::max(0.0, second_moment - first_moment * first_moment);
    return std::sqrt(var * inv);
  };
  out.stderrs.mean = std::sqrt(c2 * inv);
  out.stderrs.variance = se(c4, c2);
  out.stderrs.abs_third = se(c6, a3);
  out.stderrs.third = se(c6, c3);
  out.stderrs.fourth = se(c8, c4);
  out.moments.symmetric_class =
      std::abs(c3) <= 5.0 * out.stderrs.third && std::isfinite(c4);
  out.stderrs.symmetric_class = out.moments.symmetric_class;
  return out;
}

inline MomentReport empirical_moments(const EnvironmentSpec& env,
                                      std::int64_t count, std::uint64_t seed) {
  return empirical_moments_detailed(env, count, seed).moments;
}

}  // namespace skglass
