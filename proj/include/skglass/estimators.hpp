#pragma once

// skglass: disorder-averaged statistics over independent coupling replicas.
//
// Seed discipline: replica i of a given stream uses
// rng::derive_seed(stream_master, i); estimators that need several disorder
// legs (e.g. the interpolation scan) first split the master into per-leg
// stream masters with the tags below. Every estimator is a pure function of
// (inputs, master_seed) and is reduced in replica-index order, so results do
// not depend on the worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skglass/environment.hpp"
#include "skglass/errors.hpp"
#include "skglass/exact_engine.hpp"
#include "skglass/parallel.hpp"
#include "skglass/quadrature.hpp"
#include "skglass/rng.hpp"
#include "skglass/spin_model.hpp"
#include "skglass/test_functions.hpp"

namespace skglass {

namespace stream_tag {
// Documented stream indices for derive_seed(master, tag).
inline constexpr std::uint64_t env_a = 0xA;
inline constexpr std::uint64_t env_b = 0xB;
inline constexpr std::uint64_t gaussian_leg = 0x61;
inline constexpr std::uint64_t general_leg = 0x62;
}  // namespace stream_tag

struct EstimatorOptions {
  int jobs = 1;
  bool keep_per_replica = false;
  EngineLimits limits;
  // 0: plain sample-variance stderr; > 0: bootstrap over replica values with
  // this many resamples (seeded from the master seed, so still deterministic).
  int bootstrap_resamples = 0;
};

struct ReplicaValue {
  int index = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
};

struct FreeEnergyEstimate {
  double alpha_hat = 0.0;  // mean of (1/n) log Z over replicas
  double stderr_value = 0.0;
  int replicas = 0;
  std::string env_id;
  ModelParams params;
  std::uint64_t master_seed = 0;
  std::vector<ReplicaValue> per_replica;  // filled when requested
};

struct FluctuationEstimate {
  double third_abs_central = 0.0;  // E |log Z - mean log Z|^3 (plug-in)
  double stderr_value = 0.0;
  std::int64_t d = 0;  // number of disorder variables, n^p
  double beta_scaled = 0.0;
  int replicas = 0;
  std::string env_id;
  ModelParams params;
  std::uint64_t master_seed = 0;
};

struct GroundStateDensityEstimate {
  double density_hat = 0.0;  // mean of n^(-3/2) S_n
  double stderr_value = 0.0;
  int replicas = 0;
  int n = 0;
  std::string env_id;
  std::uint64_t master_seed = 0;
  std::vector<ReplicaValue> per_replica;
};

struct ScanSample {
  double s = 0.0;
  double alpha = 0.0;  // disorder-averaged log Z(s, t0-s), unnormalized
  double alpha_stderr = 0.0;
  bool interior = false;
  double deriv_fd = 0.0;  // centered difference d alpha / ds
  double deriv_stderr = 0.0;
};

struct InterpolationScan {
  double t0 = 0.0;
  std::vector<ScanSample> samples;
  std::int64_t d = 0;
  int replicas = 0;
  FieldModel model;
  std::string env_id;
  std::uint64_t master_seed = 0;
};

enum class IbpMethod { exact_discrete_sum, quadrature };

struct IbpReport {
  std::string function_id;
  double defect = 0.0;  // |E xi F(xi) - E xi^2 E F'(xi)|
  double bound3 = 0.0;  // (3/2) ||F''|| E|xi|^3
  std::optional<double> bound4;  // ||F'''|| E xi^4 (symmetric class only)
  std::string env_id;
  IbpMethod method = IbpMethod::quadrature;
};

namespace detail {

// Map replicas -> per_replica values; reduce with Welford in index order.
template <class PerReplica>
std::pair<WelfordAccumulator, std::vector<ReplicaValue>> replica_map(
    int replicas, std::uint64_t stream_master, const EstimatorOptions& opts,
    PerReplica&& compute) {
  std::vector<ReplicaValue> values(static_cast<std::size_t>(replicas));
  parallel_for(opts.jobs, replicas, [&](std::int64_t i) {
    const std::uint64_t seed =
        rng::derive_seed(stream_master, static_cast<std::uint64_t>(i));
    values[static_cast<std::size_t>(i)] = {static_cast<int>(i), seed,
                                           compute(seed)};
  });
  WelfordAccumulator acc;
  for (const auto& v : values) acc.add(v.value);
  return {acc, std::move(values)};
}

// Standard deviation of resampled means; replaces the plain stderr when the
// bootstrap option is on.
inline double bootstrap_stderr(const std::vector<ReplicaValue>& values,
                               int resamples, std::uint64_t master_seed) {
  rng::Xoshiro256pp eng(rng::derive_seed(master_seed, 0xB007));
  const std::size_t m = values.size();
  WelfordAccumulator means;
  for (int b = 0; b < resamples; ++b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      sum += values[static_cast<std::size_t>(eng.next() % m)].value;
    means.add(sum / static_cast<double>(m));
  }
  return std::sqrt(means.sample_variance());
}

template <class Estimate>
void finish_stderr(Estimate& out, const WelfordAccumulator& acc,
                   std::vector<ReplicaValue>&& values,
                   const EstimatorOptions& opts, std::uint64_t master_seed) {
  out.stderr_value = acc.stderr_of_mean();
  if (opts.bootstrap_resamples > 0)
    out.stderr_value =
        bootstrap_stderr(values, opts.bootstrap_resamples, master_seed);
  if (opts.keep_per_replica) out.per_replica = std::move(values);
}

}  // namespace detail

// Mean and stderr of (1/n) log Z over independent coupling tensors.
inline FreeEnergyEstimate estimate_free_energy(
    const EnvironmentSpec& env, const ModelParams& params, int replicas,
    std::uint64_t master_seed, const EstimatorOptions& opts = {}) {
  if (replicas < 2)
    throw validation_error("estimate_free_energy: replicas must be >= 2");
  auto [acc, per_replica] = detail::replica_map(
      replicas, master_seed, opts, [&](std::uint64_t seed) {
        const CouplingTensor tensor =
            sample_couplings(env, params.n, params.p, seed);
        return log_partition(tensor, params, opts.limits).log_z / params.n;
      });
  FreeEnergyEstimate out;
  out.alpha_hat = acc.mean;
  out.replicas = replicas;
  out.env_id = env.name();
  out.params = params;
  out.master_seed = master_seed;
  detail::finish_stderr(out, acc, std::move(per_replica), opts, master_seed);
  return out;
}

// Plug-in third absolute central moment of log Z (unnormalized).
inline FluctuationEstimate estimate_fluctuation_moment(
    const EnvironmentSpec& env, const ModelParams& params, int replicas,
    std::uint64_t master_seed, const EstimatorOptions& opts = {}) {
  if (replicas < 100)
    throw validation_error(
        "estimate_fluctuation_moment: replicas must be >= 100 (third-moment "
        "estimation needs tail mass)");
  std::vector<double> values(static_cast<std::size_t>(replicas));
  parallel_for(opts.jobs, replicas, [&](std::int64_t i) {
    const std::uint64_t seed =
        rng::derive_seed(master_seed, static_cast<std::uint64_t>(i));
    const CouplingTensor tensor =
        sample_couplings(env, params.n, params.p, seed);
    values[static_cast<std::size_t>(i)] =
        log_partition(tensor, params, opts.limits).log_z;
  });
  WelfordAccumulator center;
  for (const double v : values) center.add(v);
  const double mean = center.mean;  // exact when Z is disorder-independent
  WelfordAccumulator cubes;
  for (const double v : values) {
    const double a = std::abs(v - mean);
    cubes.add(a * a * a);
  }
  FluctuationEstimate out;
  out.third_abs_central = cubes.mean;
  out.stderr_value = cubes.stderr_of_mean();
  out.d = tensor_entry_count(params.n, params.p);
  out.beta_scaled = scaled_beta(params);
  out.replicas = replicas;
  out.env_id = env.name();
  out.params = params;
  out.master_seed = master_seed;
  return out;
}

// Mean and stderr of n^(-3/2) S_n over replicas (p = 2 ground states).
inline GroundStateDensityEstimate estimate_ground_state_density(
    const EnvironmentSpec& env, int n, int replicas, std::uint64_t master_seed,
    const EstimatorOptions& opts = {}) {
  if (replicas < 2)
    throw validation_error(
        "estimate_ground_state_density: replicas must be >= 2");
  const double norm = std::pow(static_cast<double>(n), -1.5);
  auto [acc, per_replica] = detail::replica_map(
      replicas, master_seed, opts, [&](std::uint64_t seed) {
        const CouplingTensor tensor = sample_couplings(env, n, 2, seed);
        return norm * ground_state(tensor, opts.limits).s_n;
      });
  GroundStateDensityEstimate out;
  out.density_hat = acc.mean;
  out.replicas = replicas;
  out.n = n;
  out.env_id = env.name();
  out.master_seed = master_seed;
  detail::finish_stderr(out, acc, std::move(per_replica), opts, master_seed);
  return out;
}

// Disorder-averaged alpha(s, t0-s) on a uniform s-grid, with independent
// Gaussian and env tensors per replica (shared across the grid inside one
// replica) and a centered-difference derivative at interior points.
inline InterpolationScan scan_interpolation_path(
    const EnvironmentSpec& env, const FieldModel& model, double t0,
    int grid_points, int replicas, std::uint64_t master_seed,
    const EstimatorOptions& opts = {}) {
  if (!(t0 > 0.0))
    throw validation_error("scan_interpolation_path: t0 must be positive");
  if (grid_points < 3)
    throw validation_error("scan_interpolation_path: grid_points must be >= 3");
  if (replicas < 2)
    throw validation_error("scan_interpolation_path: replicas must be >= 2");

  const EnvironmentSpec gauss = EnvironmentSpec::gaussian();
  const std::uint64_t g_master =
      rng::derive_seed(master_seed, stream_tag::gaussian_leg);
  const std::uint64_t x_master =
      rng::derive_seed(master_seed, stream_tag::general_leg);
  const double ds = t0 / (grid_points - 1);

  std::vector<double> curve(
      static_cast<std::size_t>(replicas) * grid_points);
  parallel_for(opts.jobs, replicas, [&](std::int64_t i) {
    const CouplingTensor g_tensor = sample_couplings(
        gauss, model.n, model.p,
        rng::derive_seed(g_master, static_cast<std::uint64_t>(i)));
    const CouplingTensor x_tensor = sample_couplings(
        env, model.n, model.p,
        rng::derive_seed(x_master, static_cast<std::uint64_t>(i)));
    double* row = curve.data() + static_cast<std::size_t>(i) * grid_points;
    for (int j = 0; j < grid_points; ++j) {
      const double s = std::min(j * ds, t0);
      row[j] = interpolated_log_partition(g_tensor, x_tensor, s, t0 - s,
                                          model, opts.limits)
                   .log_z;
    }
  });

  InterpolationScan out;
  out.t0 = t0;
  out.d = tensor_entry_count(model.n, model.p);
  out.replicas = replicas;
  out.model = model;
  out.env_id = env.name();
  out.master_seed = master_seed;
  out.samples.resize(static_cast<std::size_t>(grid_points));
  for (int j = 0; j < grid_points; ++j) {
    WelfordAccumulator alpha_acc;
    WelfordAccumulator deriv_acc;
    const bool interior = j > 0 && j + 1 < grid_points;
    for (int i = 0; i < replicas; ++i) {
      const double* row = curve.data() + static_cast<std::size_t>(i) * grid_points;
      alpha_acc.add(row[j]);
      if (interior) deriv_acc.add((row[j + 1] - row[j - 1]) / (2.0 * ds));
    }
    ScanSample& sample = out.samples[static_cast<std::size_t>(j)];
    sample.s = std::min(j * ds, t0);
    sample.alpha = alpha_acc.mean;
    sample.alpha_stderr = alpha_acc.stderr_of_mean();
    sample.interior = interior;
    if (interior) {
      sample.deriv_fd = deriv_acc.mean;
      sample.deriv_stderr = deriv_acc.stderr_of_mean();
    }
  }
  return out;
}

// |E xi F(xi) - E xi^2 E F'(xi)| against the third- and (when applicable)
// fourth-moment bounds. Discrete environments use exact atom sums; the
// continuous ones adaptive quadrature at absolute tolerance 1e-10.
inline IbpReport ibp_defect(const EnvironmentSpec& env, const TestFunction& f) {
  const MomentReport moments = analytic_moments(env);
  double xi_f = 0.0;   // E xi F(xi)
  double fprime = 0.0; // E F'(xi)
  IbpReport out;
  if (env.is_discrete()) {
    out.method = IbpMethod::exact_discrete_sum;
    std::vector<DiscreteAtom> atoms = env.atoms();
    if (env.family() == EnvFamily::rademacher)
      atoms = {{-1.0, 0.5}, {1.0, 0.5}};
    for (const auto& a : atoms) {
      xi_f += a.prob * a.value * f.value(a.value);
      fprime += a.prob * f.derivative(a.value);
    }
  } else {
    out.method = IbpMethod::quadrature;
    const auto [lo, hi] = env.integration_domain();
    xi_f = quad::integrate(
        [&](double x) { return x * f.value(x) * env.density(x); }, lo, hi,
        1e-10);
    fprime = quad::integrate(
        [&](double x) { return f.derivative(x) * env.density(x); }, lo, hi,
        1e-10);
  }
  out.function_id = f.id;
  out.env_id = env.name();
  out.defect = std::abs(xi_f - moments.variance * fprime);
  out.bound3 = 1.5 * f.second_derivative_bound * moments.abs_third;
  if (moments.symmetric_class && f.third_derivative_bound)
    out.bound4 = *f.third_derivative_bound * moments.fourth;
  return out;
}

enum class DecayModel { inv_sqrt_n, inv_n_sixth };

struct ExtrapolationPoint {
  int n = 0;
  double estimate = 0.0;
  double stderr_value = 0.0;
};

struct ExtrapolationResult {
  double limit_hat = 0.0;   // weighted LS intercept
  double fit_residual = 0.0;  // weighted RMS residual
  double slope = 0.0;
  double limit_stderr = 0.0;
};

// Weighted least squares of estimate against n^(-1/2) or n^(-1/6); the
// intercept extrapolates the series to n = infinity. Falls back to equal
// weights when any stderr is non-positive.
inline ExtrapolationResult extrapolate_limit(
    const std::vector<ExtrapolationPoint>& series, DecayModel model) {
  if (series.size() < 3)
    throw validation_error("extrapolate_limit: need at least 3 points");
  for (std::size_t i = 0; i < series.size(); ++i)
    for (std::size_t j = i + 1; j < series.size(); ++j)
      if (series[i].n == series[j].n)
        throw validation_error("extrapolate_limit: n values must be distinct");

  const double exponent = model == DecayModel::inv_sqrt_n ? -0.5 : -1.0 / 6.0;
  bool weighted = true;
  for (const auto& pt : series)
    if (!(pt.stderr_value > 0.0)) weighted = false;

  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& pt : series) {
    const double w =
        weighted ? 1.0 / (pt.stderr_value * pt.stderr_value) : 1.0;
    const double x = std::pow(static_cast<double>(pt.n), exponent);
    sw += w;
    sx += w * x;
    sy += w * pt.estimate;
    sxx += w * x * x;
    sxy += w * x * pt.estimate;
  }
  const double det = sw * sxx - sx * sx;
  const double scale = sw * sxx;
  if (!(std::abs(det) > 1e-14 * std::max(1.0, scale)))
    throw numerical_error("extrapolate_limit: degenerate design matrix");

  ExtrapolationResult out;
  out.limit_hat = (sxx * sy - sx * sxy) / det;
  out.slope = (sw * sxy - sx * sy) / det;
  out.limit_stderr = std::sqrt(std::max(0.0, sxx / det));
  double ss = 0.0;
  for (const auto& pt : series) {
    const double w =
        weighted ? 1.0 / (pt.stderr_value * pt.stderr_value) : 1.0;
    const double x = std::pow(static_cast<double>(pt.n), exponent);
    const double r = pt.estimate - (out.limit_hat + out.slope * x);
    ss += w * r * r;
  }
  out.fit_residual = std::sqrt(ss / sw);
  if (!weighted) {
    // unweighted: scale the intercept stderr by the residual variance
    const double dof = static_cast<double>(series.size()) - 2.0;
    const double s2 = dof > 0 ? ss / dof : 0.0;
    out.limit_stderr = std::sqrt(std::max(0.0, s2 * sxx / det));
  }
  return out;
}

}  // namespace skglass
