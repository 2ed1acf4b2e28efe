#pragma once

// skglass: exact thermodynamics by full enumeration over 2^n configurations.
//
// The enumeration walks the Gray-code sequence so successive configurations
// differ by one spin; the running energy is maintained with single-flip
// deltas (O(n) for p = 2, O(n^2) for p = 3 via precomputed slice tables,
// O(p n^(p-1)) term enumeration otherwise). Boltzmann sums accumulate with a
// streaming log-sum-exp so nothing overflows even for |b H| of several
// hundred.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "skglass/coupling.hpp"
#include "skglass/errors.hpp"
#include "skglass/spin_model.hpp"

namespace skglass {

struct EngineLimits {
  int max_n_p2 = 24;
  int max_n_p3 = 14;
  int max_n_generic = 12;  // p >= 4

  int limit_for(int p) const {
    if (p == 2) return max_n_p2;
    if (p == 3) return max_n_p3;
    return max_n_generic;
  }
};

struct LogPartitionResult {
  double log_z = 0.0;
  int n = 0;
  double beta = 0.0;
  double h = 0.0;
  std::uint64_t enumerated_count = 0;
};

struct GroundStateResult {
  double s_n = 0.0;               // max over sigma of H(sigma), unnormalized
  SpinConfiguration argmax;
  std::uint64_t degeneracy_hint = 0;  // ties within 1e-12 absolute
};

struct InterpolationPoint {
  double t = 0.0;
  double x = 0.0;
  double log_z = 0.0;
};

// Model dimensions for operations that carry no inverse temperature.
struct FieldModel {
  int n = 0;
  int p = 2;
  double h = 0.0;
};

namespace detail {

// Streaming log-sum-exp: running maximum with a rescaled, Kahan-compensated
// sum of exp(e - max). log_sum() = max + log(sum).
class StreamingLogSumExp {
 public:
  void add(double exponent) {
    if (exponent > max_) {
      if (sum_ > 0.0) {
        const double rescale = std::exp(max_ - exponent);
        sum_ *= rescale;
        comp_ *= rescale;
      }
      max_ = exponent;
      accumulate(1.0);
    } else {
      accumulate(std::exp(exponent - max_));
    }
  }

  double max_exponent() const { return max_; }

  double log_sum() const { return max_ + std::log(sum_); }

 private:
  void accumulate(double term) {
    const double y = term - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }

  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
  double comp_ = 0.0;  // Kahan correction term (scaled along with sum_)
};

// Per-tensor fast single-flip evaluator.
class FlipEvaluator {
 public:
  explicit FlipEvaluator(const CouplingTensor& tensor) : tensor_(&tensor) {
    if (tensor.p == 2) {
      sym_.emplace(tensor);
    } else if (tensor.p == 3) {
      build_triple_tables();
    }
  }

  // H evaluated at sigma = all -1 (every sigma product is (-1)^p).
  double initial_energy() const {
    double total = 0.0;
    for (const double v : tensor_->values) total += v;
    return (tensor_->p % 2 == 0) ? total : -total;
  }

  double delta(SpinConfiguration sigma, int k) const {
    if (sym_) return sym_->flip_delta(sigma, k);
    if (tensor_->p == 3) {
      const int n = tensor_->n;
      const double* slice =
          triple_.data() + static_cast<std::size_t>(k) * n * n;
      double quad = 0.0;
      for (int i = 0; i < n; ++i) {
        const int si = sigma.spin(i);
        const double* row = slice + static_cast<std::size_t>(i) * n;
        double inner = 0.0;
        for (int j = 0; j < n; ++j) inner += row[j] * sigma.spin(j);
        quad += si * inner;
      }
      return -2.0 * sigma.spin(k) * (quad + triple_diag_[k]);
    }
    return flip_delta(*tensor_, sigma, k);
  }

 private:
  void build_triple_tables() {
    const int n = tensor_->n;
    triple_.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    triple_diag_.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
      double* slice = triple_.data() + static_cast<std::size_t>(k) * n * n;
      for (int i = 0; i < n; ++i) {
        if (i == k) continue;
        for (int j = 0; j < n; ++j) {
          if (j == k) continue;
          slice[static_cast<std::size_t>(i) * n + j] =
              tensor_->at3(k, i, j) + tensor_->at3(i, k, j) +
              tensor_->at3(i, j, k);
        }
      }
      triple_diag_[k] = tensor_->at3(k, k, k);
    }
  }

  const CouplingTensor* tensor_;
  std::optional<SymmetrizedCouplings> sym_;
  std::vector<double> triple_;       // n slices of n x n (zero where i or j = k)
  std::vector<double> triple_diag_;  // xi_kkk
};

inline void check_capacity(const CouplingTensor& tensor,
                           const EngineLimits& limits) {
  const int limit = limits.limit_for(tensor.p);
  if (tensor.n > limit || tensor.n > 62) {
    throw capacity_error("exact engine: n=" + std::to_string(tensor.n) +
                         " exceeds the enumeration limit " +
                         std::to_string(limit) + " for p=" +
                         std::to_string(tensor.p));
  }
  const std::int64_t expected = tensor_entry_count(tensor.n, tensor.p);
  if (expected != tensor.entry_count())
    throw dimension_error("exact engine: tensor has " +
                          std::to_string(tensor.entry_count()) +
                          " entries, expected n^p = " +
                          std::to_string(expected));
}

// Gray-code walk over the low `free_bits` spins (higher spins stay -1).
// Calls visit(sigma, energy, magnetization) for every configuration.
template <class Visit>
void enumerate_gray(const CouplingTensor& tensor, int free_bits,
                    Visit&& visit) {
  const int n = tensor.n;
  FlipEvaluator flips(tensor);
  SpinConfiguration sigma = SpinConfiguration::all_minus(n);
  double e = flips.initial_energy();
  int mag = -n;
  visit(sigma, e, mag);
  const std::uint64_t total = std::uint64_t{1} << free_bits;
  for (std::uint64_t i = 1; i < total; ++i) {
    const int k = std::countr_zero(i);  // bit flipped between Gray(i-1), Gray(i)
    e += flips.delta(sigma, k);
    mag -= 2 * sigma.spin(k);
    sigma.bits ^= std::uint64_t{1} << k;
    visit(sigma, e, mag);
  }
}

}  // namespace detail

// Exact log Z = log( 2^-n sum_sigma exp(b H(sigma) + h sum_i sigma_i) ) with
// b = beta / sqrt(n^(p-1)).
inline LogPartitionResult log_partition(const CouplingTensor& couplings,
                                        const ModelParams& params,
                                        const EngineLimits& limits = {}) {
  if (couplings.n != params.n || couplings.p != params.p)
    throw dimension_error("log_partition: params (n=" +
                          std::to_string(params.n) + ", p=" +
                          std::to_string(params.p) + ") vs tensor (n=" +
                          std::to_string(couplings.n) + ", p=" +
                          std::to_string(couplings.p) + ")");
  detail::check_capacity(couplings, limits);
  const double b = scaled_beta(params);
  const double h = params.h;
  detail::StreamingLogSumExp lse;
  detail::enumerate_gray(couplings, couplings.n,
                         [&](SpinConfiguration, double e, int mag) {
                           lse.add(b * e + h * mag);
                         });
  LogPartitionResult out;
  out.log_z = lse.log_sum() - couplings.n * std::log(2.0);
  out.n = couplings.n;
  out.beta = params.beta;
  out.h = params.h;
  out.enumerated_count = std::uint64_t{1} << couplings.n;
  return out;
}

// Gibbs average of an observable f(sigma) in one joint pass: both the
// weight sum and the f-weighted sum are accumulated relative to the running
// maximum exponent, so signed observables pose no log-of-negative issue.
template <class Obs>
double gibbs_expectation(const CouplingTensor& couplings,
                         const ModelParams& params, Obs&& observable,
                         const EngineLimits& limits = {}) {
  if (couplings.n != params.n || couplings.p != params.p)
    throw dimension_error("gibbs_expectation: dimension mismatch");
  detail::check_capacity(couplings, limits);
  const double b = scaled_beta(params);
  const double h = params.h;
  double max_e = -std::numeric_limits<double>::infinity();
  double weight_sum = 0.0;
  double fweight_sum = 0.0;
  detail::enumerate_gray(
      couplings, couplings.n, [&](SpinConfiguration sigma, double e, int mag) {
        const double exponent = b * e + h * mag;
        const double f = observable(sigma);
        if (exponent > max_e) {
          if (weight_sum > 0.0) {
            const double rescale = std::exp(max_e - exponent);
            weight_sum *= rescale;
            fweight_sum *= rescale;
          }
          max_e = exponent;
          weight_sum += 1.0;
          fweight_sum += f;
        } else {
          const double w = std::exp(exponent - max_e);
          weight_sum += w;
          fweight_sum += f * w;
        }
      });
  return fweight_sum / weight_sum;
}

// Exact ground state S_n = max_sigma H(sigma). For even p the Hamiltonian is
// invariant under the global flip, so only configurations with the last spin
// fixed at -1 are scanned and tie counts double.
inline GroundStateResult ground_state(const CouplingTensor& couplings,
                                      const EngineLimits& limits = {}) {
  detail::check_capacity(couplings, limits);
  constexpr double kTieTol = 1e-12;
  const bool half_scan = couplings.p % 2 == 0 && couplings.n >= 1;
  const int free_bits = half_scan ? couplings.n - 1 : couplings.n;
  GroundStateResult out;
  out.s_n = -std::numeric_limits<double>::infinity();
  detail::enumerate_gray(couplings, free_bits,
                         [&](SpinConfiguration sigma, double e, int) {
                           if (e > out.s_n + kTieTol) {
                             out.s_n = e;
                             out.argmax = sigma;
                             out.degeneracy_hint = 1;
                           } else if (e >= out.s_n - kTieTol) {
                             if (e > out.s_n) out.s_n = e;
                             ++out.degeneracy_hint;
                           }
                         });
  if (half_scan) out.degeneracy_hint *= 2;
  return out;
}

// Two-environment partition function: log of
//   2^-n sum_sigma exp( sqrt(t/M) H_g(sigma) + sqrt(x/M) H_xi(sigma)
//                       + h sum_i sigma_i ),      M = n^(p-1),
// i.e. each Hamiltonian carries its own SK scaling folded into sqrt(t),
// sqrt(x). Reduces to log_partition(g, beta = sqrt(t)) at x = 0 and to
// log_partition(xi, beta = sqrt(x)) at t = 0.
inline InterpolationPoint interpolated_log_partition(
    const CouplingTensor& g_couplings, const CouplingTensor& xi_couplings,
    double t, double x, const FieldModel& model,
    const EngineLimits& limits = {}) {
  if (g_couplings.n != xi_couplings.n || g_couplings.p != xi_couplings.p)
    throw dimension_error(
        "interpolated_log_partition: environments disagree on (n, p)");
  if (g_couplings.n != model.n || g_couplings.p != model.p)
    throw dimension_error(
        "interpolated_log_partition: model (n, p) does not match tensors");
  if (t < 0.0 || x < 0.0)
    throw validation_error(
        "interpolated_log_partition: t and x must be non-negative");
  detail::check_capacity(g_couplings, limits);

  const int n = model.n;
  const double scale =
      std::sqrt(std::pow(static_cast<double>(n), model.p - 1));
  const double coeff_g = std::sqrt(t) / scale;
  const double coeff_x = std::sqrt(x) / scale;
  const double h = model.h;

  detail::FlipEvaluator flips_g(g_couplings);
  detail::FlipEvaluator flips_x(xi_couplings);
  detail::StreamingLogSumExp lse;

  SpinConfiguration sigma = SpinConfiguration::all_minus(n);
  double e_g = flips_g.initial_energy();
  double e_x = flips_x.initial_energy();
  int mag = -n;
  lse.add(coeff_g * e_g + coeff_x * e_x + h * mag);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const int k = std::countr_zero(i);
    e_g += flips_g.delta(sigma, k);
    e_x += flips_x.delta(sigma, k);
    mag -= 2 * sigma.spin(k);
    sigma.bits ^= std::uint64_t{1} << k;
    lse.add(coeff_g * e_g + coeff_x * e_x + h * mag);
  }

  InterpolationPoint out;
  out.t = t;
  out.x = x;
  out.log_z = lse.log_sum() - n * std::log(2.0);
  return out;
}

}  // namespace skglass
