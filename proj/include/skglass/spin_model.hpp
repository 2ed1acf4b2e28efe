#pragma once

// skglass: spin configurations, SK / p-spin Hamiltonians, single-flip energy
// deltas, and the tilted-law reduction of the magnetic field.
//
// Conventions: spins are 0-indexed; sigma_i = +1 iff bit i is set. The
// Hamiltonian sums over ALL index tuples 1 <= i_1,...,i_p <= N, diagonal
// included, with no symmetrization of the couplings themselves.

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "skglass/coupling.hpp"
#include "skglass/errors.hpp"

namespace skglass {

struct SpinConfiguration {
  int n = 0;
  std::uint64_t bits = 0;  // bit i set <=> sigma_i = +1

  int spin(int i) const { return (bits >> i) & 1u ? +1 : -1; }

  // sum_i sigma_i
  int magnetization() const {
    return 2 * std::popcount(bits) - n;
  }

  SpinConfiguration flipped(int k) const {
    return {n, bits ^ (std::uint64_t{1} << k)};
  }

  SpinConfiguration negated() const {
    const std::uint64_t mask =
        n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    return {n, ~bits & mask};
  }

  static SpinConfiguration all_minus(int n) { return {n, 0}; }
};

struct ModelParams {
  int n = 0;
  int p = 2;
  double beta = 1.0;  // unscaled inverse temperature
  double h = 0.0;     // magnetic field intensity
};

// The engine-internal coupling strength beta / sqrt(n^(p-1)).
inline double scaled_beta(const ModelParams& params) {
  return params.beta / std::sqrt(std::pow(static_cast<double>(params.n),
                                          params.p - 1));
}

// Exact unnormalized Hamiltonian H(sigma) = sum over all p-tuples of
// xi_{i_1...i_p} sigma_{i_1} ... sigma_{i_p}, computed by contracting one
// index at a time (n^p + n^(p-1) + ... multiply-adds).
inline double energy(const CouplingTensor& couplings, SpinConfiguration sigma) {
  if (couplings.n != sigma.n)
    throw dimension_error("energy: tensor n=" + std::to_string(couplings.n) +
                          " vs configuration n=" + std::to_string(sigma.n));
  const int n = couplings.n;
  std::vector<double> work = couplings.values;
  std::size_t len = work.size();
  for (int level = 0; level < couplings.p; ++level) {
    const std::size_t rows = len / n;
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = 0.0;
      const double* row = work.data() + r * n;
      for (int j = 0; j < n; ++j) acc += row[j] * sigma.spin(j);
      work[r] = acc;
    }
    len = rows;
  }
  return work[0];
}

// Pair sums s_ij = xi_ij + xi_ji (i != j) and the sigma-independent diagonal
// constant c0 = sum_i xi_ii. For p = 2, H(sigma) = c0 + sum_{i<j} s_ij
// sigma_i sigma_j.
class SymmetrizedCouplings {
 public:
  explicit SymmetrizedCouplings(const CouplingTensor& t) : n_(t.n) {
    if (t.p != 2)
      throw validation_error("symmetrize: requires p = 2, got p = " +
                             std::to_string(t.p));
    sym_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    diagonal_sum_ = 0.0;
    for (int i = 0; i < n_; ++i) {
      diagonal_sum_ += t.at2(i, i);
      for (int j = i + 1; j < n_; ++j) {
        const double s = t.at2(i, j) + t.at2(j, i);
        sym_[static_cast<std::size_t>(i) * n_ + j] = s;
        sym_[static_cast<std::size_t>(j) * n_ + i] = s;
      }
    }
  }

  int n() const { return n_; }
  double diagonal_sum() const { return diagonal_sum_; }
  double pair_sum(int i, int j) const {
    return sym_[static_cast<std::size_t>(i) * n_ + j];
  }

  double energy(SpinConfiguration sigma) const {
    double acc = diagonal_sum_;
    for (int i = 0; i < n_; ++i) {
      const int si = sigma.spin(i);
      const double* row = sym_.data() + static_cast<std::size_t>(i) * n_;
      for (int j = i + 1; j < n_; ++j) acc += row[j] * si * sigma.spin(j);
    }
    return acc;
  }

  // H(sigma with spin k flipped) - H(sigma), O(n).
  double flip_delta(SpinConfiguration sigma, int k) const {
    double row_field = 0.0;
    const double* row = sym_.data() + static_cast<std::size_t>(k) * n_;
    for (int j = 0; j < n_; ++j) row_field += row[j] * sigma.spin(j);
    return -2.0 * sigma.spin(k) * row_field;
  }

 private:
  int n_;
  double diagonal_sum_;
  std::vector<double> sym_;
};

inline SymmetrizedCouplings symmetrize(const CouplingTensor& couplings) {
  return SymmetrizedCouplings(couplings);
}

// Generic single-flip delta: -2 sigma_k times the sum of all tensor terms
// whose index tuple contains k an odd number of times (terms with an even
// count are invariant under the flip). Enumerates tuples by the exact set of
// positions pinned to k; cost O(p n^(p-1)).
inline double flip_delta(const CouplingTensor& couplings,
                         SpinConfiguration sigma, int k) {
  const int n = couplings.n;
  const int p = couplings.p;
  if (n != sigma.n) throw dimension_error("flip_delta: dimension mismatch");
  if (k < 0 || k >= n)
    throw validation_error("flip_delta: spin index " + std::to_string(k) +
                           " out of range [0, " + std::to_string(n) + ")");

  std::vector<std::size_t> stride(p);
  stride[p - 1] = 1;
  for (int q = p - 2; q >= 0; --q) stride[q] = stride[q + 1] * n;

  double acc = 0.0;
  std::vector<int> free_pos;
  std::vector<int> idx;
  for (unsigned mask = 1; mask < (1u << p); ++mask) {
    if (std::popcount(mask) % 2 == 0) continue;
    free_pos.clear();
    std::size_t base = 0;
    for (int q = 0; q < p; ++q) {
      if (mask & (1u << q)) {
        base += stride[q] * static_cast<std::size_t>(k);
      } else {
        free_pos.push_back(q);
      }
    }
    const int nfree = static_cast<int>(free_pos.size());
    if (nfree == 0) {
      acc += couplings.values[base];
      continue;
    }
    if (n == 1) continue;  // free positions must avoid k, impossible at n=1
    // odometer over the free positions, values skipping k
    idx.assign(nfree, 0);
    for (auto& v : idx) v = (0 == k) ? 1 : 0;
    while (true) {
      std::size_t flat = base;
      double prod = 1.0;
      for (int q = 0; q < nfree; ++q) {
        flat += stride[free_pos[q]] * static_cast<std::size_t>(idx[q]);
        prod *= sigma.spin(idx[q]);
      }
      acc += couplings.values[flat] * prod;
      int carry = nfree - 1;
      while (carry >= 0) {
        int v = idx[carry] + 1;
        if (v == k) ++v;
        if (v < n) {
          idx[carry] = v;
          break;
        }
        idx[carry] = (0 == k) ? 1 : 0;
        --carry;
      }
      if (carry < 0) break;
    }
  }
  return -2.0 * sigma.spin(k) * acc;
}

struct TiltedProbabilities {
  double p_plus = 0.5;
  double p_minus = 0.5;
};

// P(tau = +1) = e^h / (2 cosh h), written in the overflow-safe logistic form.
inline TiltedProbabilities tilted_probabilities(double h) {
  if (!std::isfinite(h))
    throw validation_error("tilted_probabilities: h must be finite");
  TiltedProbabilities t;
  t.p_plus = 1.0 / (1.0 + std::exp(-2.0 * h));
  t.p_minus = 1.0 / (1.0 + std::exp(2.0 * h));
  return t;
}

}  // namespace skglass
