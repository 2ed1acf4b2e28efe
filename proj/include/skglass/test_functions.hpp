#pragma once

// skglass: test-function catalog for the integration-by-parts defect
// measurements. Each entry carries F, F', a sup bound on F'', and (when the
// function is C^3 with bounded third derivative) a sup bound on F'''.

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "skglass/environment.hpp"
#include "skglass/spin_model.hpp"

namespace skglass {

struct TestFunction {
  std::string id;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double second_derivative_bound = 0.0;
  std::optional<double> third_derivative_bound;
};

inline TestFunction sin_function() {
  return {"sin", [](double x) { return std::sin(x); },
          [](double x) { return std::cos(x); }, 1.0, 1.0};
}

inline TestFunction cos_function() {
  return {"cos", [](double x) { return std::cos(x); },
          [](double x) { return -std::sin(x); }, 1.0, 1.0};
}

inline TestFunction identity_function() {
  return {"identity", [](double x) { return x; }, [](double) { return 1.0; },
          0.0, 0.0};
}

// x^3 / (1 + x^2): bounded second and third derivatives.
// f'' = (6x - 2x^3)/(1+x^2)^3 peaks at x = sqrt(2)-1 with value
// 1/(12 - 8 sqrt(2)); f''' = (6 - 36x^2 + 6x^4)/(1+x^2)^4 peaks at 0 with 6.
inline TestFunction cubic_rational() {
  return {"cubic_rational",
          [](double x) { return x * x * x / (1.0 + x * x); },
          [](double x) {
            const double q = 1.0 + x * x;
            return (3.0 * x * x + x * x * x * x) / (q * q);
          },
          1.0 / (12.0 - 8.0 * std::sqrt(2.0)), 6.0};
}

// The Gibbs single-variable function F(z) = <X>^(z) that appears when the
// averaged free energy is differentiated in the coupling coefficient,
// realized on a two-spin pair model: d = 4 observables X_kl = tau_k tau_l
// under the tilted product law, with the off-diagonal coupling (0,1) freed
// as the variable z and the remaining three couplings quenched from a seeded
// environment draw. Exact derivatives follow from the generating identity
//   d/dz <G>^(z) = beta ( <G X>^(z) - <G>^(z) <X>^(z) ).
class GibbsSingleVariable {
 public:
  GibbsSingleVariable(double beta, double h, const EnvironmentSpec& quench_env,
                      std::uint64_t seed)
      : beta_(beta) {
    const CouplingTensor quench = sample_couplings(quench_env, 2, 2, seed);
    const TiltedProbabilities tilt = tilted_probabilities(h);
    for (int c = 0; c < 4; ++c) {
      const SpinConfiguration tau{2, static_cast<std::uint64_t>(c)};
      x_[c] = tau.spin(0) * tau.spin(1);
      // psi = beta * sum over the three quenched slots of X_kl xi_kl
      psi_[c] = beta_ * (quench.at2(0, 0) + quench.at2(1, 1) +
                         x_[c] * quench.at2(1, 0));
      log_prob_[c] = std::log(tau.spin(0) > 0 ? tilt.p_plus : tilt.p_minus) +
                     std::log(tau.spin(1) > 0 ? tilt.p_plus : tilt.p_minus);
    }
  }

  double beta() const { return beta_; }

  double value(double z) const { return moment(z, 1); }

  // F'(z) = beta ( <X^2> - <X>^2 )
  double derivative(double z) const {
    const double m1 = moment(z, 1);
    return beta_ * (moment(z, 2) - m1 * m1);
  }

  // F''(z) = beta^2 ( <X^3> - 3 <X^2><X> + 2 <X>^3 )
  double second_derivative(double z) const {
    const double m1 = moment(z, 1);
    const double m2 = moment(z, 2);
    const double m3 = moment(z, 3);
    return beta_ * beta_ * (m3 - 3.0 * m2 * m1 + 2.0 * m1 * m1 * m1);
  }

  // |X| <= 1 gives ||F''|| <= 6 beta^2.
  double second_derivative_bound() const { return 6.0 * beta_ * beta_; }

  // For a ±1-valued observable F''' = 2 beta^3 (3F^2 - 1)(1 - F^2), so
  // ||F'''|| <= 2 |beta|^3.
  double third_derivative_bound() const {
    return 2.0 * std::abs(beta_ * beta_ * beta_);
  }

  TestFunction as_test_function(std::string id = "gibbs_n2") const {
    auto self = std::make_shared<GibbsSingleVariable>(*this);
    return {std::move(id), [self](double z) { return self->value(z); },
            [self](double z) { return self->derivative(z); },
            second_derivative_bound(), third_derivative_bound()};
  }

 private:
  // <X^power>^(z) over the four configurations, max-stabilized.
  double moment(double z, int power) const {
    std::array<double, 4> exponent{};
    double max_e = -1e308;
    for (int c = 0; c < 4; ++c) {
      exponent[c] = log_prob_[c] + beta_ * x_[c] * z + psi_[c];
      if (exponent[c] > max_e) max_e = exponent[c];
    }
    double weight = 0.0, xweight = 0.0;
    for (int c = 0; c < 4; ++c) {
      const double w = std::exp(exponent[c] - max_e);
      double xp = 1.0;
      for (int q = 0; q < power; ++q) xp *= x_[c];
      weight += w;
      xweight += xp * w;
    }
    return xweight / weight;
  }

  double beta_;
  std::array<double, 4> x_{};
  std::array<double, 4> psi_{};
  std::array<double, 4> log_prob_{};
};

// Default catalog exercised by the IBP checks.
inline std::vector<TestFunction> ibp_test_catalog(double gibbs_beta = 0.7,
                                                  double gibbs_h = 0.3,
                                                  std::uint64_t gibbs_seed =
                                                      20260810) {
  std::vector<TestFunction> catalog;
  catalog.push_back(sin_function());
  catalog.push_back(cos_function());
  catalog.push_back(cubic_rational());
  catalog.push_back(identity_function());
  catalog.push_back(GibbsSingleVariable(gibbs_beta, gibbs_h,
                                        EnvironmentSpec::gaussian(), gibbs_seed)
                        .as_test_function());
  return catalog;
}

}  // namespace skglass
