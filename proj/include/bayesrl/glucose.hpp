#pragma once

#include <array>
#include <cstddef>

#include "bayesrl/rng.hpp"

namespace bayesrl {

inline constexpr std::size_t kGlucoseCoefficients = 9;
inline constexpr std::size_t kGlucoseFeatures = 7;

using GlucoseCoefficients = std::array<double, kGlucoseCoefficients>;

/// AR(2) glucose dynamics with zero-inflated Gaussian diet and exercise
/// covariates.
struct GlucoseParams {
  GlucoseCoefficients beta{10.0, 0.9, 0.1, -0.01, 0.0, 0.1, -0.01, -10.0, -4.0};
  double sigma = 5.0;
  double diet_mean = 0.0;
  double diet_sd = 10.0;
  double diet_prob = 0.6;
  double exercise_mean = 0.0;
  double exercise_sd = 10.0;
  double exercise_prob = 0.6;
  /// Gl_0 = Gl_{-1}; covariates at times 0 and -1 are drawn, A_{-1} = 0.
  double initial_glucose = 100.0;

  /// Throws DomainError on negative scales or probabilities outside [0, 1].
  void validate() const;
  GlucoseParams with_beta(const GlucoseCoefficients& b) const {
    GlucoseParams p = *this;
    p.beta = b;
    return p;
  }
};

/// S_t = (Gl_t, Di_t, Ex_t, Gl_{t-1}, Di_{t-1}, Ex_{t-1}, A_{t-1}).
struct GlucoseState {
  double gl = 0.0;
  double di = 0.0;
  double ex = 0.0;
  double gl_prev = 0.0;
  double di_prev = 0.0;
  double ex_prev = 0.0;
  int a_prev = 0;

  std::array<double, kGlucoseFeatures> features() const {
    return {gl, di, ex, gl_prev, di_prev, ex_prev, static_cast<double>(a_prev)};
  }
  bool finite() const;
  friend bool operator==(const GlucoseState&, const GlucoseState&) = default;
};

/// 1(gl<70)(-0.005 gl^2 + 0.95 gl - 45) + 1(gl>=70)(-0.0002 gl^2 + 0.022 gl - 0.5)
double glucose_reward(double gl);

/// Regression row (1, Gl_t, Di_t, Ex_t, Gl_{t-1}, Di_{t-1}, Ex_{t-1}, A_{t-1}, A_t)
/// whose response is Gl_{t+1}.
std::array<double, kGlucoseCoefficients> glucose_design_row(const GlucoseState& s, int action);

struct GlucoseStep {
  GlucoseState next;
  double reward;
};

/// Advances one patient by one step. Draw order: glucose noise, diet, exercise.
GlucoseStep glucose_step(const GlucoseParams& params, const GlucoseState& s, int action,
                         RngStream& rng);

GlucoseState glucose_initial_state(const GlucoseParams& params, RngStream& rng);

}  // namespace bayesrl
