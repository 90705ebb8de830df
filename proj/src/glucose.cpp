#include "bayesrl/glucose.hpp"

#include <cmath>

#include "bayesrl/errors.hpp"

namespace bayesrl {
namespace {

double zero_inflated(double prob, double mean, double sd, RngStream& rng) {
  // Both draws are always taken so the stream position is independent of the outcome.
  const bool active = rng.bernoulli(prob);
  const double z = rng.normal();
  return active ? mean + sd * z : 0.0;
}

}  // namespace

void GlucoseParams::validate() const {
  for (double b : beta)
    if (!std::isfinite(b)) throw DomainError("GlucoseParams: non-finite coefficient");
  if (!(sigma >= 0.0) || !(diet_sd >= 0.0) || !(exercise_sd >= 0.0))
    throw DomainError("GlucoseParams: negative scale");
  if (!(diet_prob >= 0.0 && diet_prob <= 1.0) || !(exercise_prob >= 0.0 && exercise_prob <= 1.0))
    throw DomainError("GlucoseParams: mixture probability outside [0, 1]");
}

bool GlucoseState::finite() const {
  return std::isfinite(gl) && std::isfinite(di) && std::isfinite(ex) && std::isfinite(gl_prev) &&
         std::isfinite(di_prev) && std::isfinite(ex_prev);
}

double glucose_reward(double gl) {
  if (gl < 70.0) return -0.005 * gl * gl + 0.95 * gl - 45.0;
  return -0.0002 * gl * gl + 0.022 * gl - 0.5;
}

std::array<double, kGlucoseCoefficients> glucose_design_row(const GlucoseState& s, int action) {
  return {1.0,       s.gl,      s.di,
          s.ex,      s.gl_prev, s.di_prev,
          s.ex_prev, static_cast<double>(s.a_prev), static_cast<double>(action)};
}

GlucoseStep glucose_step(const GlucoseParams& params, const GlucoseState& s, int action,
                         RngStream& rng) {
  if (!s.finite()) throw DomainError("glucose_step: non-finite state");
  const auto row = glucose_design_row(s, action);
  double mean = 0.0;
  for (std::size_t i = 0; i < kGlucoseCoefficients; ++i) mean += params.beta[i] * row[i];
  const double gl_next = mean + params.sigma * rng.normal();

  GlucoseState next;
  next.gl = gl_next;
  next.di = zero_inflated(params.diet_prob, params.diet_mean, params.diet_sd, rng);
  next.ex = zero_inflated(params.exercise_prob, params.exercise_mean, params.exercise_sd, rng);
  next.gl_prev = s.gl;
  next.di_prev = s.di;
  next.ex_prev = s.ex;
  next.a_prev = action;
  return {next, glucose_reward(gl_next)};
}

GlucoseState glucose_initial_state(const GlucoseParams& params, RngStream& rng) {
  GlucoseState s;
  s.gl = params.initial_glucose;
  s.gl_prev = params.initial_glucose;
  s.di = zero_inflated(params.diet_prob, params.diet_mean, params.diet_sd, rng);
  s.ex = zero_inflated(params.exercise_prob, params.exercise_mean, params.exercise_sd, rng);
  s.di_prev = zero_inflated(params.diet_prob, params.diet_mean, params.diet_sd, rng);
  s.ex_prev = zero_inflated(params.exercise_prob, params.exercise_mean, params.exercise_sd, rng);
  s.a_prev = 0;
  return s;
}

}  // namespace bayesrl
