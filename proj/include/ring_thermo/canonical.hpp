#pragma once

#include <cmath>
#include <string>

#include "ring_thermo/core_model.hpp"
#include "ring_thermo/numerics.hpp"

namespace ring_thermo {

enum class Backend { DirectSum, EulerMaclaurin };

inline std::string to_string(Backend b) {
  return b == Backend::DirectSum ? "direct" : "euler-maclaurin";
}

/// Upper end of the temperature window in which the truncated closed-form
/// partition function is trusted.
inline constexpr double kValidityTmax = 1.0;

/// Per-particle canonical quantities. Z = Z1^N, so everything follows from Z1.
struct CanonicalState {
  double T;
  double beta;
  double log_z1;
  double f;
  double u;
  double s_entropy;
  double c;
  double j_z;
  Backend backend;
  bool beyond_validity = false;
};

namespace detail {

inline void check_temperature(double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw DomainError("temperature must be positive and finite, got " + std::to_string(t));
}

inline double canonical_current(const RingModel& model, const Coupling& c, double mean_n) {
  return model.current_prefactor() * (2.0 * mean_n * std::cos(c.theta()) - 1.0);
}

}  // namespace detail

/// Thermal average of the spin current over the single-particle Boltzmann
/// distribution: (2 <n> cos(theta) - 1) / (4 m r0).
inline double canonical_spin_current(const RingModel& model, const Coupling& c, double t,
                                     const TruncationPolicy& policy = {}) {
  detail::check_temperature(t);
  const auto sum = ring_boltzmann_sum(model, c, 1.0 / t, policy);
  return detail::canonical_current(model, c, sum.mean_observable);
}

inline CanonicalState canonical_evaluate(const RingModel& model, const Coupling& c,
                                         double t, Backend backend = Backend::DirectSum,
                                         const TruncationPolicy& policy = {},
                                         const DiffScheme& scheme = {}) {
  detail::check_temperature(t);
  CanonicalState st{};
  st.T = t;
  st.beta = 1.0 / t;
  st.backend = backend;
  st.beyond_validity = t > kValidityTmax;

  const auto sum = ring_boltzmann_sum(model, c, st.beta, policy);
  st.j_z = detail::canonical_current(model, c, sum.mean_observable);

  if (backend == Backend::DirectSum) {
    st.log_z1 = sum.log_sum;
    st.f = -t * sum.log_sum;
    st.u = sum.mean_energy;
    st.s_entropy = (st.u - st.f) / t;
    st.c = st.beta * st.beta * sum.variance;
    return st;
  }

  auto log_z = [&](double x) { return std::log(euler_maclaurin_z1(model, c, 1.0 / x)); };
  auto free_energy = [&](double x) { return -x * log_z(x); };
  auto entropy = [&](double x) { return -differentiate(free_energy, x, scheme).value; };
  st.log_z1 = log_z(t);
  st.f = -t * st.log_z1;
  st.u = t * t * differentiate(log_z, t, scheme).value;
  st.s_entropy = entropy(t);
  st.c = t * differentiate(entropy, t, scheme).value;
  return st;
}

}  // namespace ring_thermo
