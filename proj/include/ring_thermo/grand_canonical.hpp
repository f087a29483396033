#pragma once

#include <cmath>
#include <string>

#include "ring_thermo/canonical.hpp"
#include "ring_thermo/core_model.hpp"
#include "ring_thermo/numerics.hpp"

namespace ring_thermo {

struct GrandState {
  double T;
  double mu;
  double phi;
  double n_mean;
  double u_total;
  double s_total;
  double c_total;
  double j_z;
  bool domain_clipped = false;
};

/// Fermi-Dirac occupation 1 / (exp((E - mu)/T) + 1).
inline double occupation(double e, double t, double mu) {
  detail::check_temperature(t);
  const double y = (e - mu) / t;
  if (y >= 0.0) {
    const double q = std::exp(-y);
    return q / (1.0 + q);
  }
  return 1.0 / (1.0 + std::exp(y));
}

/// Sums over all (n, s) states that define the grand-canonical state
/// functions; every other quantity is an exact identity of these.
struct FermiSums {
  double log_terms = 0.0;  // sum ln(1 + exp(-beta (E - mu)))
  double n_mean = 0.0;
  double u_total = 0.0;
  double s_total = 0.0;
  double j_z = 0.0;
  long levels = 0;
};

inline FermiSums fermi_sums(const RingModel& model, const Coupling& c, double t, double mu,
                            const TruncationPolicy& policy = {}) {
  detail::check_temperature(t);
  if (!std::isfinite(mu)) throw DomainError("chemical potential must be finite");
  policy.validate();
  const double beta = 1.0 / t;
  FermiSums out;
  std::array<SpectrumPoint, 2> previous{};
  for (long n = 0;; ++n) {
    if (n >= policy.n_max)
      throw TruncationFailure("Fermi sum: tail bound not met within n_max = " +
                              std::to_string(policy.n_max) + " levels");
    const auto current = level(model, c, n);
    bool rising = n > 0;
    bool frozen = true;
    double block = 0.0;
    for (std::size_t k = 0; k < current.size(); ++k) {
      const auto& st = current[k];
      if (n > 0 && st.energy < previous[k].energy) rising = false;
      const double y = beta * (st.energy - mu);
      if (y <= policy.exponent_cutoff) frozen = false;
      const double ay = std::abs(y);
      const double tail = std::log1p(std::exp(-ay));
      // occupation of the less likely of the two configurations
      const double minority = 1.0 / (1.0 + std::exp(ay));
      const double log_term = y >= 0.0 ? tail : tail + ay;
      const double occ = y >= 0.0 ? minority : 1.0 - minority;
      block += log_term;
      out.log_terms += log_term;
      out.n_mean += occ;
      out.u_total += st.energy * occ;
      out.s_total += tail + ay * minority;
      out.j_z += st.current * occ;
    }
    previous = current;
    if (rising && frozen && n + 1 >= policy.n_min && block <= policy.tail_tol * out.log_terms) {
      out.levels = n + 1;
      return out;
    }
  }
}

/// Phi = -T sum_{n,s} ln(1 + exp(-(E - mu)/T)).
inline double grand_potential(const RingModel& model, const Coupling& c, double t, double mu,
                              const TruncationPolicy& policy = {}) {
  return -t * fermi_sums(model, c, t, mu, policy).log_terms;
}

inline double grand_spin_current(const RingModel& model, const Coupling& c, double t,
                                 double mu, const TruncationPolicy& policy = {}) {
  return fermi_sums(model, c, t, mu, policy).j_z;
}

/// Grand-canonical state at fixed mu. N, U and S come from exact Fermi-sum
/// identities; C = T dS/dT is differentiated numerically at fixed mu.
inline GrandState grand_evaluate(const RingModel& model, const Coupling& c, double t,
                                 double mu, const TruncationPolicy& policy = {},
                                 const DiffScheme& scheme = {}) {
  const auto sums = fermi_sums(model, c, t, mu, policy);
  GrandState st{};
  st.T = t;
  st.mu = mu;
  st.phi = -t * sums.log_terms;
  st.n_mean = sums.n_mean;
  st.u_total = sums.u_total;
  st.s_total = sums.s_total;
  st.j_z = sums.j_z;
  const auto ds = differentiate(
      [&](double x) { return fermi_sums(model, c, x, mu, policy).s_total; }, t, scheme);
  st.c_total = t * ds.value;
  st.domain_clipped = ds.clipped;
  return st;
}

}  // namespace ring_thermo
