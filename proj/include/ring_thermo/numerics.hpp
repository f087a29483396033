#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

#include "ring_thermo/core_model.hpp"
#include "ring_thermo/errors.hpp"

namespace ring_thermo {

inline double erf(double z) { return std::erf(z); }

/// Stopping rule for the infinite (n, s) sums.
struct TruncationPolicy {
  double tail_tol = 1e-12;
  long n_min = 16;
  long n_max = 200000;
  /// Boltzmann exponent beyond which a state counts as thermally frozen out.
  double exponent_cutoff = 40.0;

  void validate() const {
    if (!(tail_tol > 0.0 && tail_tol < 1.0))
      throw std::invalid_argument("TruncationPolicy: tail_tol must be in (0, 1)");
    if (n_min < 1 || n_max < 1 || n_min > n_max)
      throw std::invalid_argument("TruncationPolicy: need 1 <= n_min <= n_max");
  }
};

enum class DiffOrder { Central2, Central4 };

struct DiffScheme {
  DiffOrder order = DiffOrder::Central4;
  double rel_step = 1e-3;
  double min_step = 1e-5;

  double step(double t) const { return std::max(rel_step * std::abs(t), min_step); }
  int half_width() const { return order == DiffOrder::Central2 ? 1 : 2; }
};

struct Derivative {
  double value;
  double step;
  /// Set when the stencil had to be shrunk to stay inside T > 0.
  bool clipped = false;
};

/// Central difference of f at x with fixed step h (no domain checks).
template <class F>
double stencil_derivative(F&& f, double x, double h, DiffOrder order) {
  if (order == DiffOrder::Central2) return (f(x + h) - f(x - h)) / (2.0 * h);
  return (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) /
         (12.0 * h);
}

/// Temperature derivative of f at t > 0.
template <class F>
Derivative differentiate(F&& f, double t, const DiffScheme& scheme = {}) {
  if (!(t > 0.0)) throw DomainError("differentiate: evaluation point must be > 0");
  double h = scheme.step(t);
  bool clipped = false;
  const int w = scheme.half_width();
  if (t - w * h <= 0.0) {
    h = t / (2.0 * w);
    clipped = true;
  }
  return Derivative{stencil_derivative(f, t, h, scheme.order), h, clipped};
}

/// Running Boltzmann sum kept relative to the lowest energy seen so far, so
/// that neither the weights nor their sum leave double range. Moments are
/// accumulated with a weighted Welford update.
class BoltzmannAccumulator {
 public:
  explicit BoltzmannAccumulator(double beta) : beta_(beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw DomainError("Boltzmann sum: beta must be positive and finite");
  }

  void add(double e, double observable = 0.0) {
    if (e < shift_) {
      const double k = count_ == 0 ? 0.0 : std::exp(-beta_ * (shift_ - e));
      weight_ *= k;
      m2_ *= k;
      shift_ = e;
    }
    const double w = std::exp(-beta_ * (e - shift_));
    ++count_;
    if (w == 0.0) return;
    weight_ += w;
    const double r = w / weight_;
    const double delta = e - mean_;
    mean_ += r * delta;
    m2_ += w * delta * (e - mean_);
    mean_obs_ += r * (observable - mean_obs_);
  }

  /// Weight of energy e relative to the current running sum.
  double relative_weight(double e) const {
    return std::exp(-beta_ * (e - shift_)) / weight_;
  }

  double beta() const { return beta_; }
  double ground() const { return shift_; }
  double log_sum() const { return -beta_ * shift_ + std::log(weight_); }
  double mean() const { return mean_; }
  double variance() const { return std::max(m2_ / weight_, 0.0); }
  double mean_observable() const { return mean_obs_; }
  long count() const { return count_; }

 private:
  double beta_;
  double shift_ = std::numeric_limits<double>::infinity();
  double weight_ = 0.0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double mean_obs_ = 0.0;
  long count_ = 0;
};

struct BoltzmannSum {
  double log_sum;
  double mean_energy;
  double mean_energy_sq;
  double variance;
  /// Boltzmann average of the per-state observable (the level index n for ring spectra).
  double mean_observable;
  long levels;
};

namespace detail {

inline BoltzmannSum finish(const BoltzmannAccumulator& acc, long levels) {
  const double m = acc.mean();
  const double v = acc.variance();
  return {acc.log_sum(), m, v + m * m, v, acc.mean_observable(), levels};
}

}  // namespace detail

/// log sum exp(-beta E) over a finite list of energies.
inline BoltzmannSum stable_boltzmann_sum(std::span<const double> energies, double beta) {
  if (energies.empty()) throw std::invalid_argument("Boltzmann sum: no energies");
  BoltzmannAccumulator acc(beta);
  for (double e : energies) acc.add(e);
  return detail::finish(acc, static_cast<long>(energies.size()));
}

/// Boltzmann sum over the levels n = 0, 1, 2, ... produced by `level(n)`,
/// where each level is a range of states exposing `.energy` and `.n`.
///
/// Stops after level n once n + 1 >= policy.n_min, every state of the level
/// lies on the rising branch of its spectrum, is frozen out
/// (beta (E - E_ground) > cutoff) and the level's total weight is below
/// tail_tol of the running sum.
template <class LevelFn>
BoltzmannSum stable_boltzmann_sum(LevelFn&& level, double beta,
                                  const TruncationPolicy& policy) {
  policy.validate();
  BoltzmannAccumulator acc(beta);
  auto previous = level(0L);
  for (const auto& st : previous) acc.add(st.energy, static_cast<double>(st.n));
  bool rising = false;
  for (long n = 0;;) {
    if (rising && n + 1 >= policy.n_min) {
      bool frozen = true;
      double block = 0.0;
      for (const auto& st : previous) {
        block += acc.relative_weight(st.energy);
        if (beta * (st.energy - acc.ground()) <= policy.exponent_cutoff) frozen = false;
      }
      if (frozen && block <= policy.tail_tol) return detail::finish(acc, n + 1);
    }
    if (++n >= policy.n_max)
      throw TruncationFailure("Boltzmann sum: tail bound not met within n_max = " +
                              std::to_string(policy.n_max) + " levels");
    auto current = level(n);
    rising = true;
    auto it = previous.begin();
    for (const auto& st : current) {
      if (st.energy < it->energy) rising = false;
      acc.add(st.energy, static_cast<double>(st.n));
      ++it;
    }
    previous = current;
  }
}

/// Single-particle partition function of the ring from the Euler-Maclaurin
/// formula truncated after the B4 term.
///
/// Anisotropic:
///   sqrt(pi/a) {1 + 1/2 sum_s erf(sqrt(a/4) D_s)}
///     + sum_s exp(-a D_s^2/4) {1/2 - a/12 (1 + a/10) D_s + a^3 D_s^3/720}
/// Isotropic:
///   sqrt(pi/a) {1 - 1/2 sum_s erf(sqrt(a/4) P_s)}
///     + sum_s exp(-a P_s^2/4) {1/2 + a/12 (1 + a/10) P_s - a^3 P_s^3/720}
/// with a = beta * omega, D_s = delta_s, P_s = psi_s. The expansion is only
/// trustworthy for T <~ omega-scale temperatures up to 1 eV at omega = 1 eV.
inline double euler_maclaurin_z1(const RingModel& model, const Coupling& c, double beta) {
  const double a = beta * model.omega();
  if (!(a > 0.0) || !std::isfinite(a))
    throw DomainError("euler_maclaurin_z1: beta * omega must be positive and finite");
  const double lead = std::sqrt(std::numbers::pi / a);
  const double arg = std::sqrt(a / 4.0);
  const double sign = c.variant == Variant::Anisotropic ? 1.0 : -1.0;
  double erf_sum = 0.0;
  double boundary = 0.0;
  for (int s = 1; s <= 2; ++s) {
    const double d = c.variant == Variant::Anisotropic ? delta_s(c, s) : psi_s(c, s);
    erf_sum += erf(arg * d);
    boundary += std::exp(-a * d * d / 4.0) *
                (0.5 - sign * (a / 12.0) * (1.0 + a / 10.0) * d +
                 sign * a * a * a * d * d * d / 720.0);
  }
  const double z = lead * (1.0 + sign * 0.5 * erf_sum) + boundary;
  if (!(z > 0.0) || !std::isfinite(z))
    throw NonPositiveResult("euler_maclaurin_z1: truncated expansion gave Z1 = " +
                            std::to_string(z) + " at beta*omega = " + std::to_string(a));
  return z;
}

/// Direct-sum Boltzmann data for the ring spectrum (observable = level index n).
inline BoltzmannSum ring_boltzmann_sum(const RingModel& model, const Coupling& c,
                                       double beta, const TruncationPolicy& policy = {}) {
  return stable_boltzmann_sum([&](long n) { return level(model, c, n); }, beta, policy);
}

}  // namespace ring_thermo
