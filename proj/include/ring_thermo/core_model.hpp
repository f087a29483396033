#pragma once

#include <array>
#include <cmath>
#include <string>

#include "ring_thermo/errors.hpp"

namespace ring_thermo {

// hbar * c in eV nm, used to express lengths in natural units (eV^-1).
inline constexpr double kHbarC = 197.3269804;
inline constexpr double kElectronMass = 0.511e6;  // eV

enum class UnitMode { Physical, Dimensionless };
enum class Variant { Anisotropic, Isotropic };

inline std::string to_string(Variant v) {
  return v == Variant::Anisotropic ? "anisotropic" : "isotropic";
}
inline std::string to_string(UnitMode m) {
  return m == UnitMode::Physical ? "physical" : "dimensionless";
}

/// Ring parameters in natural units (hbar = c = k_B = 1).
///
/// `omega` is the level spacing scale 1/(2 m r0^2). In physical mode it is
/// derived from the mass and radius; in dimensionless mode it is set directly
/// and mass/radius only enter the spin-current prefactor 1/(4 m r0).
class RingModel {
 public:
  static RingModel physical(double mass_ev, double radius_nm) {
    const double radius = radius_nm / kHbarC;
    check_positive(mass_ev, "mass");
    check_positive(radius, "radius");
    return RingModel(1.0 / (2.0 * mass_ev * radius * radius), mass_ev, radius,
                     UnitMode::Physical);
  }

  static RingModel dimensionless(double omega, double mass = 1.0,
                                 double radius = 1.0) {
    check_positive(omega, "omega");
    check_positive(mass, "mass");
    check_positive(radius, "radius");
    return RingModel(omega, mass, radius, UnitMode::Dimensionless);
  }

  double omega() const { return omega_; }
  double mass() const { return mass_; }
  /// Radius in eV^-1.
  double radius() const { return radius_; }
  UnitMode unit_mode() const { return mode_; }
  double current_prefactor() const { return 1.0 / (4.0 * mass_ * radius_); }

 private:
  RingModel(double omega, double mass, double radius, UnitMode mode)
      : omega_(omega), mass_(mass), radius_(radius), mode_(mode) {}

  static void check_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError(std::string("RingModel: ") + what +
                        " must be positive and finite");
  }

  double omega_;
  double mass_;
  double radius_;
  UnitMode mode_;
};

/// Lorentz-violating configuration, stored through its aggregated
/// dimensionless strength (xi for d_jk, xi_00 for d_00).
struct Coupling {
  Variant variant;
  double strength;

  static Coupling anisotropic(double xi) { return make(Variant::Anisotropic, xi); }
  static Coupling isotropic(double xi00) { return make(Variant::Isotropic, xi00); }

  static Coupling make(Variant v, double strength) {
    if (!(strength >= 0.0) || !std::isfinite(strength))
      throw DomainError("Coupling: strength must be non-negative and finite");
    return Coupling{v, strength};
  }

  /// sqrt(1 + 4 strength^2), the spin splitting of both spectra.
  double splitting() const { return std::sqrt(1.0 + 4.0 * strength * strength); }

  /// Principal-branch arctan(2 strength), in [0, pi/2).
  double theta() const { return std::atan(2.0 * strength); }
};

struct SpectrumPoint {
  int n;
  int s;  // 1 = spin down, 2 = spin up
  double energy;
  double current;
};

namespace detail {

inline double spin_sign(int s) { return s == 1 ? -1.0 : 1.0; }

inline void check_quantum_numbers(long n, int s) {
  if (n < 0) throw DomainError("quantum number n must be >= 0");
  if (s != 1 && s != 2) throw DomainError("spin label s must be 1 or 2");
}

}  // namespace detail

/// 1 + (-1)^s sqrt(1 + 4 xi^2).
inline double delta_s(const Coupling& c, int s) {
  if (c.variant != Variant::Anisotropic)
    throw VariantMismatch("delta_s requires an anisotropic coupling");
  if (s != 1 && s != 2) throw DomainError("spin label s must be 1 or 2");
  return 1.0 + detail::spin_sign(s) * c.splitting();
}

/// 1 - (-1)^s sqrt(1 + 4 xi_00^2).
inline double psi_s(const Coupling& c, int s) {
  if (c.variant != Variant::Isotropic)
    throw VariantMismatch("psi_s requires an isotropic coupling");
  if (s != 1 && s != 2) throw DomainError("spin label s must be 1 or 2");
  return 1.0 - detail::spin_sign(s) * c.splitting();
}

/// Offset of the parabola vertex: E(n, s) = omega * (n - vertex)^2.
inline double vertex(const Coupling& c, int s) {
  return c.variant == Variant::Anisotropic ? 0.5 * delta_s(c, s)
                                           : -0.5 * psi_s(c, s);
}

inline double energy(const RingModel& model, const Coupling& c, long n, int s) {
  detail::check_quantum_numbers(n, s);
  const double x = static_cast<double>(n) - vertex(c, s);
  return model.omega() * x * x;
}

/// Azimuthal spin-current eigenvalue (2 n cos(theta) - 1) / (4 m r0);
/// the same for both spin labels.
inline double spin_current_eigen(const RingModel& model, const Coupling& c, long n) {
  if (n < 0) throw DomainError("quantum number n must be >= 0");
  return model.current_prefactor() *
         (2.0 * static_cast<double>(n) * std::cos(c.theta()) - 1.0);
}

/// Both spin states of angular level n, in s order.
inline std::array<SpectrumPoint, 2> level(const RingModel& model, const Coupling& c,
                                          long n) {
  const double j = spin_current_eigen(model, c, n);
  return {SpectrumPoint{static_cast<int>(n), 1, energy(model, c, n, 1), j},
          SpectrumPoint{static_cast<int>(n), 2, energy(model, c, n, 2), j}};
}

}  // namespace ring_thermo
