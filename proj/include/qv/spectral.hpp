#pragma once

#include <cstddef>
#include <vector>

#include "qv/common.hpp"

namespace qv::spectral {

struct QuadratureConfig {
  int gauss_points = 16;        // per panel
  int dyadic_levels = 46;       // geometric refinement toward the x=0 singularity
  int filon_degree = 20;        // Legendre degree for the batched transform
  double rel_tol = 1e-10;       // panel-doubling stabilization target
};

// q(x) = C_{H,beta} |x|^{1-2H} log^{2beta}(e pi / |x|) on [-pi,pi] \ {0},
// normalized so that (1/2pi) int q = 1.
class SpectralDensity {
 public:
  // Construction permits H in (0,1); the H>3/4 regime checks happen where
  // they are needed. beta >= 0.
  SpectralDensity(double H, double beta, QuadratureConfig quad = {});

  double H() const { return H_; }
  double beta() const { return beta_; }
  double C() const { return C_; }
  const QuadratureConfig& quad() const { return quad_; }

  double q(double x) const;  // x != 0, |x| <= pi

 private:
  double H_, beta_, C_;
  QuadratureConfig quad_;
};

// 2pi / int_{-pi}^{pi} |x|^{1-2H} log^{2beta}(e pi/|x|) dx, singularity removed
// by the substitution x = pi u^{1/(2-2H)}; panel doubling must stabilize to
// rel_tol or a numeric_error is thrown.
double normalization_constant(double H, double beta, const QuadratureConfig& quad = {});

// rho(k) = (1/2pi) int_{-pi}^{pi} q(x) cos(kx) dx. Half-period panels of width
// pi/max(k,1) with a substitution panel at the singularity.
double rho_from_q(const SpectralDensity& sd, long long k);

// All of rho(0..k_max) in one pass: Filon-Legendre moments on dyadic panels,
// O((k_max + 1) * levels * degree). Agrees with rho_from_q to ~1e-10.
std::vector<double> rho_from_q_batch(const SpectralDensity& sd, std::size_t k_max);

struct AsymptoticConstants {
  double H = 0.0;
  double K_H = 0.0;          // paper closed form 2 Gamma(2-2H) cos(pi(1-H))
  double K_H_prime = 0.0;    // (2 Gamma(2-2H) cos(pi(1-H)))^2 / ((4H-2)(4H-3))
  double numeric_K_H = 0.0;  // (1/pi) int_0^inf x^{1-2H} cos x dx, evaluated numerically
  double closed_over_numeric = 0.0;  // K_H / numeric_K_H, recorded not assumed
};

// numeric_K_H by half-period summation with Euler acceleration; K_H_prime
// needs 4H-3 > 0 only when used, not here.
AsymptoticConstants asymptotic_constants(double H);

// Finite-k effective constant of the modulated oscillatory integral:
//   (1 / (pi L(k))) int_0^{k pi} x^{1-2H} cos(x) log^{2beta}(k e pi / x) dx,
// the dense-quadrature oracle against which the circle quadrature is checked.
// Reduces to numeric_K_H as k -> infinity (and for beta = 0 up to the
// truncated tail).
double k_eff_modulated(double H, double beta, long long k, int gauss_points = 16);

// C_{H,beta} * numeric_K_H * log^{2beta}(k) * k^{2H-2}
double rho_asymptotic(const AsymptoticConstants& consts, const SpectralDensity& sd, long long k);

// (C_{H,beta})^2 * K'_H * n^{4H-2} * log^{4 beta}(n); requires H > 3/4
double nvn_asymptotic(const AsymptoticConstants& consts, const SpectralDensity& sd, long long n);

}  // namespace qv::spectral
