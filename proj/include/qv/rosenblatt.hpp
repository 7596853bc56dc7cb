#pragma once

#include <cstdint>
#include <vector>

#include "qv/common.hpp"

namespace qv::rosenblatt {

// Finite-grid approximation of the second-chaos limit
//   F = cst * iint |xy|^{(1-2H)/2} g(x+y) W(dx) W(dy),  g(u) = (e^{iu}-1)/(iu),
// realified to a symmetric quadratic form in 2M standard normals and rescaled
// so the analytic variance is exactly 1.
//
// Grid: cells of width Delta = cutoff/M centred at +-(j-1/2)Delta with the
// |x|^{1-2H} mass integrated exactly into the cell weights. The |fg|^2 tail
// beyond the cutoff decays like cutoff^{-(4H-3)}, which is slow, so the limit
// cumulants are tail-extrapolated from a second eigensolve on the embedded
// sub-grid with cutoff/sqrt(2).
struct RosenblattApproximant {
  double H = 0.0;
  std::size_t M = 0;
  double cutoff = 0.0;
  double delta = 0.0;
  std::vector<double> eigenvalues;    // of the unit-variance form, descending |.|
  double variance = 0.0;              // 2 sum lambda^2 == 1 after rescaling
  double kappa3 = 0.0;                // 8 sum lambda^3 (grid form)
  double kappa4 = 0.0;                // 48 sum lambda^4 (grid form)
  double kappa3_limit = 0.0;          // tail-extrapolated, exponent 4H-3
  double kappa4_limit = 0.0;
  double prefactor_used = 0.0;        // realized kernel prefactor after unit-variance rescale
  double prefactor_paper = 0.0;       // 1 / sqrt(K'_H) with the closed-form K'_H
  double k_prime_eff = 0.0;           // 2 numeric_K_H^2 / ((4H-2)(4H-3))
};

// H in (3/4,1), M >= 16; cutoff defaults to 4 sqrt(M)
RosenblattApproximant build_rosenblatt(double H, std::size_t M, double cutoff = 0.0);

// samples of sum lambda_i (Z_i^2 - 1); per-sample stream keyed by (seed, index)
std::vector<double> sample_rosenblatt(const RosenblattApproximant& approx, std::size_t samples,
                                      std::uint64_t seed, int workers = 1);

}  // namespace qv::rosenblatt
