#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qv/common.hpp"

namespace qv::covariance {

enum class Kind { FGN, LogModSpectral, Tabulated };

// Exact fGn covariance 0.5*(|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}).
double fgn_rho(double H, long long k);

// Stationary covariance sequence, immutable after construction. rho(0) = 1 and
// rho(-k) = rho(k); storage is one-sided. Values beyond the cache (Tabulated:
// beyond the table) evaluate to 0 for Tabulated and are extended on demand is
// NOT supported: construct with a large enough k_max.
class CovarianceModel {
 public:
  static CovarianceModel fgn(double H, std::size_t k_max);
  // Covariance of the log-modulated spectral density q; values come from the
  // spectral module's Fourier inversion and are cached here.
  static CovarianceModel log_mod_spectral(double H, double beta, std::size_t k_max);
  static CovarianceModel tabulated(std::vector<double> values);
  static CovarianceModel tabulated_from_file(const std::string& path);
  // sign * min(1, k^{2H-2} log^{2beta}(k+e)), rho(0)=1; used by the rate scans
  static CovarianceModel synthesized_log_power(double H, double beta, std::size_t k_max,
                                               int sign = +1);

  Kind kind() const { return kind_; }
  double H() const { return H_; }
  double beta() const { return beta_; }
  std::size_t k_max() const { return rho_.size() - 1; }
  const std::vector<double>& cache() const { return rho_; }
  std::string id() const;

  // even accessor: rho(k) == rho(-k); 0 beyond the cache for Tabulated,
  // out-of-range error otherwise
  double rho(long long k) const;

 private:
  CovarianceModel(Kind kind, double H, double beta, std::vector<double> rho)
      : kind_(kind), H_(H), beta_(beta), rho_(std::move(rho)) {}
  Kind kind_;
  double H_;
  double beta_;
  std::vector<double> rho_;
};

struct ValidationReport {
  bool rho0_is_one = false;
  bool constant_sign = false;
  long long first_sign_change = -1;   // lag of first sign flip, -1 if none
  bool eventually_monotone = false;
  long long k0 = -1;                  // smallest index after which |rho| is non-increasing
  bool pass() const { return rho0_is_one && constant_sign && eventually_monotone; }
};

// Scans rho(1..k_max): sign constancy, the onset index k0 of non-increasing
// |rho| (tolerance 1e-14 for plateaus), and the rho(0)=1 normalization.
// Failures are report entries, never exceptions.
ValidationReport validate_assumptions(const CovarianceModel& model, std::size_t k_max);

// True iff the m x m Toeplitz matrix R_{kl} = rho(k-l) factors with smallest
// LDL^T pivot >= -1e-10.
bool psd_check(const CovarianceModel& model, std::size_t m);

}  // namespace qv::covariance
