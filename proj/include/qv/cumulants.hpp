#pragma once

#include <string>
#include <vector>

#include "qv/covariance.hpp"

namespace qv::cumulants {

// All cumulants are those of F_n = V_n / sqrt(v_n) with
// v_n := (2/n) sum_{k,l=0}^{n-1} rho(k-l)^2, so that Var(F_n) = 1 exactly.
//   kappa_p(F_n) = 2^{p-1} (p-1)! tr(R^p) / (n v_n / 2)^{p/2},  R_{kl} = rho(k-l)

// O(n) evaluation 2*(-1 + 2 sum_{k<n} (1 - k/n) rho(k)^2).
double variance_vn(const covariance::CovarianceModel& model, std::size_t n);

// 8 tr(R^3) / (n^{3/2} v_n^{3/2}); tr(R^3) by the lag identity
// tr(R^3) = 3 (n v_n / 2) - 2n + 6 sum_{s=2}^{n-1} (n-s) rho(s) (rho*rho)(s)
// with a single FFT convolution of the one-sided tail.
double kappa3_exact(const covariance::CovarianceModel& model, std::size_t n);

// 48 tr(R^4) / (n v_n)^2; tr(R^4) = sum over diagonals d of the squared
// sliding-window inner products W_d(l), O(n^2) time, O(n) memory. Parallel
// over d with a fixed-order reduction.
double kappa4_exact(const covariance::CovarianceModel& model, std::size_t n, int workers = 1);

// S32 = sum_{|k|<n} |rho(k)|^{3/2}, S43 = sum_{|k|<n} |rho(k)|^{4/3}
double abs_power_sum(const covariance::CovarianceModel& model, std::size_t n, double p);

// upper = 8 v_n^{-3/2} n^{-1/2} S32^2, lower = upper / 4
struct Kappa3Bounds {
  double lower = 0.0, upper = 0.0;
};
Kappa3Bounds kappa3_bounds(const covariance::CovarianceModel& model, std::size_t n);

// B_n = v_n^{-2} n^{-1} S43^3; kappa4_exact / B_n stays bounded in n
double kappa4_bound_shape(const covariance::CovarianceModel& model, std::size_t n);

// n^{1/4} kappa4^{3/4} / |kappa3|; kappa3 == 0 is a degenerate model
double domination_ratio(const covariance::CovarianceModel& model, std::size_t n, int workers = 1);

struct CumulantReport {
  std::size_t n = 0;
  double v_n = 0.0;
  double kappa3 = 0.0;
  double kappa3_lower = 0.0;
  double kappa3_upper = 0.0;
  double kappa4 = 0.0;
  double kappa4_bound = 0.0;
  double domination = 0.0;
  double S32 = 0.0;
  double S43 = 0.0;
};

CumulantReport cumulant_report(const covariance::CovarianceModel& model, std::size_t n,
                               int workers = 1);

std::string csv_header();
std::string csv_row(const CumulantReport& r);

// test oracles: direct triple / quadruple sums, O(n^3) and O(n^4)
double kappa3_brute(const covariance::CovarianceModel& model, std::size_t n);
double kappa4_brute(const covariance::CovarianceModel& model, std::size_t n);

}  // namespace qv::cumulants
