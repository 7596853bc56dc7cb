#include "qv/cumulants.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <sstream>

#include "qv/common.hpp"

namespace qv::cumulants {

namespace {

std::mutex fftw_plan_mutex;  // FFTW planning is not thread-safe

// linear self-convolution of a (length n) -> length 2n-1
std::vector<double> self_convolve(const std::vector<double>& a) {
  const std::size_t n = a.size();
  if (n == 0) return {};
  if (n <= 512) {
    std::vector<double> out(2 * n - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i + j] += a[i] * a[j];
    return out;
  }
  std::size_t m = 1;
  while (m < 2 * n) m <<= 1;
  std::vector<double> in(m, 0.0);
  std::copy(a.begin(), a.end(), in.begin());
  std::vector<std::complex<double>> spec(m / 2 + 1);
  std::vector<double> res(m);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.data(),
                                         reinterpret_cast<fftw_complex*>(spec.data()),
                                         FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);
    for (auto& z : spec) z *= z;
    fftw_plan bwd = fftw_plan_dft_c2r_1d(static_cast<int>(m),
                                         reinterpret_cast<fftw_complex*>(spec.data()), res.data(),
                                         FFTW_ESTIMATE);
    fftw_execute(bwd);
    fftw_destroy_plan(bwd);
  }
  std::vector<double> out(2 * n - 1);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = res[i] / static_cast<double>(m);
  return out;
}

// n v_n under the paper's convention: -n + 2 sum_{k<n} (n-k) rho^2(k)
double nvn_half(const covariance::CovarianceModel& model, std::size_t n) {
  std::vector<double> terms(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = model.rho(static_cast<long long>(k));
    terms[k] = (static_cast<double>(n) - k) * r * r;
  }
  return -static_cast<double>(n) + 2.0 * pairwise_sum(terms);
}

double tr_R3(const covariance::CovarianceModel& model, std::size_t n) {
  // tr(R^3) = 3 (n v_n/2) - 2n + 6 sum_{s>=2} (n-s) rho(s) (rho_+ * rho_+)(s)
  // with rho_+ the one-sided tail (rho_+(0) = 0)
  const double nvn_p = nvn_half(model, n);
  if (n < 3) return 3.0 * nvn_p - 2.0 * static_cast<double>(n);
  std::vector<double> tail(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) tail[k] = model.rho(static_cast<long long>(k));
  const std::vector<double> c2 = self_convolve(tail);
  std::vector<double> terms(n > 2 ? n - 2 : 0);
  for (std::size_t s = 2; s < n; ++s)
    terms[s - 2] = (static_cast<double>(n) - s) * model.rho(static_cast<long long>(s)) * c2[s];
  const double Q = pairwise_sum(terms);
  return 3.0 * nvn_p - 2.0 * static_cast<double>(n) + 6.0 * Q;
}

double tr_R4(const covariance::CovarianceModel& model, std::size_t n, int workers) {
  // tr(R^4) = sum_{i,l} (R^2)_{il}^2; per diagonal d = i-l the entries are
  // windowed sums W_d(l) = sum_{m=-l}^{n-1-l} rho(d-m) rho(m), read off prefix
  // sums of the shifted products. Fixed-order reduction over d.
  if (n == 1) return 1.0;
  const long long nn = static_cast<long long>(n);
  std::vector<double> rho_ext(2 * n - 1);
  for (long long m = -(nn - 1); m <= nn - 1; ++m) rho_ext[m + nn - 1] = model.rho(m);

  std::vector<double> per_diag(n, 0.0);
  parallel_for(n, workers, [&](std::size_t du) {
    const long long d = static_cast<long long>(du);
    thread_local std::vector<double> prefix;
    prefix.assign(2 * n, 0.0);
    // prefix[t+1] = sum_{m=-(n-1)}^{t-(n-1)} rho(d-m) rho(m)
    double run = 0.0;
    for (long long m = -(nn - 1); m <= nn - 1; ++m) {
      const long long dm = d - m;
      const double a = (dm >= -(nn - 1) && dm <= nn - 1) ? rho_ext[dm + nn - 1] : 0.0;
      run += a * rho_ext[m + nn - 1];
      prefix[m + nn] = run;
    }
    double acc = 0.0;
    for (long long l = 0; l <= nn - 1 - d; ++l) {
      const double W = prefix[(nn - 1 - l) + nn] - prefix[(-l - 1) + nn];
      acc += W * W;
    }
    per_diag[du] = (d == 0 ? 1.0 : 2.0) * acc;
  });
  return pairwise_sum(per_diag);
}

}  // namespace

double variance_vn(const covariance::CovarianceModel& model, std::size_t n) {
  if (n < 1) throw domain_error("variance_vn: n must be >= 1");
  return 2.0 * nvn_half(model, n) / static_cast<double>(n);
}

double kappa3_exact(const covariance::CovarianceModel& model, std::size_t n) {
  if (n < 1) throw domain_error("kappa3_exact: n must be >= 1");
  const double vn = variance_vn(model, n);
  return 8.0 * tr_R3(model, n) / (std::pow(static_cast<double>(n), 1.5) * std::pow(vn, 1.5));
}

double kappa4_exact(const covariance::CovarianceModel& model, std::size_t n, int workers) {
  if (n < 1) throw domain_error("kappa4_exact: n must be >= 1");
  const double vn = variance_vn(model, n);
  const double nv = static_cast<double>(n) * vn;
  return 48.0 * tr_R4(model, n, workers) / (nv * nv);
}

double abs_power_sum(const covariance::CovarianceModel& model, std::size_t n, double p) {
  std::vector<double> terms(n);
  terms[0] = std::pow(std::abs(model.rho(0)), p);
  for (std::size_t k = 1; k < n; ++k)
    terms[k] = 2.0 * std::pow(std::abs(model.rho(static_cast<long long>(k))), p);
  return pairwise_sum(terms);
}

Kappa3Bounds kappa3_bounds(const covariance::CovarianceModel& model, std::size_t n) {
  if (n < 1) throw domain_error("kappa3_bounds: n must be >= 1");
  const double vn = variance_vn(model, n);
  const double s32 = abs_power_sum(model, n, 1.5);
  const double upper = 8.0 * s32 * s32 / (std::pow(vn, 1.5) * std::sqrt(static_cast<double>(n)));
  return {upper / 4.0, upper};
}

double kappa4_bound_shape(const covariance::CovarianceModel& model, std::size_t n) {
  if (n < 1) throw domain_error("kappa4_bound_shape: n must be >= 1");
  const double vn = variance_vn(model, n);
  const double s43 = abs_power_sum(model, n, 4.0 / 3.0);
  return s43 * s43 * s43 / (vn * vn * static_cast<double>(n));
}

double domination_ratio(const covariance::CovarianceModel& model, std::size_t n, int workers) {
  const double k3 = kappa3_exact(model, n);
  if (k3 == 0.0) throw domain_error("domination_ratio: kappa3 = 0 (degenerate model)");
  const double k4 = kappa4_exact(model, n, workers);
  return std::pow(static_cast<double>(n), 0.25) * std::pow(k4, 0.75) / std::abs(k3);
}

CumulantReport cumulant_report(const covariance::CovarianceModel& model, std::size_t n,
                               int workers) {
  CumulantReport r;
  r.n = n;
  r.v_n = variance_vn(model, n);
  r.kappa3 = kappa3_exact(model, n);
  const auto b = kappa3_bounds(model, n);
  r.kappa3_lower = b.lower;
  r.kappa3_upper = b.upper;
  r.kappa4 = kappa4_exact(model, n, workers);
  r.kappa4_bound = kappa4_bound_shape(model, n);
  r.domination = r.kappa3 == 0.0
                     ? std::numeric_limits<double>::quiet_NaN()
                     : std::pow(static_cast<double>(n), 0.25) * std::pow(r.kappa4, 0.75) /
                           std::abs(r.kappa3);
  r.S32 = abs_power_sum(model, n, 1.5);
  r.S43 = abs_power_sum(model, n, 4.0 / 3.0);
  return r;
}

std::string csv_header() {
  return "n,v_n,kappa3,kappa3_lower,kappa3_upper,kappa4,kappa4_bound_shape,domination_ratio";
}

std::string csv_row(const CumulantReport& r) {
  std::ostringstream ss;
  ss << r.n << ',' << fmt_double(r.v_n) << ',' << fmt_double(r.kappa3) << ','
     << fmt_double(r.kappa3_lower) << ',' << fmt_double(r.kappa3_upper) << ','
     << fmt_double(r.kappa4) << ',' << fmt_double(r.kappa4_bound) << ','
     << fmt_double(r.domination);
  return ss.str();
}

double kappa3_brute(const covariance::CovarianceModel& model, std::size_t n) {
  const long long nn = static_cast<long long>(n);
  double tr3 = 0.0;
  for (long long i = 0; i < nn; ++i)
    for (long long j = 0; j < nn; ++j)
      for (long long k = 0; k < nn; ++k) tr3 += model.rho(i - j) * model.rho(j - k) * model.rho(k - i);
  const double vn = variance_vn(model, n);
  return 8.0 * tr3 / (std::pow(static_cast<double>(n), 1.5) * std::pow(vn, 1.5));
}

double kappa4_brute(const covariance::CovarianceModel& model, std::size_t n) {
  const long long nn = static_cast<long long>(n);
  double tr4 = 0.0;
  for (long long i = 0; i < nn; ++i)
    for (long long j = 0; j < nn; ++j)
      for (long long k = 0; k < nn; ++k)
        for (long long l = 0; l < nn; ++l)
          tr4 += model.rho(i - j) * model.rho(j - k) * model.rho(k - l) * model.rho(l - i);
  const double vn = variance_vn(model, n);
  const double nv = static_cast<double>(n) * vn;
  return 48.0 * tr4 / (nv * nv);
}

}  // namespace qv::cumulants
