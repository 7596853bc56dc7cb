#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qv {

// Parameter outside its mathematical domain (CLI exit code 2).
class domain_error : public std::runtime_error {
 public:
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature / iteration failed to reach the requested tolerance (CLI exit code 3).
class numeric_error : public std::runtime_error {
 public:
  numeric_error(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved) + ")"),
        achieved_tolerance(achieved) {}
  double achieved_tolerance;
};

// Exact rational carried next to a double so boundary cases like H = 2/3 or
// beta = -1/4 compare exactly when entered as fractions.
struct Param {
  double value = 0.0;
  std::optional<std::pair<long long, long long>> exact;  // num/den, den > 0

  Param() = default;
  Param(double v) : value(v) {}
  static Param rational(long long num, long long den);
  static Param parse(const std::string& text);  // accepts "0.7" or "2/3"

  // three-way comparison against an exact rational p/q
  int cmp(long long p, long long q) const;
  bool lt(long long p, long long q) const { return cmp(p, q) < 0; }
  bool eq(long long p, long long q) const { return cmp(p, q) == 0; }
  bool gt(long long p, long long q) const { return cmp(p, q) > 0; }
};

// Gauss-Legendre nodes/weights on [-1,1].
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_rule(int npoints);  // cached, npoints in [2,64]

// sum with pairwise reduction; order fixed by the input vector
double pairwise_sum(const double* a, std::size_t n);
inline double pairwise_sum(const std::vector<double>& a) { return pairwise_sum(a.data(), a.size()); }

// Static-partition parallel map: fn(i) for i in [0,n). Each worker writes only
// its own indices, so results are identical for any worker count.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);
int default_workers();  // QV_WORKERS env var, else hardware_concurrency

// least squares fit y ~ sum_j c_j * basis_j(x); returns coefficients and RMS residual
struct FitResult {
  std::vector<double> coeff;
  double resid_rms = 0.0;
};
FitResult lstsq(const std::vector<std::vector<double>>& basis_cols, const std::vector<double>& y);

// slope of y against x by simple linear regression
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// double -> shortest round-trip decimal (%.17g), used by all writers so that
// re-runs are byte-identical
std::string fmt_double(double v);

double normal_cdf(double z);

}  // namespace qv
