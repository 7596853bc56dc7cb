#pragma once

#include <string>
#include <vector>

#include "qv/spectral.hpp"

namespace qv::tvbound {

struct TVBoundConfig {
  double H = 0.85;
  double beta = 1.0;
  double alpha = 0.5;     // split exponent in (0,1)
  double c_Finf = 1.0;    // unknown comparison constant; outputs are "up to constant"
  int gauss_points = 12;
  int panels_per_decade = 6;
};

// The three integrals of the squared-L2 bound, with their multipliers:
//   T1 = 5  iint_{R^2 \ (I_{n^alpha})^2} |f|^2 h^2
//   T2 = 16 iint_{(I_n)^2} |f_n - f|^2 h^2
//   T3 = (4 / n^{2-2 alpha}) iint_{R^2} |f|^2 h^2
// where h(u) = min(1, 1/|u|), f(x,y) = |xy|^{(1-2H)/2} / sqrt(K'_eff),
// f_n = sqrt(q(x/n) q(y/n) / (n v_n)), I_s = [-pi s, pi s), and n v_n comes
// from the quadrature covariance of q. Everything reduces to iterated 1-D
// panel quadrature of separable terms with kink splits at |x -+ y| = 1 and
// geometric grading toward 0, infinity and the x = y ridge.
struct TVTerms {
  std::size_t n = 0;
  double T1 = 0.0, T2 = 0.0, T3 = 0.0;
  double bound = 0.0;  // c_Finf * (T1 + T2 + T3)^{1/4}
};

class TVBoundEvaluator {
 public:
  // Requires H in (3/4,1), beta >= 0, alpha in (0,1). Computes the cutoff
  // covariance once up to n_max.
  TVBoundEvaluator(const TVBoundConfig& cfg, std::size_t n_max);

  TVTerms cor2chaos_terms(std::size_t n) const;
  double tnns_bound(std::size_t n) const;

  double full_plane_integral() const { return full_plane_; }  // iint |f|^2 h^2
  double nvn_paper(std::size_t n) const;                      // n + 2 sum (n-k) rho^2(k)

  const TVBoundConfig& config() const { return cfg_; }

 private:
  TVBoundConfig cfg_;
  spectral::SpectralDensity sd_;
  std::vector<double> rho_;      // quadrature covariance of q
  std::vector<double> p1_, p2_;  // prefix sums of rho^2 and k rho^2 for n v_n
  double k_prime_eff_;
  double full_plane_;
};

enum class DecayModel { Power, LogPower, LogLogPower };

struct DecayFit {
  DecayModel model = DecayModel::Power;
  double C = 0.0;
  double exponent = 0.0;
  double resid_rms = 0.0;  // in log space
};

// value ~ C n^a | C log^b n | C (log log n)^b, least squares on transformed
// coordinates; needs >= 6 points, positive values.
DecayFit decay_fit(const std::vector<std::size_t>& n, const std::vector<double>& value,
                   DecayModel model);

std::string csv_header();
std::string csv_row(const TVTerms& t);

}  // namespace qv::tvbound
