#include "qv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace qv::spectral {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// int_0^1 f(u) du after u = e^{-t}: int_0^inf f(e^{-t}) e^{-t} dt with fixed
// panels on [0, 120]; integrands here are smooth with at most polynomial
// growth in t, so the truncated tail is below double precision.
double unit_interval_log_substituted(const std::function<double(double)>& f, int panels,
                                     int gauss_points) {
  const GaussRule& g = gauss_rule(gauss_points);
  const double t_max = 120.0;
  const double w = t_max / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = (p + 0.5) * w;
    double s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double t = c + 0.5 * w * g.x[i];
      s += g.w[i] * f(std::exp(-t)) * std::exp(-t);
    }
    total += 0.5 * w * s;
  }
  return total;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b, int gauss_points) {
  const GaussRule& g = gauss_rule(gauss_points);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
  return h * s;
}

}  // namespace

double normalization_constant(double H, double beta, const QuadratureConfig& quad) {
  if (!(H > 0.0 && H < 1.0)) throw domain_error("normalization_constant: H must be in (0,1)");
  if (!(beta >= 0.0)) throw domain_error("normalization_constant: beta must be >= 0");
  const double g2 = 2.0 - 2.0 * H;
  // int_{-pi}^{pi} |x|^{1-2H} log^{2 beta}(e pi/|x|) dx
  //   = 2 (pi^{g2}/g2) int_0^1 (1 - log u / g2)^{2 beta} du  after x = pi u^{1/g2}
  auto f = [&](double u) { return std::pow(1.0 - std::log(u) / g2, 2.0 * beta); };
  double prev = unit_interval_log_substituted(f, 48, quad.gauss_points);
  double cur = unit_interval_log_substituted(f, 96, quad.gauss_points);
  int doublings = 1;
  while (std::abs(cur - prev) > quad.rel_tol * std::abs(cur)) {
    if (++doublings > 4)
      throw numeric_error("normalization_constant: quadrature did not stabilize",
                          std::abs(cur - prev) / std::abs(cur));
    prev = cur;
    cur = unit_interval_log_substituted(f, 96 << doublings, quad.gauss_points);
  }
  const double integral = 2.0 * (std::pow(kPi, g2) / g2) * cur;
  return 2.0 * kPi / integral;
}

SpectralDensity::SpectralDensity(double H, double beta, QuadratureConfig quad)
    : H_(H), beta_(beta), C_(normalization_constant(H, beta, quad)), quad_(quad) {}

double SpectralDensity::q(double x) const {
  if (x == 0.0) throw domain_error("q: singular at x = 0, split integrals around 0");
  const double ax = std::abs(x);
  return C_ * std::pow(ax, 1.0 - 2.0 * H_) * std::pow(std::log(M_E * kPi / ax), 2.0 * beta_);
}

namespace {

// int_0^a x^{1-2H} log^{2 beta}(e pi / x) cos(kx) dx; substitution
// x = a u^{1/g2} removes the power singularity, u = e^{-t} the log one.
double singular_head(const SpectralDensity& sd, double a, double k, int gauss_points) {
  const double g2 = 2.0 - 2.0 * sd.H();
  const double lead = std::pow(a, g2) / g2;
  auto f = [&](double u) {
    const double x = a * std::pow(u, 1.0 / g2);
    const double lg = std::log(M_E * kPi / x);
    return std::pow(lg, 2.0 * sd.beta()) * std::cos(k * x);
  };
  return sd.C() * lead * unit_interval_log_substituted(f, 96, gauss_points);
}

}  // namespace

double rho_from_q(const SpectralDensity& sd, long long k) {
  const long long ka = std::llabs(k);
  const int gp = sd.quad().gauss_points;
  const double a = kPi / std::max<long long>(ka, 1);
  auto integrand = [&](double x) { return sd.q(x) * std::cos(ka * x); };

  auto evaluate = [&](int gauss_points) {
    double total = singular_head(sd, a, static_cast<double>(ka), gauss_points);
    for (long long j = 1; j < std::max<long long>(ka, 1); ++j)
      total += gauss_panel(integrand, j * a, (j + 1) * a, gauss_points);
    return total / kPi;
  };

  const double v1 = evaluate(gp);
  const double v2 = evaluate(gp + 8);
  const double scale = std::max(std::abs(v2), 1e-6);
  if (std::abs(v2 - v1) > sd.quad().rel_tol * scale)
    throw numeric_error("rho_from_q: quadrature did not stabilize at k = " + std::to_string(ka),
                        std::abs(v2 - v1) / scale);
  return v2;
}

namespace {

// spherical Bessel j_0..j_mmax at x >= 0; Miller downward recurrence below the
// turning point, upward above it
void spherical_jn_all(int mmax, double x, double* out) {
  if (x < 1e-8) {
    out[0] = 1.0 - x * x / 6.0;
    double fact = 1.0;
    for (int m = 1; m <= mmax; ++m) {
      fact *= x / (2.0 * m + 1.0);
      out[m] = fact;
    }
    return;
  }
  const double j0 = std::sin(x) / x;
  if (mmax == 0) {
    out[0] = j0;
    return;
  }
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  if (x > mmax + 12.0) {
    out[0] = j0;
    out[1] = j1;
    for (int m = 1; m < mmax; ++m)
      out[m + 1] = (2.0 * m + 1.0) / x * out[m] - out[m - 1];
    return;
  }
  const int start = mmax + 14 + static_cast<int>(x);
  double jp = 0.0, jc = 1e-280;
  double ref0 = 0.0, ref1 = 0.0;
  for (int m = start; m >= 0; --m) {
    const double jm = (2.0 * m + 3.0) / x * jc - jp;
    jp = jc;
    jc = jm;
    if (m <= mmax) out[m] = jm;
    if (m == 1) ref1 = jm;
    if (m == 0) ref0 = jm;
    if (std::abs(jc) > 1e260) {
      jc *= 1e-280;
      jp *= 1e-280;
      ref1 *= 1e-280;
      for (int mm = m; mm <= mmax; ++mm) out[mm] *= 1e-280;
    }
  }
  // normalize against whichever of j0, j1 is away from a zero of sin/cos
  const double norm = std::abs(ref0) >= std::abs(ref1) ? j0 / ref0 : j1 / ref1;
  for (int m = 0; m <= mmax; ++m) out[m] *= norm;
}

}  // namespace

std::vector<double> rho_from_q_batch(const SpectralDensity& sd, std::size_t k_max) {
  const int deg = sd.quad().filon_degree;
  const int levels = sd.quad().dyadic_levels;
  const GaussRule& g = gauss_rule(deg);

  std::vector<double> out(k_max + 1, 0.0);

  // closure [0, pi 2^-levels]: cos(kx) = 1 to below double precision here
  const double a0 = kPi * std::pow(2.0, -levels);
  const double head = singular_head(sd, a0, 0.0, sd.quad().gauss_points);
  for (auto& v : out) v = head;

  // Legendre values at the Gauss nodes, P_m(u_i)
  std::vector<std::vector<double>> P(deg, std::vector<double>(deg));
  for (int i = 0; i < deg; ++i) {
    P[0][i] = 1.0;
    if (deg > 1) P[1][i] = g.x[i];
    for (int m = 2; m < deg; ++m)
      P[m][i] = ((2.0 * m - 1.0) * g.x[i] * P[m - 1][i] - (m - 1.0) * P[m - 2][i]) / m;
  }

  std::vector<double> coeff(deg), jm(deg);
  for (int level = 0; level < levels; ++level) {
    const double b = kPi * std::pow(2.0, -level);
    const double a = 0.5 * b;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int m = 0; m < deg; ++m) {
      double s = 0.0;
      for (int i = 0; i < deg; ++i) s += g.w[i] * sd.q(c + h * g.x[i]) * P[m][i];
      coeff[m] = (2.0 * m + 1.0) / 2.0 * s;
    }
    for (std::size_t k = 0; k <= k_max; ++k) {
      const double kappa = k * h;
      spherical_jn_all(deg - 1, kappa, jm.data());
      const double ckc = std::cos(k * c), skc = std::sin(k * c);
      // Re(i^m e^{ikc}) cycles cos, -sin, -cos, sin
      double s = 0.0;
      for (int m = 0; m < deg; ++m) {
        double re;
        switch (m & 3) {
          case 0: re = ckc; break;
          case 1: re = -skc; break;
          case 2: re = -ckc; break;
          default: re = skc; break;
        }
        s += coeff[m] * 2.0 * jm[m] * re;
      }
      out[k] += h * s;
    }
  }
  for (auto& v : out) v /= kPi;

  if (std::abs(out[0] - 1.0) > 1e-8)
    throw numeric_error("rho_from_q_batch: rho(0) deviates from 1", std::abs(out[0] - 1.0));
  return out;
}

namespace {

// int_0^{pi} x^{1-2H} w(x) cos(kx) dx with w smooth positive; substitution head
double power_head(double H, const std::function<double(double)>& wmod, double k,
                  int gauss_points) {
  const double g2 = 2.0 - 2.0 * H;
  auto f = [&](double u) {
    const double x = kPi * std::pow(u, 1.0 / g2);
    return wmod(x) * std::cos(k * x);
  };
  return (std::pow(kPi, g2) / g2) * unit_interval_log_substituted(f, 96, gauss_points);
}

}  // namespace

AsymptoticConstants asymptotic_constants(double H) {
  if (!(H > 0.5 && H < 1.0))
    throw domain_error("asymptotic_constants: oscillatory integral needs H in (1/2,1)");
  AsymptoticConstants c;
  c.H = H;
  const double closed = 2.0 * std::tgamma(2.0 - 2.0 * H) * std::cos(kPi * (1.0 - H));
  c.K_H = closed;
  c.K_H_prime = closed * closed / ((4.0 * H - 2.0) * (4.0 * H - 3.0));

  // half-period terms of int_0^inf x^{1-2H} cos x dx; the alternating tail is
  // summed by iterated averaging of partial sums (Euler transform)
  auto id = [](double) { return 1.0; };
  const double A0 = power_head(H, id, 1.0, 16);
  auto term = [&](int m) {
    auto f = [&](double x) { return std::pow(x, 1.0 - 2.0 * H) * std::cos(x); };
    return gauss_panel(f, m * kPi, (m + 1) * kPi, 16);
  };
  double total = 0.0;
  double err = 0.0;
  for (int m_count = 48; m_count <= 4096; m_count *= 2) {
    std::vector<double> s(m_count);
    double run = 0.0;
    for (int m = 1; m <= m_count; ++m) {
      run += term(m);
      s[m - 1] = run;
    }
    double prev_stage = s.back();
    while (s.size() > 1) {
      for (std::size_t i = 0; i + 1 < s.size(); ++i) s[i] = 0.5 * (s[i] + s[i + 1]);
      s.pop_back();
      prev_stage = s.size() > 1 ? s.front() : prev_stage;
    }
    const double est = A0 + s.front();
    err = std::abs(A0 + prev_stage - est);
    total = est;
    if (err < 1e-12 * std::max(1.0, std::abs(est))) break;
  }
  if (err >= 1e-10 * std::max(1.0, std::abs(total)))
    throw numeric_error("asymptotic_constants: oscillatory tail did not converge", err);
  c.numeric_K_H = total / kPi;
  c.closed_over_numeric = c.K_H / c.numeric_K_H;
  return c;
}

double k_eff_modulated(double H, double beta, long long k, int gauss_points) {
  if (k < 2) throw domain_error("k_eff_modulated: k must be >= 2");
  if (!(H > 0.5 && H < 1.0)) throw domain_error("k_eff_modulated: H must be in (1/2,1)");
  const double lk = std::log(static_cast<double>(k));
  auto mod = [&](double x) { return std::pow(1.0 + std::log(M_E * kPi / x) / lk, 2.0 * beta); };
  double total = power_head(H, mod, 1.0, gauss_points);
  auto f = [&](double x) { return std::pow(x, 1.0 - 2.0 * H) * mod(x) * std::cos(x); };
  for (long long m = 1; m < k; ++m) total += gauss_panel(f, m * kPi, (m + 1) * kPi, gauss_points);
  return total / kPi;
}

double rho_asymptotic(const AsymptoticConstants& consts, const SpectralDensity& sd, long long k) {
  if (k < 2) throw domain_error("rho_asymptotic: k must be >= 2");
  const double kk = static_cast<double>(k);
  return sd.C() * consts.numeric_K_H * std::pow(std::log(kk), 2.0 * sd.beta()) *
         std::pow(kk, 2.0 * sd.H() - 2.0);
}

double nvn_asymptotic(const AsymptoticConstants& consts, const SpectralDensity& sd, long long n) {
  if (!(sd.H() > 0.75)) throw domain_error("nvn_asymptotic: requires H > 3/4 (4H-3 > 0)");
  if (n < 2) throw domain_error("nvn_asymptotic: n must be >= 2");
  const double nn = static_cast<double>(n);
  return sd.C() * sd.C() * consts.K_H_prime * std::pow(nn, 4.0 * sd.H() - 2.0) *
         std::pow(std::log(nn), 4.0 * sd.beta());
}

}  // namespace qv::spectral
