#include "qv/tvbound.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "qv/common.hpp"

namespace qv::tvbound {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kBig = 1e19;  // integrand tails here are O(x^{2 gamma - 2}), far below eps

using Fn = std::function<double(double)>;

struct PanelScheme {
  int gauss_points;
  int per_decade;
};

// geometric panels on [a,b] with extra break points; a == 0 starts with a
// graded ramp from b * 1e-12
void build_panels(double a, double b, std::vector<double>& breaks,
                  std::vector<std::pair<double, double>>& out, int per_decade) {
  if (b <= a) return;
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double lo = breaks[i], hi = breaks[i + 1];
    if (hi <= a || lo >= b) continue;
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    if (hi <= lo) continue;
    if (lo <= hi * 1e-12) {
      // graded start toward 0
      double edge = hi * 1e-12;
      out.emplace_back(lo, edge);
      while (edge < hi) {
        const double next = std::min(hi, edge * std::pow(10.0, 1.0 / per_decade));
        out.emplace_back(edge, next);
        edge = next;
      }
    } else {
      const int panels = std::max(
          1, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)));
      double edge = lo;
      const double r = std::pow(hi / lo, 1.0 / panels);
      for (int p = 0; p < panels; ++p) {
        const double next = p + 1 == panels ? hi : edge * r;
        out.emplace_back(edge, next);
        edge = next;
      }
    }
  }
}

double integrate_panels(const Fn& f, const std::vector<std::pair<double, double>>& panels,
                        int gauss_points) {
  const GaussRule& g = gauss_rule(gauss_points);
  double total = 0.0;
  for (const auto& [a, b] : panels) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
    total += h * s;
  }
  return total;
}

// int_{y0}^{y1} b(y) h^2(x -+ y) dy with kink splits at |x -+ y| = 1 and
// geometric grading of the distance to the ridge y = x
double inner_integral(const Fn& bfun, double x, double y0, double y1, int sign,
                      const PanelScheme& ps) {
  std::vector<double> breaks;
  Fn f;
  if (sign > 0) {
    breaks.push_back(1.0 - x);  // kink of h^2(x+y)
    f = [&bfun, x](double y) {
      const double u = x + y;
      return bfun(y) * (u < 1.0 ? 1.0 : 1.0 / (u * u));
    };
  } else {
    breaks.push_back(x - 1.0);
    breaks.push_back(x);
    breaks.push_back(x + 1.0);
    for (double d = 4.0; d < y1 - y0; d *= 4.0) {
      breaks.push_back(x - d);
      breaks.push_back(x + d);
    }
    f = [&bfun, x](double y) {
      const double u = std::abs(x - y);
      return bfun(y) * (u < 1.0 ? 1.0 : 1.0 / (u * u));
    };
  }
  std::vector<double> kept;
  for (double v : breaks)
    if (v > y0 && v < y1) kept.push_back(v);
  std::vector<std::pair<double, double>> panels;
  build_panels(y0, y1, kept, panels, ps.per_decade);
  return integrate_panels(f, panels, ps.gauss_points);
}

// int_{x0}^{x1} a(x) [ int_{y0}^{y1} b(y) h^2(x -+ y) dy ] dx
double iterated(const Fn& afun, const Fn& bfun, double x0, double x1, double y0, double y1,
                int sign, const PanelScheme& ps) {
  std::vector<double> breaks = {1.0, 2.0, y0 - 1.0, y0, y0 + 1.0, y1 - 1.0};
  std::vector<double> kept;
  for (double v : breaks)
    if (v > x0 && v < x1) kept.push_back(v);
  std::vector<std::pair<double, double>> panels;
  build_panels(x0, x1, kept, panels, ps.per_decade);
  const Fn f = [&](double x) { return afun(x) * inner_integral(bfun, x, y0, y1, sign, ps); };
  return integrate_panels(f, panels, ps.gauss_points);
}

// both h^2(x+y) and h^2(x-y) kernels: the quarter-plane reduction of
// iint F(|x|,|y|) h^2(x+y) over a sign-symmetric region is
// 2 iint_{quarter} F [h^2(x+y) + h^2(x-y)]
double iterated_both(const Fn& afun, const Fn& bfun, double x0, double x1, double y0, double y1,
                     const PanelScheme& ps) {
  return iterated(afun, bfun, x0, x1, y0, y1, +1, ps) +
         iterated(afun, bfun, x0, x1, y0, y1, -1, ps);
}

}  // namespace

TVBoundEvaluator::TVBoundEvaluator(const TVBoundConfig& cfg, std::size_t n_max)
    : cfg_(cfg), sd_(cfg.H, cfg.beta) {
  if (!(cfg.H > 0.75 && cfg.H < 1.0)) throw domain_error("tvbound: H must be in (3/4,1)");
  if (!(cfg.beta >= 0.0)) throw domain_error("tvbound: beta must be >= 0");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw domain_error("tvbound: alpha must be in (0,1)");
  const double gamma = 2.0 - 2.0 * cfg.H;
  if (!(1.0 - 2.0 * gamma > 0.0)) throw domain_error("tvbound: need 1 - 2 gamma > 0");

  rho_ = spectral::rho_from_q_batch(sd_, n_max);
  p1_.assign(n_max + 1, 0.0);
  p2_.assign(n_max + 1, 0.0);
  for (std::size_t k = 1; k <= n_max; ++k) {
    const double r2 = rho_[k] * rho_[k];
    p1_[k] = p1_[k - 1] + r2;
    p2_[k] = p2_[k - 1] + static_cast<double>(k) * r2;
  }

  const auto consts = spectral::asymptotic_constants(cfg.H);
  k_prime_eff_ =
      2.0 * consts.numeric_K_H * consts.numeric_K_H / ((4.0 * cfg.H - 2.0) * (4.0 * cfg.H - 3.0));

  const PanelScheme ps{cfg_.gauss_points, cfg_.panels_per_decade};
  const double gm1 = gamma - 1.0;
  const double kp = k_prime_eff_;
  const Fn r2fun = [gm1, kp](double x) { return std::pow(x, gm1) / std::sqrt(kp); };
  full_plane_ = 2.0 * iterated_both(r2fun, r2fun, 0.0, kBig, 0.0, kBig, ps);
}

double TVBoundEvaluator::nvn_paper(std::size_t n) const {
  if (n < 1 || n > p1_.size() - 1) throw domain_error("tvbound: n beyond precomputed range");
  // n + 2 sum_{k=1}^{n-1} (n - k) rho^2(k)
  return static_cast<double>(n) + 2.0 * (static_cast<double>(n) * p1_[n - 1] - p2_[n - 1]);
}

TVTerms TVBoundEvaluator::cor2chaos_terms(std::size_t n) const {
  if (n < 8) throw domain_error("cor2chaos_terms: n must be >= 8");
  const PanelScheme ps{cfg_.gauss_points, cfg_.panels_per_decade};
  const double gamma = 2.0 - 2.0 * cfg_.H;
  const double gm1 = gamma - 1.0;
  const double kp = k_prime_eff_;
  const Fn r2fun = [gm1, kp](double x) { return std::pow(x, gm1) / std::sqrt(kp); };

  TVTerms t;
  t.n = n;

  // T1: complement of the box (+-T)^2, T = pi n^alpha, via the two tail strips
  const double T = kPi * std::pow(static_cast<double>(n), cfg_.alpha);
  const double tail = iterated_both(r2fun, r2fun, T, kBig, 0.0, kBig, ps) +
                      iterated_both(r2fun, r2fun, 0.0, T, T, kBig, ps);
  t.T1 = 5.0 * 2.0 * tail;

  // T2: |f_n - f|^2 on (I_n)^2; separable expansion p^2 - 2 p r + r^2 per axis
  const double nv = nvn_paper(n);
  const double nn = static_cast<double>(n);
  const Fn p2fun = [this, nn, nv](double x) { return sd_.q(x / nn) / std::sqrt(nv); };
  const Fn prfun = [&p2fun, &r2fun](double x) { return std::sqrt(p2fun(x) * r2fun(x)); };
  const double Y = kPi * nn;
  const double jpp = iterated_both(p2fun, p2fun, 0.0, Y, 0.0, Y, ps);
  const double jpr = iterated_both(prfun, prfun, 0.0, Y, 0.0, Y, ps);
  const double jrr = iterated_both(r2fun, r2fun, 0.0, Y, 0.0, Y, ps);
  t.T2 = 16.0 * 2.0 * (jpp - 2.0 * jpr + jrr);

  // T3: full-plane integral, computed once
  t.T3 = 4.0 / std::pow(nn, 2.0 - 2.0 * cfg_.alpha) * full_plane_;

  t.bound = cfg_.c_Finf * std::pow(t.T1 + t.T2 + t.T3, 0.25);
  return t;
}

double TVBoundEvaluator::tnns_bound(std::size_t n) const { return cor2chaos_terms(n).bound; }

DecayFit decay_fit(const std::vector<std::size_t>& n, const std::vector<double>& value,
                   DecayModel model) {
  if (n.size() != value.size()) throw domain_error("decay_fit: size mismatch");
  if (n.size() < 6) throw domain_error("decay_fit: need >= 6 points");
  std::vector<double> x(n.size()), y(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(value[i] > 0.0)) throw domain_error("decay_fit: values must be positive");
    const double nn = static_cast<double>(n[i]);
    switch (model) {
      case DecayModel::Power: x[i] = std::log(nn); break;
      case DecayModel::LogPower: x[i] = std::log(std::log(nn)); break;
      case DecayModel::LogLogPower:
        if (n[i] < 16) throw domain_error("decay_fit: log log model needs n >= 16");
        x[i] = std::log(std::log(std::log(nn)));
        break;
    }
    y[i] = std::log(value[i]);
  }
  const std::vector<std::vector<double>> basis = {std::vector<double>(n.size(), 1.0), x};
  const FitResult fr = lstsq(basis, y);
  DecayFit out;
  out.model = model;
  out.C = std::exp(fr.coeff[0]);
  out.exponent = fr.coeff[1];
  out.resid_rms = fr.resid_rms;
  return out;
}

std::string csv_header() { return "n,T1,T2,T3,bound,bound_sqrtlog"; }

std::string csv_row(const TVTerms& t) {
  std::ostringstream ss;
  ss << t.n << ',' << fmt_double(t.T1) << ',' << fmt_double(t.T2) << ',' << fmt_double(t.T3) << ','
     << fmt_double(t.bound) << ','
     << fmt_double(t.bound * std::sqrt(std::log(static_cast<double>(t.n))));
  return ss.str();
}

}  // namespace qv::tvbound
