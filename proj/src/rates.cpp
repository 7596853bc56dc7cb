#include "qv/rates.hpp"

#include <cmath>
#include <sstream>

#include "qv/cumulants.hpp"

namespace qv::rates {

double bertrand_partial(double alpha, double beta, std::size_t n) {
  if (n < 2) throw domain_error("bertrand_partial: n must be >= 2");
  std::vector<double> terms(n - 1);
  for (std::size_t k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    terms[k - 2] = std::pow(kk, alpha) * std::pow(std::log(kk), beta);
  }
  return pairwise_sum(terms);
}

bool bertrand_converges(const Param& alpha, const Param& beta) {
  if (alpha.lt(-1, 1)) return true;
  if (alpha.eq(-1, 1)) return beta.lt(-1, 1);
  return false;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::SubCritical: return "SubCritical";
    case Regime::LogLogCritical: return "LogLogCritical";
    case Regime::LogCritical: return "LogCritical";
    case Regime::PowerLog: return "PowerLog";
    case Regime::H34LogLog: return "H34LogLog";
    case Regime::H34Log: return "H34Log";
    case Regime::NonNormal: return "NonNormal";
  }
  return "?";
}

double RateRegime::M(std::size_t n) const {
  const double nn = static_cast<double>(n);
  double v = std::pow(nn, n_exp);
  if (log_exp != 0.0) v *= std::pow(std::log(nn), log_exp);
  if (loglog_exp != 0.0) {
    if (n < 16) throw domain_error("RateRegime::M: log log regime needs n >= 16");
    v *= std::pow(std::log(std::log(nn)), loglog_exp);
  }
  return v;
}

RateRegime classify_rate(const Param& H, const Param& beta) {
  if (!(H.value > 0.0) || H.gt(1, 1)) throw domain_error("classify_rate: H must be in (0,1]");
  RateRegime r;
  auto set = [&](Regime c, double a, double b, double g, bool conv, const char* desc) {
    r.case_id = c;
    r.n_exp = a;
    r.log_exp = b;
    r.loglog_exp = g;
    r.v_n_converges = conv;
    r.m_formula = desc;
  };
  if (H.lt(2, 3) || (H.eq(2, 3) && beta.lt(-1, 3))) {
    set(Regime::SubCritical, -0.5, 0.0, 0.0, true, "n^{-1/2}");
  } else if (H.eq(2, 3) && beta.eq(-1, 3)) {
    set(Regime::LogLogCritical, -0.5, 0.0, 2.0, true, "(log log n)^2 n^{-1/2}");
  } else if (H.eq(2, 3)) {  // beta > -1/3
    set(Regime::LogCritical, -0.5, 2.0 * (3.0 * beta.value + 1.0), 0.0, true,
        "log^{2(3b+1)}(n) n^{-1/2}");
  } else if ((H.gt(2, 3) && H.lt(3, 4)) || (H.eq(3, 4) && beta.lt(-1, 4))) {
    set(Regime::PowerLog, 6.0 * H.value - 4.5, 6.0 * beta.value, 0.0, true,
        "n^{6H-9/2} log^{6b}(n)");
  } else if (H.eq(3, 4) && beta.eq(-1, 4)) {
    set(Regime::H34LogLog, 0.0, -1.5, -1.5, false, "log^{-3/2}(n) (log log n)^{-3/2}");
  } else if (H.eq(3, 4)) {  // beta > -1/4
    set(Regime::H34Log, 0.0, -1.5, 0.0, false, "log^{-3/2}(n)");
  } else {  // H > 3/4
    set(Regime::NonNormal, 0.0, 0.0, 0.0, false, "non-normal limit");
  }
  return r;
}

ConvergenceEvidence normal_convergence_test(const covariance::CovarianceModel& model,
                                            const std::vector<std::size_t>& n_grid) {
  if (n_grid.size() < 4) throw domain_error("normal_convergence_test: need >= 4 grid points");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1]) throw domain_error("normal_convergence_test: grid not increasing");
  ConvergenceEvidence ev;
  std::vector<double> lx, ly;
  for (std::size_t n : n_grid) {
    const double s32 = cumulants::abs_power_sum(model, n, 1.5);
    const double vn = cumulants::variance_vn(model, n);
    const double r = s32 * s32 / (std::pow(vn, 1.5) * std::sqrt(static_cast<double>(n)));
    ev.n.push_back(n);
    ev.r.push_back(r);
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(r));
  }
  ev.fitted_slope = fit_slope(lx, ly);
  ev.normal = ev.fitted_slope < -0.02;
  return ev;
}

CommensurabilityTable commensurability_scan(const covariance::CovarianceModel& model,
                                            const Param& H, const Param& beta,
                                            const std::vector<std::size_t>& n_grid) {
  const RateRegime regime = classify_rate(H, beta);
  if (regime.case_id == Regime::NonNormal)
    throw domain_error("commensurability_scan: regime is non-normal, no M_n rate applies");
  CommensurabilityTable table;
  table.regime = regime.case_id;
  std::vector<double> lx, ly;
  for (std::size_t n : n_grid) {
    RatioRow row;
    row.n = n;
    row.kappa3 = cumulants::kappa3_exact(model, n);
    row.M_n = regime.M(n);
    row.ratio = std::abs(row.kappa3) / row.M_n;
    table.rows.push_back(row);
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(row.ratio));
  }
  double lo = table.rows[0].ratio, hi = lo;
  for (const auto& row : table.rows) {
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
  }
  table.band = hi / lo;
  table.slope = fit_slope(lx, ly);
  return table;
}

std::string csv_header() { return "n,kappa3,M_n,ratio,regime_id"; }

std::string csv_row(const RatioRow& row, Regime regime) {
  std::ostringstream ss;
  ss << row.n << ',' << fmt_double(row.kappa3) << ',' << fmt_double(row.M_n) << ','
     << fmt_double(row.ratio) << ',' << regime_name(regime);
  return ss.str();
}

}  // namespace qv::rates
