#pragma once

#include <string>
#include <vector>

#include "qv/common.hpp"
#include "qv/covariance.hpp"

namespace qv::rates {

// sum_{k=2}^{n} k^alpha log^beta k (starts at 2: log 1 = 0 breaks negative beta)
double bertrand_partial(double alpha, double beta, std::size_t n);

// converges iff alpha < -1, or alpha == -1 and beta < -1
bool bertrand_converges(const Param& alpha, const Param& beta);

enum class Regime {
  SubCritical,     // H < 2/3, or H = 2/3 and beta < -1/3      : M_n = n^{-1/2}
  LogLogCritical,  // H = 2/3, beta = -1/3                     : (log log n)^2 / sqrt(n)
  LogCritical,     // H = 2/3, beta > -1/3                     : log^{2(3 beta + 1)}(n) / sqrt(n)
  PowerLog,        // 2/3 < H < 3/4, or H = 3/4, beta < -1/4   : n^{6H - 9/2} log^{6 beta}(n)
  H34LogLog,       // H = 3/4, beta = -1/4                     : log^{-3/2}(n) (log log n)^{-3/2}
  H34Log,          // H = 3/4, beta > -1/4                     : log^{-3/2}(n)
  NonNormal,       // H > 3/4
};

const char* regime_name(Regime r);

struct RateRegime {
  Regime case_id = Regime::SubCritical;
  // closed-form exponents of M_n = n^a log^b(n) (log log n)^c
  double n_exp = 0.0, log_exp = 0.0, loglog_exp = 0.0;
  bool v_n_converges = false;
  std::string m_formula;

  double M(std::size_t n) const;  // needs n >= 16 when loglog_exp != 0
};

// Boundary conventions: H = 2/3 and 3/4 and the beta thresholds -1/3 and -1/4
// compare exactly when the parameters are entered as rationals. All regime
// intervals are half-open exactly as listed next to the enum.
RateRegime classify_rate(const Param& H, const Param& beta);

struct ConvergenceEvidence {
  bool normal = false;          // decreasing-trend verdict (finite-n evidence, not proof)
  double fitted_slope = 0.0;    // log-log slope of r_n
  std::vector<std::size_t> n;
  std::vector<double> r;        // r_n = S32(n)^2 / (v_n^{3/2} sqrt(n))
};

// Third/fourth-moment criterion proxy: true iff r_n trends down with fitted
// log-log slope < -0.02 on the grid.
ConvergenceEvidence normal_convergence_test(const covariance::CovarianceModel& model,
                                            const std::vector<std::size_t>& n_grid);

struct RatioRow {
  std::size_t n = 0;
  double kappa3 = 0.0;
  double M_n = 0.0;
  double ratio = 0.0;
};

struct CommensurabilityTable {
  Regime regime = Regime::SubCritical;
  std::vector<RatioRow> rows;
  double band = 0.0;          // max ratio / min ratio over the grid
  double slope = 0.0;         // log-log slope of the ratio
};

// |kappa3_exact(n)| / M_n over the grid for the synthesized covariance with
// the given (H, beta). Errors out in the NonNormal regime.
CommensurabilityTable commensurability_scan(const covariance::CovarianceModel& model,
                                            const Param& H, const Param& beta,
                                            const std::vector<std::size_t>& n_grid);

std::string csv_header();
std::string csv_row(const RatioRow& row, Regime regime);

}  // namespace qv::rates
