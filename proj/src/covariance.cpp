#include "qv/covariance.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qv/spectral.hpp"

namespace qv::covariance {

double fgn_rho(double H, long long k) {
  if (!(H > 0.0 && H < 1.0)) throw domain_error("fgn_rho: H must be in (0,1)");
  const double a = std::llabs(k);
  if (k == 0) return 1.0;
  if (H == 0.5) return 0.0;
  return 0.5 * (std::pow(a + 1.0, 2.0 * H) - 2.0 * std::pow(a, 2.0 * H) +
                std::pow(a - 1.0, 2.0 * H));
}

CovarianceModel CovarianceModel::fgn(double H, std::size_t k_max) {
  if (!(H > 0.0 && H < 1.0)) throw domain_error("fgn: H must be in (0,1)");
  std::vector<double> rho(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) rho[k] = fgn_rho(H, static_cast<long long>(k));
  return CovarianceModel(Kind::FGN, H, 0.0, std::move(rho));
}

CovarianceModel CovarianceModel::log_mod_spectral(double H, double beta, std::size_t k_max) {
  spectral::SpectralDensity sd(H, beta);
  std::vector<double> rho = spectral::rho_from_q_batch(sd, k_max);
  return CovarianceModel(Kind::LogModSpectral, H, beta, std::move(rho));
}

CovarianceModel CovarianceModel::tabulated(std::vector<double> values) {
  if (values.empty()) throw domain_error("tabulated: empty table");
  if (values[0] != 1.0) throw domain_error("tabulated: first value must be 1");
  return CovarianceModel(Kind::Tabulated, 0.0, 0.0, std::move(values));
}

CovarianceModel CovarianceModel::tabulated_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("tabulated: cannot open " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    double v;
    if (ss >> v) values.push_back(v);
  }
  return tabulated(std::move(values));
}

CovarianceModel CovarianceModel::synthesized_log_power(double H, double beta, std::size_t k_max,
                                                       int sign) {
  if (!(H > 0.0 && H <= 1.0)) throw domain_error("synthesized_log_power: H must be in (0,1]");
  std::vector<double> rho(k_max + 1);
  rho[0] = 1.0;
  const double s = sign >= 0 ? 1.0 : -1.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double kk = static_cast<double>(k);
    const double v = std::pow(kk, 2.0 * H - 2.0) * std::pow(std::log(kk + M_E), 2.0 * beta);
    rho[k] = s * std::min(1.0, v);
  }
  return CovarianceModel(Kind::Tabulated, H, beta, std::move(rho));
}

std::string CovarianceModel::id() const {
  std::ostringstream ss;
  switch (kind_) {
    case Kind::FGN:
      ss << "fgn(H=" << H_ << ")";
      break;
    case Kind::LogModSpectral:
      ss << "logmod(H=" << H_ << ",beta=" << beta_ << ")";
      break;
    case Kind::Tabulated:
      ss << "tabulated(len=" << rho_.size() << ")";
      break;
  }
  return ss.str();
}

double CovarianceModel::rho(long long k) const {
  const std::size_t a = static_cast<std::size_t>(std::llabs(k));
  if (a < rho_.size()) return rho_[a];
  if (kind_ == Kind::Tabulated) return 0.0;  // finite-support extension
  throw domain_error("rho: lag " + std::to_string(k) + " beyond cached k_max " +
                     std::to_string(rho_.size() - 1) + " for " + id());
}

ValidationReport validate_assumptions(const CovarianceModel& model, std::size_t k_max) {
  if (k_max < 2) throw domain_error("validate_assumptions: k_max must be >= 2");
  ValidationReport rep;
  rep.rho0_is_one = model.rho(0) == 1.0;

  // sign constancy over nonzero entries of rho(1..k_max)
  int sign = 0;
  rep.constant_sign = true;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double v = model.rho(static_cast<long long>(k));
    if (v == 0.0) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) {
      rep.constant_sign = false;
      rep.first_sign_change = static_cast<long long>(k);
      break;
    }
  }

  // smallest k0 with |rho| non-increasing from k0 on (tolerance for plateaus)
  const double tol = 1e-14;
  long long k0 = 1;
  for (std::size_t k = 1; k + 1 <= k_max; ++k) {
    const double cur = std::abs(model.rho(static_cast<long long>(k)));
    const double nxt = std::abs(model.rho(static_cast<long long>(k + 1)));
    if (nxt > cur + tol) k0 = static_cast<long long>(k + 1);
  }
  rep.eventually_monotone = k0 < static_cast<long long>(k_max);
  rep.k0 = rep.eventually_monotone ? k0 : -1;
  return rep;
}

bool psd_check(const CovarianceModel& model, std::size_t m) {
  if (m > 2048) throw domain_error("psd_check: m > 2048 exceeds dense factorization scale");
  if (m == 0) return true;
  Eigen::MatrixXd R(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = model.rho(static_cast<long long>(i) - static_cast<long long>(j));
      R(i, j) = v;
      R(j, i) = v;
    }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(R);
  if (ldlt.info() != Eigen::Success) return false;
  return ldlt.vectorD().minCoeff() >= -1e-10;
}

}  // namespace qv::covariance
