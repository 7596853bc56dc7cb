#include "qv/rosenblatt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "qv/common.hpp"
#include "qv/rng.hpp"
#include "qv/spectral.hpp"

namespace qv::rosenblatt {

namespace {

// (e^{iu} - 1)/(iu), series below |u| = 1e-3, g(0) = 1
std::complex<double> g_osc(double u) {
  if (std::abs(u) < 1e-3) {
    const double u2 = u * u;
    const double re = 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
    const double im = u / 2.0 - u2 * u / 24.0 + u2 * u2 * u / 720.0;
    return {re, im};
  }
  const std::complex<double> num = std::exp(std::complex<double>(0.0, u)) - 1.0;
  return num / std::complex<double>(0.0, u);
}

struct GridCumulants {
  std::vector<double> lambda;  // unit-variance eigenvalues
  double kappa3 = 0.0;
  double kappa4 = 0.0;
  double raw_variance = 0.0;   // 2 sum lambda^2 before rescaling
};

GridCumulants eigen_grid(double H, std::size_t M, double cutoff, double pref) {
  const double delta = cutoff / static_cast<double>(M);
  const double g2 = 2.0 - 2.0 * H;
  std::vector<double> x(M), w(M);
  for (std::size_t j = 0; j < M; ++j) {
    x[j] = (j + 0.5) * delta;
    // cell mass of the |x|^{1-2H} factor, exact: weights absorb the
    // singular part and the 1/(2pi) white-noise scaling
    const double lo = j * delta, hi = (j + 1) * delta;
    w[j] = std::sqrt((std::pow(hi, g2) - std::pow(lo, g2)) / (g2 * 2.0 * M_PI));
  }

  const std::size_t two_m = 2 * M;
  Eigen::MatrixXd B(two_m, two_m);
  for (std::size_t j = 0; j < M; ++j) {
    for (std::size_t k = 0; k < M; ++k) {
      const double ww = w[j] * w[k] * pref;
      const std::complex<double> gpp = g_osc(x[j] + x[k]);  // G(+x_j, +x_k) / ww
      const std::complex<double> gpm = g_osc(x[j] - x[k]);  // G(+x_j, -x_k) / ww
      const double a = ww * gpp.real(), b = ww * gpp.imag();
      const double c = ww * gpm.real(), d = ww * gpm.imag();
      B(j, k) = a + c;
      B(j, M + k) = d - b;
      B(M + j, k) = -(b + d);
      B(M + j, M + k) = c - a;
    }
  }
  const double scale = B.cwiseAbs().maxCoeff();
  const double asym = (B - B.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1e-300))
    throw std::runtime_error("build_rosenblatt: realified matrix not symmetric (assembly bug)");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.compute(0.5 * (B + B.transpose()), Eigen::EigenvaluesOnly);

  GridCumulants out;
  out.lambda.assign(es.eigenvalues().data(), es.eigenvalues().data() + two_m);
  double s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (double l : out.lambda) {
    s2 += l * l;
    s3 += l * l * l;
    s4 += l * l * l * l;
  }
  out.raw_variance = 2.0 * s2;
  const double rescale = 1.0 / std::sqrt(out.raw_variance);
  for (double& l : out.lambda) l *= rescale;
  out.kappa3 = 8.0 * s3 / std::pow(2.0 * s2, 1.5);
  out.kappa4 = 48.0 * s4 / std::pow(2.0 * s2, 2.0);
  std::sort(out.lambda.begin(), out.lambda.end(),
            [](double p, double q) { return std::abs(p) > std::abs(q); });
  return out;
}

}  // namespace

RosenblattApproximant build_rosenblatt(double H, std::size_t M, double cutoff) {
  if (!(H > 0.75 && H < 1.0)) throw domain_error("build_rosenblatt: H must be in (3/4,1)");
  if (M < 16) throw domain_error("build_rosenblatt: M must be >= 16");
  if (cutoff <= 0.0) cutoff = 4.0 * std::sqrt(static_cast<double>(M));

  const auto consts = spectral::asymptotic_constants(H);
  const double k_prime_eff =
      2.0 * consts.numeric_K_H * consts.numeric_K_H / ((4.0 * H - 2.0) * (4.0 * H - 3.0));
  const double pref = 1.0 / std::sqrt(k_prime_eff);

  const GridCumulants main = eigen_grid(H, M, cutoff, pref);

  // same Delta, cutoff/sqrt(2): tail-extrapolation partner. The |fg|^2 mass
  // beyond the cutoff vanishes like cutoff^{-(4H-3)}.
  const std::size_t M2 = static_cast<std::size_t>(std::lround(M / std::sqrt(2.0)));
  const double cutoff2 = cutoff * static_cast<double>(M2) / static_cast<double>(M);
  const GridCumulants sub = eigen_grid(H, M2, cutoff2, pref);

  const double p = 4.0 * H - 3.0;
  const double theta = std::pow(cutoff / cutoff2, -p);

  RosenblattApproximant out;
  out.H = H;
  out.M = M;
  out.cutoff = cutoff;
  out.delta = cutoff / static_cast<double>(M);
  out.eigenvalues = main.lambda;
  double s2 = 0.0;
  for (double l : main.lambda) s2 += l * l;
  out.variance = 2.0 * s2;
  out.kappa3 = main.kappa3;
  out.kappa4 = main.kappa4;
  out.kappa3_limit = (main.kappa3 - theta * sub.kappa3) / (1.0 - theta);
  out.kappa4_limit = (main.kappa4 - theta * sub.kappa4) / (1.0 - theta);
  out.prefactor_used = pref / std::sqrt(main.raw_variance);
  out.prefactor_paper = 1.0 / std::sqrt(consts.K_H_prime);
  out.k_prime_eff = k_prime_eff;
  return out;
}

std::vector<double> sample_rosenblatt(const RosenblattApproximant& approx, std::size_t samples,
                                      std::uint64_t seed, int workers) {
  if (approx.eigenvalues.empty()) throw domain_error("sample_rosenblatt: approximant not built");
  // eigenvalues are sorted by |.|; drop the numerically irrelevant tail
  const double lead = std::abs(approx.eigenvalues.front());
  std::size_t active = approx.eigenvalues.size();
  while (active > 1 && std::abs(approx.eigenvalues[active - 1]) < 1e-14 * lead) --active;
  const std::vector<double> lam(approx.eigenvalues.begin(), approx.eigenvalues.begin() + active);

  std::vector<double> out(samples);
  parallel_for(samples, workers, [&](std::size_t s) {
    RngStream rng(seed, s);
    double acc = 0.0;
    for (double l : lam) {
      const double z = rng.next_normal();
      acc += l * (z * z - 1.0);
    }
    out[s] = acc;
  });
  return out;
}

}  // namespace qv::rosenblatt
