#include "qv/simulate.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "qv/common.hpp"
#include "qv/cumulants.hpp"
#include "qv/rng.hpp"

namespace qv::simulate {

namespace {

std::mutex fftw_plan_mutex;

// circulant first row of size 2n from rho(0..n)
std::vector<double> embedding_row(const covariance::CovarianceModel& model, std::size_t n) {
  const std::size_t m = 2 * n;
  std::vector<double> c(m);
  for (std::size_t j = 0; j <= n; ++j) c[j] = model.rho(static_cast<long long>(j));
  for (std::size_t j = n + 1; j < m; ++j) c[j] = model.rho(static_cast<long long>(m - j));
  return c;
}

}  // namespace

PathBatch sample_paths(const SamplerConfig& cfg, EmbeddingInfo* info) {
  if (cfg.model == nullptr) throw domain_error("sample_paths: no model");
  if (cfg.paths < 1) throw domain_error("sample_paths: paths must be >= 1");
  const std::size_t n = cfg.n;
  if (n < 1) throw domain_error("sample_paths: n must be >= 1");
  if (cfg.model->k_max() < n)
    throw domain_error("sample_paths: model cache must cover lag n = " + std::to_string(n));
  const std::size_t m = 2 * n;

  // eigenvalues of the circulant embedding
  std::vector<double> c = embedding_row(*cfg.model, n);
  std::vector<std::complex<double>> spec(m / 2 + 1);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), c.data(),
                                          reinterpret_cast<fftw_complex*>(spec.data()),
                                          FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  std::vector<double> lambda(m);
  for (std::size_t k = 0; k <= m / 2; ++k) lambda[k] = spec[k].real();
  for (std::size_t k = m / 2 + 1; k < m; ++k) lambda[k] = lambda[m - k];

  double min_eig = lambda[0], neg_mass = 0.0, abs_mass = 0.0;
  for (double l : lambda) {
    min_eig = std::min(min_eig, l);
    abs_mass += std::abs(l);
    if (l < 0.0) neg_mass += -l;
  }
  if (info != nullptr) {
    info->min_eigenvalue = min_eig;
    info->clipped_mass = neg_mass / abs_mass;
  }
  if (neg_mass / abs_mass > 1e-8)
    throw numeric_error("sample_paths: circulant embedding not nonnegative, most negative "
                        "eigenvalue " + std::to_string(min_eig),
                        neg_mass / abs_mass);
  std::vector<double> sqrt_lambda(m);
  for (std::size_t k = 0; k < m; ++k) sqrt_lambda[k] = std::sqrt(std::max(0.0, lambda[k]));

  PathBatch batch;
  batch.n = n;
  batch.paths = cfg.paths;
  batch.seed = cfg.seed;
  batch.model_id = cfg.model->id();
  batch.data.assign(cfg.paths * n, 0.0);

  // per-path plan reuse through the array-execute interface
  fftw_plan proto;
  std::vector<std::complex<double>> proto_in(m);
  std::vector<std::complex<double>> proto_out(m);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    proto = fftw_plan_dft_1d(static_cast<int>(m),
                             reinterpret_cast<fftw_complex*>(proto_in.data()),
                             reinterpret_cast<fftw_complex*>(proto_out.data()),
                             FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  parallel_for(cfg.paths, cfg.workers, [&](std::size_t p) {
    thread_local std::vector<std::complex<double>> eta, y;
    eta.assign(m, {0.0, 0.0});
    y.assign(m, {0.0, 0.0});
    RngStream rng(cfg.seed, p);
    // Hermitian-symmetric complex noise: m real normals per path, fixed order
    eta[0] = {rng.next_normal() * sqrt_lambda[0], 0.0};
    for (std::size_t k = 1; k < m / 2; ++k) {
      const double a = rng.next_normal() * inv_sqrt2;
      const double b = rng.next_normal() * inv_sqrt2;
      eta[k] = {a * sqrt_lambda[k], b * sqrt_lambda[k]};
      eta[m - k] = std::conj(eta[k]);
    }
    eta[m / 2] = {rng.next_normal() * sqrt_lambda[m / 2], 0.0};
    fftw_execute_dft(proto, reinterpret_cast<fftw_complex*>(eta.data()),
                     reinterpret_cast<fftw_complex*>(y.data()));
    double* row = batch.data.data() + p * n;
    for (std::size_t k = 0; k < n; ++k) row[k] = y[k].real() * inv_sqrt_m;
  });

  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_destroy_plan(proto);
  }
  return batch;
}

void PathBatch::save(const std::string& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw domain_error("PathBatch::save: cannot open " + file);
  out << "QVPATHS v1 model=" << model_id << " n=" << n << " paths=" << paths << " seed=" << seed
      << "\n";
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
}

PathBatch PathBatch::load(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw domain_error("PathBatch::load: cannot open " + file);
  std::string header;
  std::getline(in, header);
  PathBatch b;
  std::istringstream hs(header);
  std::string tok;
  hs >> tok;  // QVPATHS
  hs >> tok;  // v1
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "model") b.model_id = val;
    else if (key == "n") b.n = std::stoull(val);
    else if (key == "paths") b.paths = std::stoull(val);
    else if (key == "seed") b.seed = std::stoull(val);
  }
  b.data.resize(b.n * b.paths);
  in.read(reinterpret_cast<char*>(b.data.data()),
          static_cast<std::streamsize>(b.data.size() * sizeof(double)));
  if (!in) throw domain_error("PathBatch::load: truncated file " + file);
  return b;
}

EmpiricalStats fn_statistics(const PathBatch& batch, const covariance::CovarianceModel& model) {
  const std::size_t n = batch.n, N = batch.paths;
  if (N < 2) throw domain_error("fn_statistics: need >= 2 paths");
  EmpiricalStats st;
  st.n = n;
  st.paths = N;
  st.v_n = cumulants::variance_vn(model, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n) * st.v_n);

  std::vector<double> f(N);
  for (std::size_t p = 0; p < N; ++p) {
    const double* row = batch.path(p);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += row[k] * row[k] - 1.0;
    f[p] = s * scale;
  }

  // raw power sums, then central moments
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (double v : f) {
    s1 += v;
    s2 += v * v;
    s3 += v * v * v;
    s4 += v * v * v * v;
  }
  const double nd = static_cast<double>(N);
  auto stats_from = [&](double t1, double t2, double t3, double t4, double cnt) {
    const double mu = t1 / cnt;
    const double m2 = t2 / cnt - mu * mu;
    const double m3 = t3 / cnt - 3.0 * mu * t2 / cnt + 2.0 * mu * mu * mu;
    const double m4 =
        t4 / cnt - 4.0 * mu * t3 / cnt + 6.0 * mu * mu * t2 / cnt - 3.0 * mu * mu * mu * mu;
    struct {
      double mean, var, k3, k4;
    } r{mu, m2, m3, m4 - 3.0 * m2 * m2};
    return r;
  };
  const auto full = stats_from(s1, s2, s3, s4, nd);
  st.mean = full.mean;
  st.variance = full.var;
  st.kappa3 = full.k3;
  st.kappa4 = full.k4;

  // delete-1 jackknife from downdated power sums
  double jm = 0, jv = 0, j3 = 0, j4 = 0;    // means of leave-one-out stats
  double qm = 0, qv = 0, q3 = 0, q4 = 0;    // their squares
  for (double v : f) {
    const auto loo = stats_from(s1 - v, s2 - v * v, s3 - v * v * v, s4 - v * v * v * v, nd - 1.0);
    jm += loo.mean;
    jv += loo.var;
    j3 += loo.k3;
    j4 += loo.k4;
    qm += loo.mean * loo.mean;
    qv += loo.var * loo.var;
    q3 += loo.k3 * loo.k3;
    q4 += loo.k4 * loo.k4;
  }
  const double fac = (nd - 1.0) / nd;
  st.se_mean = std::sqrt(std::max(0.0, fac * (qm - jm * jm / nd)));
  st.se_variance = std::sqrt(std::max(0.0, fac * (qv - jv * jv / nd)));
  st.se_kappa3 = std::sqrt(std::max(0.0, fac * (q3 - j3 * j3 / nd)));
  st.se_kappa4 = std::sqrt(std::max(0.0, fac * (q4 - j4 * j4 / nd)));

  std::sort(f.begin(), f.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double cdf = normal_cdf(f[i]);
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / nd));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / nd - cdf));
  }
  st.ks_normal = ks;
  return st;
}

}  // namespace qv::simulate
