#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qv/covariance.hpp"

namespace qv::simulate {

struct SamplerConfig {
  const covariance::CovarianceModel* model = nullptr;
  std::size_t n = 0;
  std::size_t paths = 1;
  std::uint64_t seed = 0;
  int workers = 1;
};

// Exact stationary Gaussian paths by circulant embedding of rho(0..n), one
// FFT of size 2n per path, per-path noise stream keyed by (seed, path index).
// Output is bit-identical for any worker count.
class PathBatch {
 public:
  std::size_t n = 0;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  std::string model_id;
  std::vector<double> data;  // row-major paths x n

  const double* path(std::size_t p) const { return data.data() + p * n; }

  // flat binary persistence: one text header line, then LE doubles
  void save(const std::string& path) const;
  static PathBatch load(const std::string& path);
};

struct EmbeddingInfo {
  double min_eigenvalue = 0.0;
  double clipped_mass = 0.0;  // sum of |negative eigenvalues| / sum |eigenvalues|
};

// Throws sampler error (numeric_error naming the most negative eigenvalue) if
// the embedding needs clipping beyond relative mass 1e-8.
PathBatch sample_paths(const SamplerConfig& cfg, EmbeddingInfo* info = nullptr);

struct EmpiricalStats {
  std::size_t n = 0;
  std::size_t paths = 0;
  double v_n = 0.0;
  double mean = 0.0, variance = 0.0, kappa3 = 0.0, kappa4 = 0.0;
  double se_mean = 0.0, se_variance = 0.0, se_kappa3 = 0.0, se_kappa4 = 0.0;  // jackknife
  double ks_normal = 0.0;  // Kolmogorov-Smirnov distance to N(0,1)
};

// Per-path F_n = n^{-1/2} sum (X_k^2 - 1) / sqrt(v_n) with v_n from the
// cumulants module; moments accumulated in fixed path order.
EmpiricalStats fn_statistics(const PathBatch& batch, const covariance::CovarianceModel& model);

}  // namespace qv::simulate
