#include "qv/common.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

namespace qv {

Param Param::rational(long long num, long long den) {
  if (den == 0) throw domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Param p;
  p.value = static_cast<double>(num) / static_cast<double>(den);
  p.exact = std::make_pair(num, den);
  return p;
}

Param Param::parse(const std::string& text) {
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    long long num = std::stoll(text.substr(0, slash));
    long long den = std::stoll(text.substr(slash + 1));
    return rational(num, den);
  }
  Param p;
  p.value = std::stod(text);
  return p;
}

int Param::cmp(long long p, long long q) const {
  if (q < 0) {
    p = -p;
    q = -q;
  }
  if (exact) {
    // a/b vs p/q with b,q > 0: compare a*q vs p*b in wide arithmetic
    const auto [a, b] = *exact;
    const __int128 lhs = static_cast<__int128>(a) * q;
    const __int128 rhs = static_cast<__int128>(p) * b;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }
  const double r = static_cast<double>(p) / static_cast<double>(q);
  return value < r ? -1 : (value > r ? 1 : 0);
}

namespace {

GaussRule make_gauss(int n) {
  // Newton iteration on P_n; nodes symmetric
  GaussRule g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, p1 = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    p0 = 1.0;
    p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    g.x[i] = -x;
    g.x[n - 1 - i] = x;
    g.w[i] = g.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

}  // namespace

const GaussRule& gauss_rule(int npoints) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(npoints);
  if (it == cache.end()) it = cache.emplace(npoints, make_gauss(npoints)).first;
  return it->second;
}

double pairwise_sum(const double* a, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(a, half) + pairwise_sum(a + half, n - half);
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int nw = std::min<std::size_t>(workers, n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nw);
  const std::size_t chunk = std::max<std::size_t>(1, n / (8 * nw));
  for (int t = 0; t < nw; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t begin = next.fetch_add(chunk);
        if (begin >= n) return;
        const std::size_t end = std::min(n, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

int default_workers() {
  if (const char* env = std::getenv("QV_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

FitResult lstsq(const std::vector<std::vector<double>>& basis_cols, const std::vector<double>& y) {
  const std::size_t m = basis_cols.size();
  const std::size_t n = y.size();
  for (const auto& col : basis_cols)
    if (col.size() != n) throw domain_error("lstsq: ragged basis");
  // normal equations, m is tiny (<= 4)
  std::vector<std::vector<double>> A(m, std::vector<double>(m, 0.0));
  std::vector<double> b(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += basis_cols[i][k] * basis_cols[j][k];
      A[i][j] = A[j][i] = s;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += basis_cols[i][k] * y[k];
    b[i] = s;
  }
  // Gaussian elimination with partial pivoting
  std::vector<std::size_t> piv(m);
  std::iota(piv.begin(), piv.end(), 0);
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t best = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(A[r][col]) > std::abs(A[best][col])) best = r;
    std::swap(A[col], A[best]);
    std::swap(b[col], b[best]);
    if (A[col][col] == 0.0) throw numeric_error("lstsq: singular normal matrix", 0.0);
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = A[r][col] / A[col][col];
      for (std::size_t c = col; c < m; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  FitResult out;
  out.coeff.assign(m, 0.0);
  for (std::size_t i = m; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < m; ++j) s -= A[i][j] * out.coeff[j];
    out.coeff[i] = s / A[i][i];
  }
  double rss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double fit = 0.0;
    for (std::size_t j = 0; j < m; ++j) fit += out.coeff[j] * basis_cols[j][k];
    rss += (y[k] - fit) * (y[k] - fit);
  }
  out.resid_rms = std::sqrt(rss / n);
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace qv
