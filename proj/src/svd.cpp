#include "ontoq/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ontoq/errors.hpp"

namespace ontoq {

void DenseOperator::apply(const double* x, double* y) const {
  for (std::size_t i = 0; i < m_.rows; ++i) {
    double s = 0.0;
    const double* row = &m_.data[i * m_.cols];
    for (std::size_t j = 0; j < m_.cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

void DenseOperator::apply_transpose(const double* x, double* y) const {
  std::fill(y, y + m_.cols, 0.0);
  for (std::size_t i = 0; i < m_.rows; ++i) {
    const double* row = &m_.data[i * m_.cols];
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < m_.cols; ++j) y[j] += row[j] * xi;
  }
}

namespace {

using Vec = std::vector<double>;

class Transposed final : public LinearOperator {
 public:
  explicit Transposed(const LinearOperator& a) : a_(a) {}
  std::size_t rows() const override { return a_.cols(); }
  std::size_t cols() const override { return a_.rows(); }
  void apply(const double* x, double* y) const override { a_.apply_transpose(x, y); }
  void apply_transpose(const double* x, double* y) const override { a_.apply(x, y); }

 private:
  const LinearOperator& a_;
};

// splitmix64; platform independent, unlike the <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  double next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }

 private:
  std::uint64_t state_;
};

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// Classical Gram-Schmidt applied twice.
void orthogonalize(Vec& x, const std::vector<Vec>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) {
      const double c = dot(x, b);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * b[i];
    }
  }
}

// Random unit vector orthogonal to `basis`; basis.size() < dim is required.
Vec random_orthogonal(std::size_t dim, const std::vector<Vec>& basis, Rng& rng) {
  for (;;) {
    Vec x(dim);
    for (auto& v : x) v = rng.next();
    orthogonalize(x, basis);
    const double n = norm(x);
    if (n > 1e-8) {
      for (auto& v : x) v /= n;
      return x;
    }
  }
}

struct SmallSvd {
  std::vector<double> sigma;
  DenseMatrix u;
  DenseMatrix v;
};

// One-sided Jacobi on a dense square matrix: rotates column pairs until all
// columns are mutually orthogonal, accumulating the rotations in V.
SmallSvd jacobi_svd(DenseMatrix m) {
  const std::size_t n = m.cols;
  DenseMatrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0, beta = 0, gamma = 0;
        for (std::size_t i = 0; i < m.rows; ++i) {
          alpha += m(i, p) * m(i, p);
          beta += m(i, q) * m(i, q);
          gamma += m(i, p) * m(i, q);
        }
        if (alpha == 0.0 || beta == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m.rows; ++i) {
          const double mp = m(i, p), mq = m(i, q);
          m(i, p) = c * mp - s * mq;
          m(i, q) = s * mp + c * mq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sig(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < m.rows; ++i) s += m(i, j) * m(i, j);
    sig[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sig[a] > sig[b]; });

  SmallSvd out;
  out.sigma.resize(n);
  out.u = DenseMatrix(m.rows, n);
  out.v = DenseMatrix(n, n);
  const double smax = n > 0 ? sig[order[0]] : 0.0;
  std::vector<Vec> done;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = sig[j];
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, j);
    Vec col(m.rows, 0.0);
    if (sig[j] > 0.0) {
      for (std::size_t i = 0; i < m.rows; ++i) col[i] = m(i, j) / sig[j];
    }
    // Columns with negligible sigma carry no direction of their own.
    if (sig[j] <= 1e-10 * smax) {
      orthogonalize(col, done);
      double nn = norm(col);
      for (std::size_t e = 0; nn < 0.5 && e < m.rows; ++e) {
        col.assign(m.rows, 0.0);
        col[e] = 1.0;
        orthogonalize(col, done);
        nn = norm(col);
      }
      for (auto& x : col) x /= nn;
    }
    for (std::size_t i = 0; i < m.rows; ++i) out.u(i, k) = col[i];
    done.push_back(std::move(col));
  }
  return out;
}

class Bidiagonalizer {
 public:
  Bidiagonalizer(const LinearOperator& a, std::uint64_t seed) : a_(a), rng_(seed) {
    q_.push_back(random_orthogonal(a.cols(), {}, rng_));
  }

  std::size_t steps() const { return alpha_.size(); }

  void step() {
    const std::size_t j = alpha_.size();
    const std::size_t m = a_.rows(), n = a_.cols();

    Vec w(m);
    a_.apply(q_[j].data(), w.data());
    if (j > 0) {
      for (std::size_t i = 0; i < m; ++i) w[i] -= beta_[j - 1] * p_[j - 1][i];
    }
    orthogonalize(w, p_);
    double a = norm(w);
    anorm_ = std::max(anorm_, a);
    if (a <= 1e-12 * anorm_) {
      w = random_orthogonal(m, p_, rng_);
      a = 0.0;
    } else {
      for (auto& x : w) x /= a;
    }
    p_.push_back(std::move(w));
    alpha_.push_back(a);

    if (q_.size() == n) {
      beta_.push_back(0.0);
      return;
    }
    Vec z(n);
    a_.apply_transpose(p_[j].data(), z.data());
    for (std::size_t i = 0; i < n; ++i) z[i] -= alpha_[j] * q_[j][i];
    orthogonalize(z, q_);
    double b = norm(z);
    anorm_ = std::max(anorm_, b);
    if (b <= 1e-12 * anorm_) {
      z = random_orthogonal(n, q_, rng_);
      b = 0.0;
    } else {
      for (auto& x : z) x /= b;
    }
    q_.push_back(std::move(z));
    beta_.push_back(b);
  }

  DenseMatrix bidiagonal() const {
    const std::size_t s = steps();
    DenseMatrix b(s, s);
    for (std::size_t i = 0; i < s; ++i) {
      b(i, i) = alpha_[i];
      if (i + 1 < s) b(i, i + 1) = beta_[i];
    }
    return b;
  }

  double trailing_beta() const { return beta_.empty() ? 0.0 : beta_.back(); }
  const std::vector<Vec>& left() const { return p_; }
  const std::vector<Vec>& right() const { return q_; }

 private:
  const LinearOperator& a_;
  Rng rng_;
  std::vector<Vec> p_;
  std::vector<Vec> q_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  double anorm_ = 0.0;
};

SvdResult tall_svd(const LinearOperator& a, std::size_t k, const SvdOptions& opt) {
  const std::size_t full = a.cols();
  const std::size_t cap = std::min(full, std::max(k, opt.max_iter * k));
  std::size_t target = std::min(cap, std::max<std::size_t>(2 * k + 10, 20));

  Bidiagonalizer lanczos(a, opt.seed);
  std::vector<double> previous;
  SmallSvd small;
  for (;;) {
    while (lanczos.steps() < target) lanczos.step();
    small = jacobi_svd(lanczos.bidiagonal());
    const std::size_t s = lanczos.steps();
    bool converged = s == full;
    if (!converged && !previous.empty()) {
      const double scale = small.sigma[0];
      double change = 0.0, residual = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        change = std::max(change, std::abs(small.sigma[i] - previous[i]));
        residual = std::max(residual, std::abs(lanczos.trailing_beta() * small.u(s - 1, i)));
      }
      converged = change <= opt.tol * scale && residual <= std::sqrt(opt.tol) * scale;
    }
    if (converged) break;
    if (s >= cap) {
      throw NoConvergence("truncated SVD did not converge within " + std::to_string(s) + " Lanczos steps");
    }
    previous.assign(small.sigma.begin(), small.sigma.begin() + static_cast<std::ptrdiff_t>(k));
    target = std::min(cap, s + std::max<std::size_t>(k, 10));
  }

  const std::size_t s = lanczos.steps();
  SvdResult out;
  out.lanczos_steps = s;
  out.sigma.assign(small.sigma.begin(), small.sigma.begin() + static_cast<std::ptrdiff_t>(k));
  out.u = DenseMatrix(a.rows(), k);
  out.v = DenseMatrix(a.cols(), k);
  const auto& p = lanczos.left();
  const auto& q = lanczos.right();
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < s; ++j) {
      const double uc = small.u(j, c), vc = small.v(j, c);
      for (std::size_t i = 0; i < a.rows(); ++i) out.u(i, c) += p[j][i] * uc;
      for (std::size_t i = 0; i < a.cols(); ++i) out.v(i, c) += q[j][i] * vc;
    }
  }
  return out;
}

}  // namespace

SvdResult truncated_svd(const LinearOperator& a, std::size_t k, const SvdOptions& options) {
  const std::size_t min_dim = std::min(a.rows(), a.cols());
  if (k == 0 || k > min_dim) {
    throw InvalidConfig("SVD rank " + std::to_string(k) + " outside [1, " + std::to_string(min_dim) + "]");
  }
  if (!(options.tol > 0.0)) throw InvalidConfig("SVD tolerance must be positive");

  SvdResult out;
  if (a.rows() >= a.cols()) {
    out = tall_svd(a, k, options);
  } else {
    Transposed t(a);
    out = tall_svd(t, k, options);
    std::swap(out.u, out.v);
  }

  for (std::size_t c = 0; c < k; ++c) {
    double first = 0.0;
    for (std::size_t i = 0; i < out.u.rows; ++i) {
      if (std::abs(out.u(i, c)) > 1e-12) {
        first = out.u(i, c);
        break;
      }
    }
    if (first < 0.0) {
      for (std::size_t i = 0; i < out.u.rows; ++i) out.u(i, c) = -out.u(i, c);
      for (std::size_t i = 0; i < out.v.rows; ++i) out.v(i, c) = -out.v(i, c);
    }
  }
  return out;
}

}  // namespace ontoq
