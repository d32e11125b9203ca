#include "sgstab/matops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sgstab/error.hpp"

namespace sgstab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const Matrix& a, const char* what) {
  if (!a.square() || a.rows() == 0) {
    throw Error(ErrorCode::usage, std::string(what) + ": matrix must be square and non-empty");
  }
}

double sign_of(double magnitude, double sign) {
  return sign >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

}  // namespace

// ---------------------------------------------------------------------------
// LU

LuFactorization::LuFactorization(Matrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
  require_square(lu_, "lu");
  const std::size_t n = lu_.rows();
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double scale = max_norm(lu_);
  const double threshold = tolerance::lu_pivot * (scale > 0.0 ? scale : 1.0);

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu_(i, k)) > std::abs(lu_(piv, k))) piv = i;
    if (!(std::abs(lu_(piv, k)) >= threshold)) {
      throw Error(ErrorCode::singular,
                  "zero pivot at index " + std::to_string(k) + " (|pivot| < " +
                      std::to_string(threshold) + ")",
                  k);
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
      std::swap(perm_[k], perm_[piv]);
    }
    const double inv = 1.0 / lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu_(i, k) * inv;
      lu_(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

Matrix LuFactorization::solve(const Matrix& b) const {
  const std::size_t n = size();
  if (b.rows() != n) throw Error(ErrorCode::usage, "lu_solve: right-hand side has wrong row count");
  Matrix x(n, b.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) x(i, j) = b(perm_[i], j);
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 1; i < n; ++i) {
      double s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= lu_(i, k) * x(k, c);
      x(i, c) = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) s -= lu_(ii, k) * x(k, c);
      x(ii, c) = s / lu_(ii, ii);
    }
  }
  return x;
}

Vector LuFactorization::solve(std::span<const double> b) const {
  Matrix rhs(b.size(), 1);
  std::copy(b.begin(), b.end(), rhs.data().begin());
  Matrix x = solve(rhs);
  return {x.data().begin(), x.data().end()};
}

Matrix lu_solve(const Matrix& a, const Matrix& b) { return LuFactorization(a).solve(b); }

Vector lu_solve(const Matrix& a, std::span<const double> b) { return LuFactorization(a).solve(b); }

// ---------------------------------------------------------------------------
// Cholesky

Matrix cholesky(const Matrix& m) {
  require_square(m, "cholesky");
  const std::size_t n = m.rows();
  const double scale = max_norm(m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m(i, j) - m(j, i)) > tolerance::cholesky_symmetry * scale) {
        throw Error(ErrorCode::usage, "cholesky: matrix is not symmetric");
      }

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) {
      throw Error(ErrorCode::not_positive_definite,
                  "leading minor of order " + std::to_string(j + 1) + " is not positive", j + 1);
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Matrix lower_triangular_inverse(const Matrix& l) {
  require_square(l, "lower_triangular_inverse");
  const std::size_t n = l.rows();
  Matrix inv(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = c; i < n; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (std::size_t k = c; k < i; ++k) s -= l(i, k) * inv(k, c);
      if (l(i, i) == 0.0) throw Error(ErrorCode::singular, "zero diagonal in triangular factor", i);
      inv(i, c) = s / l(i, i);
    }
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Nonsymmetric eigenvalues

namespace {

void reduce_to_hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  if (n < 3) return;
  Vector v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) norm = std::hypot(norm, a(i, k));
    if (norm == 0.0) continue;
    const double alpha = -sign_of(norm, a(k + 1, k));
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
    v[k + 1] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0.0) continue;
    const double beta = 2.0 / vnorm2;

    // A <- H A, H = I - beta v vᵀ
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
      s *= beta;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    // A <- A H
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= beta;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
    }
    a(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix (eigenvalues only).
Spectrum hessenberg_qr(Matrix& a) {
  const int n = static_cast<int>(a.rows());
  Spectrum w(static_cast<std::size_t>(n));
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

  const int sweep_cap = tolerance::qr_sweeps_per_dimension * n;
  int sweeps = 0;
  int nn = n - 1;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, x = 0.0, y = 0.0, z = 0.0, u = 0.0, v = 0.0;
  double ww = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= kEps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        w[nn--] = Complex(x + t, 0.0);
      } else {
        y = a(nn - 1, nn - 1);
        ww = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + ww;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            w[nn - 1] = w[nn] = Complex(x + z, 0.0);
            if (z != 0.0) w[nn] = Complex(x - ww / z, 0.0);
          } else {
            w[nn] = Complex(x + p, -z);
            w[nn - 1] = std::conj(w[nn]);
          }
          nn -= 2;
        } else {
          if (sweeps >= sweep_cap) {
            const auto block = static_cast<std::size_t>(nn - l + 1);
            throw Error(ErrorCode::non_convergence,
                        "QR iteration exceeded " + std::to_string(sweep_cap) +
                            " sweeps with an unreduced block of size " + std::to_string(block),
                        block);
          }
          if (its == 10 || its == 20) {
            // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
          }
          ++its;
          ++sweeps;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= kEps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k + 1 != nn) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k + 1 != nn) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return w;
}

}  // namespace

Spectrum eigenvalues(const Matrix& a) {
  require_square(a, "eigenvalues");
  if (!all_finite(a)) throw Error(ErrorCode::usage, "eigenvalues: non-finite entries");
  Matrix h = a;
  reduce_to_hessenberg(h);
  Spectrum w = hessenberg_qr(h);
  std::sort(w.begin(), w.end(), [](const Complex& lhs, const Complex& rhs) {
    if (lhs.real() != rhs.real()) return lhs.real() > rhs.real();
    return lhs.imag() < rhs.imag();
  });
  return w;
}

double spectral_abscissa(const Matrix& a) { return eigenvalues(a).front().real(); }

bool is_stable(const Matrix& a) { return spectral_abscissa(a) < 0.0; }

Matrix symmetric_part(const Matrix& a) {
  require_square(a, "symmetric_part");
  const std::size_t n = a.rows();
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    s(i, i) = a(i, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Lyapunov

Matrix lyapunov_solve(const Matrix& a, const Matrix& q) {
  require_square(a, "lyapunov_solve");
  if (q.rows() != a.rows() || q.cols() != a.cols()) {
    throw Error(ErrorCode::usage, "lyapunov_solve: Q must match the shape of A");
  }
  const std::size_t n = a.rows();
  const std::size_t nn = n * n;
  // Column-major vectorization: vec(M)[i + j n] = M(i, j).
  Matrix kron(nn, nn);
  Matrix rhs(nn, 1);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t row = i + j * n;
      rhs(row, 0) = -q(i, j);
      for (std::size_t k = 0; k < n; ++k) kron(row, k + j * n) += a(k, i);  // I ⊗ Aᵀ
      for (std::size_t l = 0; l < n; ++l) kron(row, i + l * n) += a(l, j);  // Aᵀ ⊗ I
    }

  Matrix vec;
  try {
    vec = lu_solve(kron, rhs);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::singular) throw;
    throw Error(ErrorCode::no_unique_solution,
                "Lyapunov operator is singular (some eigenvalue pair sums to zero): " +
                    std::string(e.what()),
                e.index());
  }

  Matrix m(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) m(i, j) = vec(i + j * n, 0);
  return symmetric_part(m);
}

// ---------------------------------------------------------------------------
// Symmetric tridiagonal QL

TridiagonalEigen symmetric_tridiagonal_eigen(std::span<const double> diagonal,
                                             std::span<const double> offdiagonal) {
  const std::size_t n = diagonal.size();
  if (n == 0 || offdiagonal.size() + 1 != n) {
    throw Error(ErrorCode::usage, "tridiagonal eigen: need n diagonal and n-1 off-diagonal entries");
  }
  Vector d(diagonal.begin(), diagonal.end());
  Vector e(n, 0.0);
  std::copy(offdiagonal.begin(), offdiagonal.end(), e.begin());
  Vector z(n, 0.0);  // first row of the accumulated eigenvector matrix
  z[0] = 1.0;

  const auto size = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t l = 0; l < size; ++l) {
    int iter = 0;
    std::ptrdiff_t m = l;
    do {
      for (m = l; m < size - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kEps * dd) break;
      }
      if (m != l) {
        if (iter++ == tolerance::ql_sweeps_per_eigenvalue) {
          throw Error(ErrorCode::non_convergence,
                      "QL iteration exceeded " +
                          std::to_string(tolerance::ql_sweeps_per_eigenvalue) +
                          " sweeps for eigenvalue " + std::to_string(l) + " (residual off-diagonal " +
                          std::to_string(std::abs(e[l])) + ")",
                      static_cast<std::size_t>(l));
        }
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + sign_of(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        std::ptrdiff_t i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          e[i + 1] = (r = std::hypot(f, g));
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          d[i + 1] = g + (p = s * r);
          g = c * r - b;
          f = z[i + 1];
          z[i + 1] = s * z[i] + c * f;
          z[i] = c * z[i] - s * f;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });
  TridiagonalEigen out;
  out.values.reserve(n);
  out.first_components.reserve(n);
  for (std::size_t k : order) {
    out.values.push_back(d[k]);
    out.first_components.push_back(z[k]);
  }
  return out;
}

}  // namespace sgstab
