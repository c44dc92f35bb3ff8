#include "pgn/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "pgn/errors.hpp"

namespace pgn::oracles {

Vector gauss_solve(const Matrix& m, std::span<const double> b) {
  const std::size_t n = m.rows();
  if (m.cols() != n || b.size() != n) throw ShapeMismatch("gauss_solve: shape");
  std::vector<double> a(m.values().begin(), m.values().end());
  Vector x(b.begin(), b.end());
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    }
    if (a[piv * n + k] == 0.0) throw RankDeficient("gauss_solve: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(x[k], x[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / a[k * n + k];
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      x[i] -= f * x[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = x[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a[k * n + j] * x[j];
    x[k] = s / a[k * n + k];
  }
  return x;
}

Matrix normal_equation_pinv(const Matrix& a) {
  const Matrix g = gram(a);
  const Matrix at = a.transposed();
  Matrix p(a.cols(), a.rows());
  for (std::size_t c = 0; c < a.rows(); ++c) {
    Vector col(a.cols());
    for (std::size_t i = 0; i < a.cols(); ++i) col[i] = at(i, c);
    const Vector x = gauss_solve(g, col);
    for (std::size_t i = 0; i < a.cols(); ++i) p(i, c) = x[i];
  }
  return p;
}

Vector symmetric_eigenvalues(const Matrix& s) {
  const std::size_t n = s.rows();
  Matrix a = s;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    }
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }
  Vector ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

Vector gram_singular_values(const Matrix& a) {
  Vector ev = symmetric_eigenvalues(gram(a));
  for (double& v : ev) v = std::sqrt(std::max(v, 0.0));
  return ev;
}

double power_iteration_norm(const Matrix& a, int iterations) {
  const Matrix g = gram(a);
  Vector v(a.cols());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
  for (int it = 0; it < iterations; ++it) {
    Vector w = multiply(g, v);
    const double nw = norm(w);
    if (nw == 0.0) return 0.0;
    for (double& x : w) x /= nw;
    v = std::move(w);
  }
  // Rayleigh quotient of the final unit vector.
  const Vector gv = multiply(g, v);
  double rq = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) rq += v[i] * gv[i];
  return std::sqrt(std::max(rq, 0.0));
}

Vector box_least_squares(const Matrix& a, std::span<const double> y, const prox::Box& box) {
  const std::size_t n = a.cols();
  const std::size_t m = a.rows();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;

  double best = std::numeric_limits<double>::infinity();
  Vector best_v;
  std::vector<int> state(n);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    bool usable = true;
    Vector v(n, 0.0);
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i, c /= 3) {
      state[i] = static_cast<int>(c % 3);
      if (state[i] == 0) {
        free.push_back(i);
      } else {
        v[i] = state[i] == 1 ? box.lower()[i] : box.upper()[i];
        if (!std::isfinite(v[i])) usable = false;
      }
    }
    if (!usable) continue;
    if (!free.empty()) {
      // Normal equations of min || A_F w - (y - A_B v_B) ||.
      Vector rhs(y.begin(), y.end());
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < n; ++j) {
          if (state[j] != 0) rhs[r] -= a(r, j) * v[j];
        }
      }
      const std::size_t k = free.size();
      Matrix g(k, k);
      Vector b(k, 0.0);
      for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t r = 0; r < m; ++r) b[p] += a(r, free[p]) * rhs[r];
        for (std::size_t q = 0; q < k; ++q) {
          double s = 0.0;
          for (std::size_t r = 0; r < m; ++r) s += a(r, free[p]) * a(r, free[q]);
          g(p, q) = s;
        }
      }
      const Vector w = gauss_solve(g, b);
      for (std::size_t p = 0; p < k; ++p) {
        const std::size_t i = free[p];
        if (w[p] < box.lower()[i] || w[p] > box.upper()[i]) usable = false;
        v[i] = w[p];
      }
      if (!usable) continue;
    }
    const Vector r = subtract(multiply(a, v), y);
    const double obj = 0.5 * std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    if (obj < best) {
      best = obj;
      best_v = v;
    }
  }
  return best_v;
}

std::function<Vector(std::span<const double>)> composed_box_prox(const Matrix& a,
                                                                 const Matrix& pinv,
                                                                 const prox::Box& box) {
  return [a, pinv, box](std::span<const double> y) {
    const Vector v = box_least_squares(a, y, box);
    const Vector range_part = multiply(a, multiply(pinv, y));  // A A^dagger y
    Vector out = multiply(a, v);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i] - range_part[i];
    return out;
  };
}

double grid_golden_minimize(const std::function<double(double)>& f, double a, double b, int grid,
                            double tol) {
  if (a == b) return a;
  const double h = (b - a) / grid;
  int best = 0;
  double fbest = f(a);
  for (int i = 1; i <= grid; ++i) {
    const double v = f(a + h * i);
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  double lo = a + h * std::max(best - 1, 0);
  double hi = a + h * std::min(best + 1, grid);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 300 && hi - lo > tol; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    }
  }
  // The endpoints of the box are candidates in their own right.
  double x = 0.5 * (lo + hi);
  if (f(a) < f(x)) x = a;
  if (f(b) < f(x)) x = b;
  return x;
}

std::function<Vector(std::span<const double>)> composed_box_prox_diagonal(
    std::span<const double> d, const prox::Box& box) {
  Vector diag(d.begin(), d.end());
  return [diag, box](std::span<const double> t) {
    Vector out(t.begin(), t.end());
    for (std::size_t i = 0; i < diag.size(); ++i) {
      // w_i ranges over d_i * [lower_i, upper_i].
      double lo = diag[i] * box.lower()[i];
      double hi = diag[i] * box.upper()[i];
      if (lo > hi) std::swap(lo, hi);
      if (!std::isfinite(lo)) lo = t[i] - 1e3;
      if (!std::isfinite(hi)) hi = t[i] + 1e3;
      const double ti = t[i];
      out[i] = grid_golden_minimize([ti](double w) { return 0.5 * (w - ti) * (w - ti); }, lo, hi);
    }
    return out;
  };
}

}  // namespace pgn::oracles
