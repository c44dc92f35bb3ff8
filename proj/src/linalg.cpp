#include "pgn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pgn/errors.hpp"
#include "pgn/kernels.hpp"

namespace pgn::linalg {
namespace {

constexpr int kMaxJacobiSweeps = 80;

// Rotates rows p and q of a row-major buffer with `len` columns.
void rotate_rows(double* base, std::size_t len, std::size_t p, std::size_t q, double c, double s) {
  double* rp = base + p * len;
  double* rq = base + q * len;
  for (std::size_t k = 0; k < len; ++k) {
    const double a = rp[k];
    const double b = rq[k];
    rp[k] = c * a - s * b;
    rq[k] = s * a + c * b;
  }
}

}  // namespace

Svd thin_svd(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) throw ShapeMismatch("thin_svd: requires rows >= cols");
  if (n == 0) return {Matrix(m, 0), {}, Matrix(0, 0)};

  // Work on A^T so each column of A is a contiguous row; vt holds V^T.
  Matrix w = a.transposed();
  Matrix vt = Matrix::identity(n);
  const auto& k = kernels::active();
  constexpr double eps = 4.0 * std::numeric_limits<double>::epsilon();

  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = k.dot(w.row(p).data(), w.row(p).data(), m);
        const double beta = k.dot(w.row(q).data(), w.row(q).data(), m);
        const double gamma = k.dot(w.row(p).data(), w.row(q).data(), m);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        rotate_rows(w.data(), m, p, q, c, s);
        rotate_rows(vt.data(), n, p, q, c, s);
      }
    }
    if (!rotated) break;
  }

  Vector sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(k.dot(w.row(j).data(), w.row(j).data(), m));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  Svd out{Matrix(m, n), Vector(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t j = order[c];
    out.singular_values[c] = sigma[j];
    const double inv = sigma[j] > 0.0 ? 1.0 / sigma[j] : 0.0;
    for (std::size_t i = 0; i < m; ++i) out.u(i, c) = w(j, i) * inv;
    for (std::size_t i = 0; i < n; ++i) out.v(i, c) = vt(j, i);
  }
  return out;
}

Vector singular_values(const Matrix& a) {
  if (a.rows() >= a.cols()) return thin_svd(a).singular_values;
  return thin_svd(a.transposed()).singular_values;
}

PinvResult pseudoinverse(const Matrix& a, double rank_tolerance) {
  if (!(rank_tolerance > 0.0)) throw InvalidArgument("pseudoinverse: rank_tolerance must be > 0");
  if (a.rows() < a.cols()) throw ShapeMismatch("pseudoinverse: requires rows >= cols");
  const Svd svd = thin_svd(a);
  const std::size_t n = a.cols();
  const double smax = n == 0 ? 0.0 : svd.singular_values.front();
  const double smin = n == 0 ? 0.0 : svd.singular_values.back();
  if (!(smin > rank_tolerance * smax)) {
    throw RankDeficient("pseudoinverse: smallest singular value " + std::to_string(smin) +
                        " <= " + std::to_string(rank_tolerance) + " * " + std::to_string(smax));
  }
  // V diag(1/s) U^T
  Matrix pinv(n, a.rows());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < a.rows(); ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < n; ++c) s += svd.v(i, c) * svd.u(j, c) / svd.singular_values[c];
      pinv(i, j) = s;
    }
  }
  return {std::move(pinv), smin, true};
}

double PenroseResiduals::max() const {
  return std::max({apa_minus_a, pap_minus_p, ap_asymmetry, pa_asymmetry});
}

PenroseResiduals penrose_residuals(const Matrix& a, const Matrix& p) {
  if (p.rows() != a.cols() || p.cols() != a.rows()) {
    throw ShapeMismatch("penrose_residuals: P must be " + std::to_string(a.cols()) + "x" +
                        std::to_string(a.rows()));
  }
  const Matrix ap = a * p;
  const Matrix pa = p * a;
  PenroseResiduals r;
  r.apa_minus_a = operator_norm(ap * a - a);
  r.pap_minus_p = operator_norm(pa * p - p);
  r.ap_asymmetry = operator_norm(ap.transposed() - ap);
  r.pa_asymmetry = operator_norm(pa.transposed() - pa);
  return r;
}

bool verify_penrose(const Matrix& a, const Matrix& p, double tol) {
  const PenroseResiduals r = penrose_residuals(a, p);
  return r.max() <= tol * std::max(1.0, operator_norm(a));
}

double operator_norm(const Matrix& a) {
  if (a.empty()) throw InvalidArgument("operator_norm: empty matrix");
  const Vector s = singular_values(a);
  return s.empty() ? 0.0 : s.front();
}

ConditionData condition_data(const Matrix& a, double rank_tolerance) {
  if (a.rows() < a.cols()) throw RankDeficient("condition_data: more columns than rows");
  const Vector s = thin_svd(a).singular_values;
  if (s.empty() || !(s.back() > rank_tolerance * s.front())) {
    throw RankDeficient("condition_data: matrix is not of full column rank");
  }
  return {1.0 / s.back(), s.front() / s.back()};
}

Vector solve_least_squares(const Matrix& a, std::span<const double> b, double rank_tolerance) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m) throw ShapeMismatch("solve_least_squares: rhs length differs from rows");
  if (m < n) throw RankDeficient("solve_least_squares: more columns than rows");

  // Householder reflections applied column by column; r is A^T so columns are rows.
  Matrix r = a.transposed();
  Vector rhs(b.begin(), b.end());
  double frob = 0.0;
  for (double v : a.values()) frob += v * v;
  frob = std::sqrt(frob);

  Vector diag(n);
  for (std::size_t k = 0; k < n; ++k) {
    double* col = r.row(k).data();
    double sq = 0.0;
    for (std::size_t i = k; i < m; ++i) sq += col[i] * col[i];
    const double nrm = std::sqrt(sq);
    if (!(nrm > rank_tolerance * frob)) {
      throw RankDeficient("solve_least_squares: column " + std::to_string(k) +
                          " is numerically dependent");
    }
    const double alpha = col[k] > 0.0 ? -nrm : nrm;
    // v = x - alpha e_k, stored in place below the diagonal.
    col[k] -= alpha;
    const double vnorm2 = sq - 2.0 * alpha * (col[k] + alpha) + alpha * alpha;
    diag[k] = alpha;
    auto reflect = [&](double* target) {
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += col[i] * target[i];
      s = 2.0 * s / vnorm2;
      for (std::size_t i = k; i < m; ++i) target[i] -= s * col[i];
    };
    for (std::size_t j = k + 1; j < n; ++j) reflect(r.row(j).data());
    reflect(rhs.data());
  }

  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = rhs[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= r(j, ii) * x[j];
    x[ii] = s / diag[ii];
  }
  return x;
}

}  // namespace pgn::linalg
