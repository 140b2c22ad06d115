#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "epikl/field.hpp"
#include "epikl/poly.hpp"

namespace epikl {

// Dense row-major matrix over F_q. Arithmetic needs the field, so the
// operations are free functions taking it explicitly.
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<elem> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}

  elem& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  elem operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
  bool operator!=(const Mat& o) const { return !(*this == o); }
  bool is_zero() const {
    return std::all_of(a.begin(), a.end(), [](elem x) { return x == 0; });
  }
  bool is_square() const { return rows == cols; }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  // Ones on the leading diagonal of an r x c matrix.
  static Mat rect_identity(std::size_t r, std::size_t c) {
    Mat m(r, c);
    for (std::size_t i = 0; i < std::min(r, c); ++i) m(i, i) = 1;
    return m;
  }
  static Mat diagonal(const std::vector<elem>& d) {
    Mat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
};

using Vec = std::vector<elem>;

inline Mat mat_mul(const Field& F, const Mat& A, const Mat& B) {
  if (A.cols != B.rows) throw shape_error("matrix product shape mismatch");
  Mat C(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t k = 0; k < A.cols; ++k) {
      const elem x = A(i, k);
      if (x == 0) continue;
      for (std::size_t j = 0; j < B.cols; ++j) C(i, j) = F.add(C(i, j), F.mul(x, B(k, j)));
    }
  return C;
}

inline Vec mat_vec(const Field& F, const Mat& A, const Vec& v) {
  if (A.cols != v.size()) throw shape_error("matrix-vector shape mismatch");
  Vec r(A.rows, 0);
  for (std::size_t i = 0; i < A.rows; ++i) {
    elem s = 0;
    for (std::size_t j = 0; j < A.cols; ++j) s = F.add(s, F.mul(A(i, j), v[j]));
    r[i] = s;
  }
  return r;
}

inline Mat mat_add(const Field& F, const Mat& A, const Mat& B) {
  if (A.rows != B.rows || A.cols != B.cols) throw shape_error("matrix sum shape mismatch");
  Mat C(A.rows, A.cols);
  for (std::size_t i = 0; i < A.a.size(); ++i) C.a[i] = F.add(A.a[i], B.a[i]);
  return C;
}

inline Mat mat_sub(const Field& F, const Mat& A, const Mat& B) {
  if (A.rows != B.rows || A.cols != B.cols) throw shape_error("matrix difference shape mismatch");
  Mat C(A.rows, A.cols);
  for (std::size_t i = 0; i < A.a.size(); ++i) C.a[i] = F.sub(A.a[i], B.a[i]);
  return C;
}

inline Mat mat_scale(const Field& F, const Mat& A, elem c) {
  Mat C = A;
  for (auto& x : C.a) x = F.mul(x, c);
  return C;
}

inline Mat transpose(const Mat& A) {
  Mat T(A.cols, A.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
  return T;
}

inline bool is_symmetric(const Mat& A) { return A.is_square() && A == transpose(A); }

// Rows [r0, r0+nr) and columns [c0, c0+nc).
inline Mat submatrix(const Mat& A, std::size_t r0, std::size_t nr, std::size_t c0, std::size_t nc) {
  Mat S(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) S(i, j) = A(r0 + i, c0 + j);
  return S;
}

inline void set_submatrix(Mat& A, std::size_t r0, std::size_t c0, const Mat& S) {
  for (std::size_t i = 0; i < S.rows; ++i)
    for (std::size_t j = 0; j < S.cols; ++j) A(r0 + i, c0 + j) = S(i, j);
}

// Row echelon form in place; returns the rank and the determinant sign
// bookkeeping through det (product of pivots with swap signs).
inline std::size_t row_reduce(const Field& F, Mat& A, elem* det = nullptr) {
  std::size_t rank = 0;
  elem d = 1;
  for (std::size_t c = 0; c < A.cols && rank < A.rows; ++c) {
    std::size_t piv = rank;
    while (piv < A.rows && A(piv, c) == 0) ++piv;
    if (piv == A.rows) {
      d = 0;
      continue;
    }
    if (piv != rank) {
      for (std::size_t j = 0; j < A.cols; ++j) std::swap(A(piv, j), A(rank, j));
      d = F.neg(d);
    }
    const elem pv = A(rank, c);
    d = F.mul(d, pv);
    const elem pinv = F.inv(pv);
    for (std::size_t j = c; j < A.cols; ++j) A(rank, j) = F.mul(A(rank, j), pinv);
    for (std::size_t i = 0; i < A.rows; ++i) {
      if (i == rank || A(i, c) == 0) continue;
      const elem f = A(i, c);
      for (std::size_t j = c; j < A.cols; ++j) A(i, j) = F.sub(A(i, j), F.mul(f, A(rank, j)));
    }
    ++rank;
  }
  if (rank < A.rows) d = 0;
  if (det) *det = d;
  return rank;
}

inline std::size_t mat_rank(const Field& F, Mat A) { return row_reduce(F, A); }

inline elem mat_det(const Field& F, Mat A) {
  if (!A.is_square()) throw shape_error("determinant of a non-square matrix");
  if (A.rows == 0) return 1;
  elem d = 0;
  row_reduce(F, A, &d);
  return d;
}

inline std::optional<Mat> mat_inverse(const Field& F, const Mat& A) {
  if (!A.is_square()) throw shape_error("inverse of a non-square matrix");
  const std::size_t n = A.rows;
  Mat aug(n, 2 * n);
  set_submatrix(aug, 0, 0, A);
  set_submatrix(aug, 0, n, Mat::identity(n));
  row_reduce(F, aug);
  for (std::size_t i = 0; i < n; ++i)
    if (aug(i, i) != 1) return std::nullopt;
  return submatrix(aug, 0, n, n, n);
}

// x^T A y.
inline elem bilinear(const Field& F, const Mat& A, const Vec& x, const Vec& y) {
  elem s = 0;
  for (std::size_t i = 0; i < A.rows; ++i) {
    if (x[i] == 0) continue;
    elem row = 0;
    for (std::size_t j = 0; j < A.cols; ++j) row = F.add(row, F.mul(A(i, j), y[j]));
    s = F.add(s, F.mul(x[i], row));
  }
  return s;
}

// Matrix with polynomial entries; determinant by fraction-free
// elimination (Bareiss), exact over F_q[x].
inline Poly poly_matrix_det(const Field& F, std::vector<std::vector<Poly>> M) {
  const std::size_t n = M.size();
  if (n == 0) return Poly{1};
  Poly prev{1};
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (M[k][k].empty()) {
      std::size_t piv = k + 1;
      while (piv < n && M[piv][k].empty()) ++piv;
      if (piv == n) return Poly{};
      std::swap(M[piv], M[k]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Poly num = poly_sub(F, poly_mul(F, M[i][j], M[k][k]), poly_mul(F, M[i][k], M[k][j]));
        auto [quo, rem] = poly_divmod(F, num, prev);
        if (!rem.empty()) throw invariant_violation("Bareiss division not exact");
        M[i][j] = std::move(quo);
      }
      M[i][k].clear();
    }
    prev = M[k][k];
  }
  Poly d = M[n - 1][n - 1];
  if (negate) d = poly_scale(F, d, F.neg(1));
  return d;
}

// det(B - x A) as a polynomial in x.
inline Poly pencil_polynomial(const Field& F, const Mat& A, const Mat& B) {
  if (!A.is_square() || A.rows != B.rows || B.rows != B.cols) throw shape_error("pencil forms must be square of equal size");
  const std::size_t n = A.rows;
  std::vector<std::vector<Poly>> M(n, std::vector<Poly>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Poly e{B(i, j), F.neg(A(i, j))};
      poly_trim(e);
      M[i][j] = std::move(e);
    }
  return poly_matrix_det(F, std::move(M));
}

}  // namespace epikl
