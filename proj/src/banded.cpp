#include "nlslab/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <type_traits>

namespace nlslab {

template <class T>
BandLU<T>::BandLU(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(static_cast<size_t>(ld_) * n, T{}),
      ipiv_(n) {}

template <class T>
void BandLU<T>::set(int i, int j, T v) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_) {
    if (v == T{}) return;
    throw Error(ErrorKind::structural, "banded entry outside band");
  }
  ab_[static_cast<size_t>(j) * ld_ + kl_ + ku_ + i - j] = v;
  factored_ = false;
}

template <class T>
void BandLU<T>::add(int i, int j, T v) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) return;
  if (i - j > kl_ || j - i > ku_) throw Error(ErrorKind::structural, "banded entry outside band");
  ab_[static_cast<size_t>(j) * ld_ + kl_ + ku_ + i - j] += v;
  factored_ = false;
}

template <class T>
void BandLU<T>::factor() {
  // 1-norm for the condition estimate
  double anorm = 0.0;
  for (int j = 0; j < n_; ++j) {
    double s = 0.0;
    for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i)
      s += std::abs(ab_[static_cast<size_t>(j) * ld_ + kl_ + ku_ + i - j]);
    anorm = std::max(anorm, s);
  }
  lapack_int info;
  if constexpr (std::is_same_v<T, double>) {
    info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(), ld_, ipiv_.data());
    if (info == 0)
      info = LAPACKE_dgbcon(LAPACK_COL_MAJOR, '1', n_, kl_, ku_, ab_.data(), ld_, ipiv_.data(),
                            anorm, &rcond_);
  } else {
    auto* p = reinterpret_cast<lapack_complex_double*>(ab_.data());
    info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, p, ld_, ipiv_.data());
    if (info == 0)
      info = LAPACKE_zgbcon(LAPACK_COL_MAJOR, '1', n_, kl_, ku_, p, ld_, ipiv_.data(), anorm,
                            &rcond_);
  }
  if (info > 0) {
    rcond_ = 0.0;
    throw Error(ErrorKind::resolvent, "banded matrix is exactly singular");
  }
  if (info < 0) throw Error(ErrorKind::structural, "invalid argument to banded LU");
  factored_ = true;
}

template <class T>
void BandLU<T>::solve(std::span<T> b) const {
  if (!factored_) throw Error(ErrorKind::structural, "solve before factor");
  if (static_cast<int>(b.size()) != n_) throw Error(ErrorKind::structural, "rhs length mismatch");
  lapack_int info;
  if constexpr (std::is_same_v<T, double>) {
    info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1, ab_.data(), ld_, ipiv_.data(),
                          b.data(), n_);
  } else {
    info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1,
                          reinterpret_cast<const lapack_complex_double*>(ab_.data()), ld_,
                          ipiv_.data(), reinterpret_cast<lapack_complex_double*>(b.data()), n_);
  }
  if (info != 0) throw Error(ErrorKind::solver, "banded solve failed");
}

template <class T>
std::vector<T> BandLU<T>::solve_copy(std::span<const T> b) const {
  std::vector<T> x(b.begin(), b.end());
  solve(x);
  return x;
}

template class BandLU<double>;
template class BandLU<std::complex<double>>;

BandLU<double> to_band_lu(const SymBand& a) {
  BandLU<double> lu(a.n, a.p, a.p);
  for (int k = 0; k <= a.p; ++k)
    for (int i = 0; i + k < a.n; ++i) {
      lu.set(i, i + k, a.bands[k][i]);
      lu.set(i + k, i, a.bands[k][i]);
    }
  return lu;
}

BandLDL::BandLDL(const SymBand& a) : n_(a.n), p_(a.p), d_(a.n), l_(static_cast<size_t>(a.n) * std::max(1, a.p)) {
  const int p = p_;
  for (int j = 0; j < n_; ++j) {
    double dj = a.bands[0][j];
    for (int k = std::max(0, j - p); k < j; ++k) {
      double ljk = l_[static_cast<size_t>(k) * p + (j - k - 1)];
      dj -= ljk * ljk * d_[k];
    }
    if (dj == 0.0) dj = 1e-300;
    d_[j] = dj;
    if (dj < 0) ++neg_;
    for (int i = j + 1; i <= std::min(n_ - 1, j + p); ++i) {
      double aij = a.bands[i - j][j];
      for (int k = std::max(0, i - p); k < j; ++k)
        aij -= l_[static_cast<size_t>(k) * p + (i - k - 1)] *
               l_[static_cast<size_t>(k) * p + (j - k - 1)] * d_[k];
      l_[static_cast<size_t>(j) * p + (i - j - 1)] = aij / dj;
    }
  }
}

std::vector<double> BandLDL::solve(std::span<const double> b) const {
  const int p = p_;
  std::vector<double> x(b.begin(), b.end());
  for (int i = 0; i < n_; ++i)
    for (int k = std::max(0, i - p); k < i; ++k) x[i] -= l_[static_cast<size_t>(k) * p + (i - k - 1)] * x[k];
  for (int i = 0; i < n_; ++i) x[i] /= d_[i];
  for (int i = n_ - 1; i >= 0; --i)
    for (int k = i + 1; k <= std::min(n_ - 1, i + p); ++k)
      x[i] -= l_[static_cast<size_t>(i) * p + (k - i - 1)] * x[k];
  return x;
}

}  // namespace nlslab
