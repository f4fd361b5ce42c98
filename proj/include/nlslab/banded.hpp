#pragma once

#include <complex>
#include <span>
#include <vector>

#include "nlslab/grid.hpp"

namespace nlslab {

// General banded LU (LAPACK gbtrf/gbtrs). Fill entries with set(), then factor().
template <class T>
class BandLU {
 public:
  BandLU() = default;
  BandLU(int n, int kl, int ku);

  void set(int i, int j, T v);
  void add(int i, int j, T v);
  void factor();
  // Reciprocal 1-norm condition estimate; valid after factor().
  double rcond() const { return rcond_; }
  void solve(std::span<T> b) const;
  std::vector<T> solve_copy(std::span<const T> b) const;
  int size() const { return n_; }

 private:
  int n_ = 0, kl_ = 0, ku_ = 0, ld_ = 0;
  std::vector<T> ab_;
  std::vector<int> ipiv_;
  double rcond_ = 0.0;
  bool factored_ = false;
};

extern template class BandLU<double>;
extern template class BandLU<std::complex<double>>;

BandLU<double> to_band_lu(const SymBand& a);

// LDL^T without pivoting for symmetric banded matrices; used for Sylvester
// inertia counts and for solves with the shifted pencil.
class BandLDL {
 public:
  explicit BandLDL(const SymBand& a);
  int negatives() const { return neg_; }
  std::vector<double> solve(std::span<const double> b) const;

 private:
  int n_, p_;
  std::vector<double> d_;
  std::vector<double> l_;  // l_[j*p + (k-1)] = L(j+k, j)
  int neg_ = 0;
};

}  // namespace nlslab
