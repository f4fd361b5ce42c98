#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "nlslab/error.hpp"

namespace nlslab {

using cplx = std::complex<double>;

// Uniform grid on [0, r_max]. The field value at r_max is pinned to zero.
// Operators act on the interior unknowns g_i = r_i f_i, i = 1..n-2, where the
// radial Laplacian becomes a 1D second difference with odd reflections.
class RadialGrid {
 public:
  RadialGrid(int n_points, double r_max, int stencil_order = 4);

  int n_points() const { return n_; }
  double r_max() const { return r_max_; }
  double spacing() const { return h_; }
  int stencil_order() const { return order_; }
  int bandwidth() const { return order_ == 4 ? 2 : 1; }
  int interior() const { return n_ - 2; }

  const std::vector<double>& nodes() const { return r_; }
  // 1D composite weights; integrate() multiplies by 4 pi r^2.
  const std::vector<double>& weights() const { return w_; }
  double node(int i) const { return r_[i]; }

  // Second-difference coefficients c_0, c_1, (c_2) with sum c_0 + 2 sum c_k = 0.
  std::array<double, 3> stencil() const;

 private:
  int n_;
  double r_max_;
  double h_;
  int order_;
  std::vector<double> r_;
  std::vector<double> w_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(int n_points, double r_max, int stencil_order = 4);

struct RadialField {
  GridPtr grid;
  std::vector<double> re;
  std::vector<double> im;

  RadialField() = default;
  explicit RadialField(GridPtr g);
  RadialField(GridPtr g, std::vector<double> re_, std::vector<double> im_);

  int size() const { return static_cast<int>(re.size()); }
  cplx at(int i) const { return {re[i], im[i]}; }
  void set(int i, cplx z) {
    re[i] = z.real();
    im[i] = z.imag();
  }
  bool is_real(double tol = 0.0) const;

  RadialField& operator+=(const RadialField& o);
  RadialField& operator-=(const RadialField& o);
  RadialField& operator*=(cplx s);
};

RadialField operator+(RadialField a, const RadialField& b);
RadialField operator-(RadialField a, const RadialField& b);
RadialField operator*(cplx s, RadialField a);
RadialField real_field(GridPtr g, std::vector<double> v);
RadialField conj(RadialField a);

void check_same_grid(const RadialField& a, const RadialField& b);
void check_field(const RadialField& f);

// 4 pi sum_i w_i r_i^2 v_i
double integrate(const RadialGrid& g, std::span<const double> v);

// Re int f conj(g)
double inner(const RadialField& f, const RadialField& g);
// int f conj(g), complex
cplx inner_c(const RadialField& f, const RadialField& g);
// Re int (-Lap f) conj(g): the discrete Dirichlet form
double dirichlet(const RadialField& f, const RadialField& g);
cplx dirichlet_c(const RadialField& f, const RadialField& g);

RadialField laplacian(const RadialField& f);
// Centered first derivative, even reflection at r = 0.
RadialField derivative(const RadialField& f);
std::vector<double> laplacian_real(const RadialGrid& g, std::span<const double> f);
std::vector<double> derivative_real(const RadialGrid& g, std::span<const double> f);

struct Norms {
  double l2sq = 0;
  double l4_4 = 0;
  double grad_l2sq = 0;
  double h1sq = 0;
};

Norms norms(const RadialField& f);
double h1_norm(const RadialField& f);
double l2_norm(const RadialField& f);

// Radial symmetry forces P[u] = 0.
std::array<double, 3> momentum(const RadialField& f);

// g-space helpers: interior vector g_k = r_{k+1} f_{k+1}, k = 0..n-3.
std::vector<double> to_g(const RadialGrid& g, std::span<const double> f);
std::vector<double> from_g(const RadialGrid& g, std::span<const double> gv);
// Value at r = 0 from the even Taylor expansion of interior values.
double extrapolate_origin(const RadialGrid& g, std::span<const double> f);

// Symmetric banded matrix on interior unknowns: bands[0] diagonal,
// bands[k][i] couples i and i+k.
struct SymBand {
  int n = 0;
  int p = 0;
  std::vector<std::vector<double>> bands;

  SymBand() = default;
  SymBand(int n_, int p_);
  std::vector<double> apply(std::span<const double> x) const;
  double at(int i, int j) const;
};

// -D in g-space (positive semidefinite), with Dirichlet closure at r_max.
SymBand minus_laplacian_g(const RadialGrid& g);
SymBand add_diagonal(SymBand a, std::span<const double> d, double scale = 1.0);
SymBand combine(const SymBand& a, double sa, const SymBand& b, double sb);

// Local Lagrange interpolation of a real sample at radius x; zero beyond r_max.
double interpolate(const RadialGrid& g, std::span<const double> f, double x);

}  // namespace nlslab
