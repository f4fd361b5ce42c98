#include "nlslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlslab {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

// Field value at index j with even reflection at 0 and odd (in g) at r_max.
inline double fext(std::span<const double> f, int n, int j) {
  if (j < 0) j = -j;
  if (j >= n - 1) {
    if (j == n - 1) return 0.0;
    int m = 2 * (n - 1) - j;
    return m > 0 ? -f[m] : 0.0;
  }
  return f[j];
}

inline double gext(std::span<const double> f, const std::vector<double>& r, int n, int j) {
  if (j == 0 || j == n - 1) return 0.0;
  if (j < 0) return -r[-j] * f[-j];
  if (j >= n) {
    int m = 2 * (n - 1) - j;
    return m > 0 ? -r[m] * f[m] : 0.0;
  }
  return r[j] * f[j];
}

}  // namespace

RadialGrid::RadialGrid(int n_points, double r_max, int stencil_order)
    : n_(n_points), r_max_(r_max), order_(stencil_order) {
  if (n_points < 16) throw Error(ErrorKind::usage, "n_points must be at least 16");
  if (!(r_max > 0)) throw Error(ErrorKind::usage, "r_max must be positive");
  if (stencil_order != 2 && stencil_order != 4)
    throw Error(ErrorKind::usage, "stencil_order must be 2 or 4");
  h_ = r_max / (n_points - 1);
  r_.resize(n_);
  w_.assign(n_, h_);
  for (int i = 0; i < n_; ++i) r_[i] = i * h_;
  r_[n_ - 1] = r_max;
  // Trapezoid is spectrally accurate at the even end r = 0; Gregory end
  // correction at r_max makes the rule exact through cubics.
  w_[0] = 0.5 * h_;
  w_[n_ - 1] = 3.0 / 8.0 * h_;
  w_[n_ - 2] = 7.0 / 6.0 * h_;
  w_[n_ - 3] = 23.0 / 24.0 * h_;
}

std::array<double, 3> RadialGrid::stencil() const {
  if (order_ == 4) return {-30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};
  return {-2.0, 1.0, 0.0};
}

GridPtr make_grid(int n_points, double r_max, int stencil_order) {
  return std::make_shared<const RadialGrid>(n_points, r_max, stencil_order);
}

RadialField::RadialField(GridPtr g) : grid(std::move(g)) {
  re.assign(grid->n_points(), 0.0);
  im.assign(grid->n_points(), 0.0);
}

RadialField::RadialField(GridPtr g, std::vector<double> re_, std::vector<double> im_)
    : grid(std::move(g)), re(std::move(re_)), im(std::move(im_)) {
  if (im.empty()) im.assign(re.size(), 0.0);
  check_field(*this);
}

bool RadialField::is_real(double tol) const {
  return std::all_of(im.begin(), im.end(), [tol](double v) { return std::abs(v) <= tol; });
}

RadialField& RadialField::operator+=(const RadialField& o) {
  check_same_grid(*this, o);
  for (int i = 0; i < size(); ++i) {
    re[i] += o.re[i];
    im[i] += o.im[i];
  }
  return *this;
}

RadialField& RadialField::operator-=(const RadialField& o) {
  check_same_grid(*this, o);
  for (int i = 0; i < size(); ++i) {
    re[i] -= o.re[i];
    im[i] -= o.im[i];
  }
  return *this;
}

RadialField& RadialField::operator*=(cplx s) {
  for (int i = 0; i < size(); ++i) set(i, s * at(i));
  return *this;
}

RadialField operator+(RadialField a, const RadialField& b) { return a += b; }
RadialField operator-(RadialField a, const RadialField& b) { return a -= b; }
RadialField operator*(cplx s, RadialField a) { return a *= s; }

RadialField real_field(GridPtr g, std::vector<double> v) {
  return RadialField(std::move(g), std::move(v), {});
}

RadialField conj(RadialField a) {
  for (auto& v : a.im) v = -v;
  return a;
}

void check_field(const RadialField& f) {
  if (!f.grid) throw Error(ErrorKind::structural, "field has no grid");
  auto n = static_cast<size_t>(f.grid->n_points());
  if (f.re.size() != n || f.im.size() != n)
    throw Error(ErrorKind::structural, "field length does not match grid");
}

void check_same_grid(const RadialField& a, const RadialField& b) {
  check_field(a);
  check_field(b);
  if (a.grid != b.grid) {
    const auto& ga = *a.grid;
    const auto& gb = *b.grid;
    if (ga.n_points() != gb.n_points() || ga.r_max() != gb.r_max() ||
        ga.stencil_order() != gb.stencil_order())
      throw Error(ErrorKind::structural, "fields live on different grids");
  }
}

double integrate(const RadialGrid& g, std::span<const double> v) {
  if (static_cast<int>(v.size()) != g.n_points())
    throw Error(ErrorKind::structural, "integrand length does not match grid");
  const auto& r = g.nodes();
  const auto& w = g.weights();
  double s = 0.0;
  for (int i = 0; i < g.n_points(); ++i) s += w[i] * r[i] * r[i] * v[i];
  return kFourPi * s;
}

cplx inner_c(const RadialField& f, const RadialField& g) {
  check_same_grid(f, g);
  const auto& r = f.grid->nodes();
  const auto& w = f.grid->weights();
  cplx s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += w[i] * r[i] * r[i] * f.at(i) * std::conj(g.at(i));
  return kFourPi * s;
}

double inner(const RadialField& f, const RadialField& g) { return inner_c(f, g).real(); }

cplx dirichlet_c(const RadialField& f, const RadialField& g) {
  RadialField lf = laplacian(f);
  lf *= -1.0;
  return inner_c(lf, g);
}

double dirichlet(const RadialField& f, const RadialField& g) { return dirichlet_c(f, g).real(); }

std::vector<double> laplacian_real(const RadialGrid& g, std::span<const double> f) {
  const int n = g.n_points();
  if (static_cast<int>(f.size()) != n) throw Error(ErrorKind::structural, "length mismatch");
  const double h2 = g.spacing() * g.spacing();
  const auto& r = g.nodes();
  const auto c = g.stencil();
  std::vector<double> out(n, 0.0);
  if (g.stencil_order() == 4)
    out[0] = (-f[2] + 16.0 * f[1] - 15.0 * f[0]) / (2.0 * h2);
  else
    out[0] = 6.0 * (f[1] - f[0]) / h2;
  for (int i = 1; i < n - 1; ++i) {
    double s = c[0] * r[i] * f[i];
    for (int k = 1; k <= g.bandwidth(); ++k)
      s += c[k] * (gext(f, r, n, i - k) + gext(f, r, n, i + k));
    out[i] = s / (h2 * r[i]);
  }
  out[n - 1] = 0.0;
  return out;
}

std::vector<double> derivative_real(const RadialGrid& g, std::span<const double> f) {
  const int n = g.n_points();
  if (static_cast<int>(f.size()) != n) throw Error(ErrorKind::structural, "length mismatch");
  const double h = g.spacing();
  std::vector<double> out(n, 0.0);
  for (int i = 1; i < n; ++i) {
    if (g.stencil_order() == 4)
      out[i] = (fext(f, n, i - 2) - 8.0 * fext(f, n, i - 1) + 8.0 * fext(f, n, i + 1) -
                fext(f, n, i + 2)) /
               (12.0 * h);
    else
      out[i] = (fext(f, n, i + 1) - fext(f, n, i - 1)) / (2.0 * h);
  }
  return out;
}

RadialField laplacian(const RadialField& f) {
  check_field(f);
  return RadialField(f.grid, laplacian_real(*f.grid, f.re), laplacian_real(*f.grid, f.im));
}

RadialField derivative(const RadialField& f) {
  check_field(f);
  return RadialField(f.grid, derivative_real(*f.grid, f.re), derivative_real(*f.grid, f.im));
}

Norms norms(const RadialField& f) {
  check_field(f);
  const auto& g = *f.grid;
  std::vector<double> a2(f.size()), a4(f.size());
  for (int i = 0; i < f.size(); ++i) {
    a2[i] = std::norm(f.at(i));
    a4[i] = a2[i] * a2[i];
  }
  Norms n;
  n.l2sq = integrate(g, a2);
  n.l4_4 = integrate(g, a4);
  n.grad_l2sq = dirichlet(f, f);
  n.h1sq = n.l2sq + n.grad_l2sq;
  return n;
}

double h1_norm(const RadialField& f) { return std::sqrt(std::max(0.0, norms(f).h1sq)); }

double l2_norm(const RadialField& f) { return std::sqrt(std::max(0.0, inner(f, f))); }

std::array<double, 3> momentum(const RadialField& f) {
  check_field(f);
  return {0.0, 0.0, 0.0};
}

std::vector<double> to_g(const RadialGrid& g, std::span<const double> f) {
  const int m = g.interior();
  std::vector<double> out(m);
  for (int k = 0; k < m; ++k) out[k] = g.node(k + 1) * f[k + 1];
  return out;
}

double extrapolate_origin(const RadialGrid& g, std::span<const double> f) {
  if (g.stencil_order() == 4) return (15.0 * f[1] - 6.0 * f[2] + f[3]) / 10.0;
  return (4.0 * f[1] - f[2]) / 3.0;
}

std::vector<double> from_g(const RadialGrid& g, std::span<const double> gv) {
  const int n = g.n_points();
  if (static_cast<int>(gv.size()) != g.interior())
    throw Error(ErrorKind::structural, "g-vector length mismatch");
  std::vector<double> f(n, 0.0);
  for (int k = 0; k < g.interior(); ++k) f[k + 1] = gv[k] / g.node(k + 1);
  f[0] = extrapolate_origin(g, f);
  return f;
}

SymBand::SymBand(int n_, int p_) : n(n_), p(p_), bands(p_ + 1) {
  for (int k = 0; k <= p; ++k) bands[k].assign(std::max(0, n - k), 0.0);
}

std::vector<double> SymBand::apply(std::span<const double> x) const {
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i) y[i] = bands[0][i] * x[i];
  for (int k = 1; k <= p; ++k) {
    const auto& b = bands[k];
    for (int i = 0; i + k < n; ++i) {
      y[i] += b[i] * x[i + k];
      y[i + k] += b[i] * x[i];
    }
  }
  return y;
}

double SymBand::at(int i, int j) const {
  if (i > j) std::swap(i, j);
  int k = j - i;
  if (k > p) return 0.0;
  return bands[k][i];
}

SymBand minus_laplacian_g(const RadialGrid& g) {
  const int m = g.interior();
  const int p = g.bandwidth();
  const double h2 = g.spacing() * g.spacing();
  const auto c = g.stencil();
  SymBand a(m, p);
  for (int i = 0; i < m; ++i) a.bands[0][i] = -c[0] / h2;
  for (int k = 1; k <= p; ++k)
    for (auto& v : a.bands[k]) v = -c[k] / h2;
  if (p == 2) {
    // odd reflections g_{-1} = -g_1 and g_n = -g_{n-2}
    a.bands[0][0] += c[2] / h2;
    a.bands[0][m - 1] += c[2] / h2;
  }
  return a;
}

SymBand add_diagonal(SymBand a, std::span<const double> d, double scale) {
  for (int i = 0; i < a.n; ++i) a.bands[0][i] += scale * d[i];
  return a;
}

SymBand combine(const SymBand& a, double sa, const SymBand& b, double sb) {
  if (a.n != b.n) throw Error(ErrorKind::structural, "band size mismatch");
  SymBand c(a.n, std::max(a.p, b.p));
  for (int k = 0; k <= a.p; ++k)
    for (size_t i = 0; i < a.bands[k].size(); ++i) c.bands[k][i] += sa * a.bands[k][i];
  for (int k = 0; k <= b.p; ++k)
    for (size_t i = 0; i < b.bands[k].size(); ++i) c.bands[k][i] += sb * b.bands[k][i];
  return c;
}

double interpolate(const RadialGrid& g, std::span<const double> f, double x) {
  x = std::abs(x);
  if (x >= g.r_max()) return 0.0;
  const int n = g.n_points();
  const double h = g.spacing();
  const double s = x / h;
  const int i0 = static_cast<int>(std::floor(s)) - 2;
  double out = 0.0;
  for (int a = 0; a < 6; ++a) {
    double la = 1.0;
    for (int b = 0; b < 6; ++b)
      if (b != a) la *= (s - (i0 + b)) / static_cast<double>(a - b);
    out += la * fext(f, n, i0 + a);
  }
  return out;
}

}  // namespace nlslab
