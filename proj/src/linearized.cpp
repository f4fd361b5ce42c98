#include "nlslab/linearized.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "nlslab/banded.hpp"

namespace nlslab {

namespace {

double norm2(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double field_l2(const RadialGrid& g, std::span<const double> f) {
  std::vector<double> sq(f.size());
  for (size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
  return std::sqrt(integrate(g, sq));
}

double field_dot(const RadialGrid& g, std::span<const double> a, std::span<const double> b) {
  std::vector<double> p(a.size());
  for (size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
  return integrate(g, p);
}

// Number of eigenvalues below sigma of the pencil (a, k) restricted to the
// orthogonal complement of the columns of c (Haynsworth inertia).
int constrained_count(const SymBand& a, const SymBand& k, const std::vector<std::vector<double>>& c,
                      double sigma) {
  SymBand m = combine(a, 1.0, k, -sigma);
  BandLDL ldl(m);
  int count = ldl.negatives();
  const int nc = static_cast<int>(c.size());
  if (nc == 0) return count;
  std::vector<std::vector<double>> sol(nc);
  for (int j = 0; j < nc; ++j) sol[j] = ldl.solve(c[j]);
  Eigen::MatrixXd s(nc, nc);
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j) s(i, j) = dot(c[i], sol[j]);
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  int pos = 0;
  for (int i = 0; i < nc; ++i)
    if (es.eigenvalues()(i) > 0) ++pos;
  return count + pos - nc;
}

double constrained_minimum(const SymBand& a, const SymBand& k,
                           const std::vector<std::vector<double>>& c, double lo, double hi,
                           int* steps) {
  int it = 0;
  while (hi - lo > 1e-13 * std::max(1.0, std::abs(hi)) && it < 200) {
    double mid = 0.5 * (lo + hi);
    if (constrained_count(a, k, c, mid) >= 1)
      hi = mid;
    else
      lo = mid;
    ++it;
  }
  if (steps) *steps += it;
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> LinearizedPair::apply_plus(std::span<const double> f) const {
  auto out = laplacian_real(*grid, f);
  for (size_t i = 0; i < out.size(); ++i) out[i] = -out[i] + v_plus[i] * f[i];
  out.back() = 0.0;
  return out;
}

std::vector<double> LinearizedPair::apply_minus(std::span<const double> f) const {
  auto out = laplacian_real(*grid, f);
  for (size_t i = 0; i < out.size(); ++i) out[i] = -out[i] + v_minus[i] * f[i];
  out.back() = 0.0;
  return out;
}

RadialField LinearizedPair::apply_block(const RadialField& h) const {
  check_field(h);
  auto a = apply_minus(h.im);
  for (auto& v : a) v = -v;
  return RadialField(grid, std::move(a), apply_plus(h.re));
}

LinearizedPair assemble(const GroundState& gs) {
  LinearizedPair lp;
  lp.grid = gs.q.grid;
  lp.q = gs.q;
  const int n = lp.grid->n_points();
  lp.v_plus.resize(n);
  lp.v_minus.resize(n);
  for (int i = 0; i < n; ++i) {
    double q2 = gs.q.re[i] * gs.q.re[i];
    lp.v_plus[i] = 1.0 - 3.0 * q2;
    lp.v_minus[i] = 1.0 - q2;
  }
  lp.minus_lap = minus_laplacian_g(*lp.grid);
  const int m = lp.grid->interior();
  std::vector<double> dp(m), dm(m);
  for (int k = 0; k < m; ++k) {
    dp[k] = lp.v_plus[k + 1];
    dm[k] = lp.v_minus[k + 1];
  }
  lp.l_plus = add_diagonal(lp.minus_lap, dp);
  lp.l_minus = add_diagonal(lp.minus_lap, dm);
  return lp;
}

BandLU<double> block_resolvent(const LinearizedPair& lp, double shift) {
  const int m = lp.l_plus.n;
  const int p = lp.l_plus.p;
  BandLU<double> lu(2 * m, 2 * p + 1, 2 * p + 1);
  for (int i = 0; i < m; ++i) {
    lu.set(2 * i, 2 * i, -shift);
    lu.set(2 * i + 1, 2 * i + 1, -shift);
    for (int j = std::max(0, i - p); j <= std::min(m - 1, i + p); ++j) {
      lu.set(2 * i, 2 * j + 1, -lp.l_minus.at(i, j));
      lu.set(2 * i + 1, 2 * j, lp.l_plus.at(i, j));
    }
  }
  lu.factor();
  return lu;
}

RadialField SpectralData::y_plus() const { return RadialField(y1.grid, y1.re, y2.re); }

RadialField SpectralData::y_minus() const {
  std::vector<double> a(y1.re);
  for (auto& v : a) v = -v;
  return RadialField(y1.grid, std::move(a), y2.re);
}

Eigen::MatrixXd dense(const SymBand& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.n, a.n);
  for (int k = 0; k <= a.p; ++k)
    for (int i = 0; i + k < a.n; ++i) {
      m(i, i + k) = a.bands[k][i];
      m(i + k, i) = a.bands[k][i];
    }
  return m;
}

Eigen::VectorXcd dense_block_spectrum(const LinearizedPair& lp) {
  const int m = lp.l_plus.n;
  Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  blk.block(0, m, m, m) = -dense(lp.l_minus);
  blk.block(m, 0, m, m) = dense(lp.l_plus);
  Eigen::EigenSolver<Eigen::MatrixXd> es(blk, false);
  return es.eigenvalues();
}

SpectralData solve_eigenpair(const LinearizedPair& lp, const EigenOptions& opts) {
  const auto& g = *lp.grid;
  SpectralData sd;

  // Coarse dense spectrum of L-L+: guess for -e0^2 and the simplicity check.
  {
    auto cg = make_grid(opts.coarse_points, g.r_max(), g.stencil_order());
    auto cgs = solve_ground_state(cg, 1e-12);
    auto clp = assemble(cgs);
    Eigen::MatrixXd prod = dense(clp.l_minus) * dense(clp.l_plus);
    Eigen::EigenSolver<Eigen::MatrixXd> es(prod, false);
    const auto ev = es.eigenvalues();
    double scale = ev.cwiseAbs().maxCoeff();
    int neg = 0;
    double most = 0.0;
    double floor = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ev.size(); ++i) {
      double re = ev(i).real(), im = ev(i).imag();
      if (std::abs(im) < 1e-8 * scale && re < -1e-8 * scale) {
        ++neg;
        most = std::min(most, re);
      } else if (re > 1e-6) {
        floor = std::min(floor, re);
      }
    }
    sd.coarse_negative_count = neg;
    sd.spectrum_floor = floor;
    if (neg == 0) throw Error(ErrorKind::spectral, "L-L+ has no negative eigenvalue");
    if (neg > 1) throw Error(ErrorKind::nonsimple_spectrum, "L-L+ has more than one negative eigenvalue");
    sd.coarse_e0 = std::sqrt(-most);
  }

  // Shift-invert iteration on the fine block operator.
  const int m = g.interior();
  auto lu = block_resolvent(lp, sd.coarse_e0);
  std::vector<double> x(2 * m);
  {
    auto gq = to_g(g, lp.q.re);
    for (int k = 0; k < m; ++k) x[2 * k] = x[2 * k + 1] = gq[k];
  }
  double lambda = sd.coarse_e0;
  int it = 0, settled = 0;
  for (; it < opts.max_iterations; ++it) {
    double nx = norm2(x);
    for (auto& v : x) v /= nx;
    std::vector<double> y = lu.solve_copy(x);
    double next = sd.coarse_e0 + 1.0 / dot(x, y);
    double ny = norm2(y);
    for (size_t i = 0; i < y.size(); ++i) x[i] = y[i] / ny;
    settled = std::abs(next - lambda) < opts.tol * std::abs(next) ? settled + 1 : 0;
    lambda = next;
    if (settled >= 2) {
      ++it;
      break;
    }
  }
  if (!(lambda > 0)) throw Error(ErrorKind::spectral, "inverse iteration did not find e0");
  sd.e0 = lambda;
  // Both components come from the block eigenvector; y2 = L+ y1 / e0 holds to
  // the block residual, while recomputing it would amplify rounding by ||L-L+||.
  std::vector<double> y1g(m), y2g(m);
  for (int k = 0; k < m; ++k) {
    y1g[k] = x[2 * k];
    y2g[k] = x[2 * k + 1];
  }
  sd.iterations = it;

  sd.y1 = real_field(lp.grid, from_g(g, y1g));
  sd.y2 = real_field(lp.grid, from_g(g, y2g));

  // Sign: int grad Q . grad y1 > 0
  if (dirichlet(lp.q, sd.y1) < 0) {
    sd.sign = -1;
    sd.y1 *= -1.0;
    sd.y2 *= -1.0;
  }
  sd.b_norm = bilinear(sd.y_plus(), sd.y_minus(), lp);
  if (!(sd.b_norm > 0)) throw Error(ErrorKind::spectral, "B(Y+, Y-) is not positive");
  const double s = 1.0 / std::sqrt(sd.b_norm);
  sd.y1 *= s;
  sd.y2 *= s;

  const double ny = field_l2(g, sd.y1.re) + field_l2(g, sd.y2.re);
  auto r1 = lp.apply_plus(sd.y1.re);
  auto r2 = lp.apply_minus(sd.y2.re);
  for (size_t i = 0; i < r1.size(); ++i) {
    r1[i] -= sd.e0 * sd.y2.re[i];
    r2[i] += sd.e0 * sd.y1.re[i];
  }
  sd.residual_plus = field_l2(g, r1) / ny;
  sd.residual_minus = field_l2(g, r2) / ny;

  auto lapq = laplacian_real(g, lp.q.re);
  sd.lapq_y1_ratio = std::abs(field_dot(g, lapq, sd.y1.re)) /
                     (field_l2(g, lapq) * field_l2(g, sd.y1.re));
  return sd;
}

double phi(const RadialField& h, const LinearizedPair& lp) {
  check_same_grid(h, lp.q);
  const auto& g = *lp.grid;
  std::vector<double> pot(h.size());
  for (int i = 0; i < h.size(); ++i) {
    double q2 = lp.q.re[i] * lp.q.re[i];
    pot[i] = std::norm(h.at(i)) - q2 * (3.0 * h.re[i] * h.re[i] + h.im[i] * h.im[i]);
  }
  return 0.5 * integrate(g, pot) + 0.5 * dirichlet(h, h);
}

double bilinear(const RadialField& a, const RadialField& b, const LinearizedPair& lp) {
  check_same_grid(a, b);
  check_same_grid(a, lp.q);
  const auto& g = *lp.grid;
  auto p = lp.apply_plus(a.re);
  auto m = lp.apply_minus(a.im);
  std::vector<double> s(a.size());
  for (int i = 0; i < a.size(); ++i) s[i] = p[i] * b.re[i] + m[i] * b.im[i];
  return 0.5 * integrate(g, s);
}

double phi_from_constraints(const RadialField& h, const GroundState& gs, double tol) {
  check_same_grid(h, gs.q);
  RadialField u = gs.q + h;
  double dm = std::abs(mass(u) - gs.mass) / gs.mass;
  double de = std::abs(energy(u) - gs.energy) / std::abs(gs.energy);
  if (dm > tol || de > tol)
    throw Error(ErrorKind::precondition, "Q + h does not keep the mass and energy of Q");
  std::vector<double> s(h.size());
  for (int i = 0; i < h.size(); ++i) {
    double a2 = std::norm(h.at(i));
    s[i] = gs.q.re[i] * a2 * h.re[i] + 0.25 * a2 * a2;
  }
  return integrate(gs.grid(), s);
}

CoercivityResult coercivity_minimum(const LinearizedPair& lp, const SpectralData& sd,
                                    ConstraintSet which) {
  const auto& g = *lp.grid;
  const int m = g.interior();
  SymBand k = lp.minus_lap;
  for (auto& v : k.bands[0]) v += 1.0;
  SymBand ap = lp.l_plus, am = lp.l_minus;
  for (int b = 0; b <= ap.p; ++b) {
    for (auto& v : ap.bands[b]) v *= 0.5;
    for (auto& v : am.bands[b]) v *= 0.5;
  }
  std::vector<std::vector<double>> c_re, c_im;
  auto gq = to_g(g, lp.q.re);
  if (which != ConstraintSet::none) c_im.push_back(gq);
  if (which == ConstraintSet::g_perp) {
    auto lapq = lp.minus_lap.apply(gq);  // r * (-Lap Q)
    c_re.push_back(lapq);
  } else if (which == ConstraintSet::g_perp_prime) {
    c_re.push_back(to_g(g, sd.y2.re));
    c_im.push_back(to_g(g, sd.y1.re));
  }
  double vmin = 0.0;
  for (int i = 0; i < m; ++i) vmin = std::min(vmin, lp.v_plus[i + 1]);
  const double lo = 0.5 * vmin - 1.0, hi = 0.5 + 1e-9;
  CoercivityResult out;
  out.min_real_block = constrained_minimum(ap, k, c_re, lo, hi, &out.bisection_steps);
  out.min_imag_block = constrained_minimum(am, k, c_im, lo, hi, &out.bisection_steps);
  out.minimum = std::min(out.min_real_block, out.min_imag_block);
  out.positive = out.minimum > 0;
  return out;
}

double dense_coercivity_minimum(const LinearizedPair& lp, const SpectralData& sd,
                                ConstraintSet which) {
  const auto& g = *lp.grid;
  Eigen::MatrixXd k = dense(lp.minus_lap);
  k.diagonal().array() += 1.0;
  auto block_min = [&](const Eigen::MatrixXd& a, const std::vector<std::vector<double>>& cs) {
    const int n = static_cast<int>(a.rows());
    Eigen::MatrixXd z;
    if (cs.empty()) {
      z = Eigen::MatrixXd::Identity(n, n);
    } else {
      Eigen::MatrixXd c(n, cs.size());
      for (size_t j = 0; j < cs.size(); ++j)
        c.col(j) = Eigen::Map<const Eigen::VectorXd>(cs[j].data(), n);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
      Eigen::MatrixXd qfull = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
      z = qfull.rightCols(n - c.cols());
    }
    Eigen::MatrixXd az = z.transpose() * a * z;
    Eigen::MatrixXd kz = z.transpose() * k * z;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (az + az.transpose()),
                                                                  0.5 * (kz + kz.transpose()));
    return es.eigenvalues().minCoeff();
  };
  auto gq = to_g(g, lp.q.re);
  std::vector<std::vector<double>> c_re, c_im;
  if (which != ConstraintSet::none) c_im.push_back(gq);
  if (which == ConstraintSet::g_perp) {
    c_re.push_back(lp.minus_lap.apply(gq));
  } else if (which == ConstraintSet::g_perp_prime) {
    c_re.push_back(to_g(g, sd.y2.re));
    c_im.push_back(to_g(g, sd.y1.re));
  }
  double a = block_min(0.5 * dense(lp.l_plus), c_re);
  double b = block_min(0.5 * dense(lp.l_minus), c_im);
  return std::min(a, b);
}

ModeProjection project_modes(const RadialField& v, const SpectralData& sd,
                             const LinearizedPair& lp, const GroundState& gs) {
  check_same_grid(v, gs.q);
  const auto yp = sd.y_plus();
  const auto ym = sd.y_minus();
  const double nq = std::sqrt(gs.mass);
  RadialField q0(gs.q.grid);
  for (int i = 0; i < q0.size(); ++i) q0.im[i] = gs.q.re[i] / nq;
  ModeProjection out;
  out.alpha_plus = bilinear(v, ym, lp);
  out.alpha_minus = bilinear(v, yp, lp);
  out.beta0 = inner(v, q0) - out.alpha_plus * inner(yp, q0) - out.alpha_minus * inner(ym, q0);
  out.v_perp = v;
  for (int i = 0; i < v.size(); ++i) {
    out.v_perp.re[i] -= out.alpha_plus * yp.re[i] + out.alpha_minus * ym.re[i];
    out.v_perp.im[i] -= out.alpha_plus * yp.im[i] + out.alpha_minus * ym.im[i] + out.beta0 * q0.im[i];
  }
  return out;
}

std::vector<ModeResidualSample> mode_ode_residuals(const std::vector<double>& times,
                                                   const std::vector<RadialField>& v,
                                                   const std::vector<RadialField>& g,
                                                   const SpectralData& sd,
                                                   const LinearizedPair& lp) {
  const size_t n = times.size();
  if (n < 3 || v.size() != n) throw Error(ErrorKind::insufficient_data, "need at least 3 samples");
  if (!g.empty() && g.size() != n) throw Error(ErrorKind::structural, "forcing length mismatch");
  const auto yp = sd.y_plus();
  const auto ym = sd.y_minus();
  std::vector<double> ap(n), am(n), ph(n);
  for (size_t i = 0; i < n; ++i) {
    ap[i] = bilinear(v[i], ym, lp);
    am[i] = bilinear(v[i], yp, lp);
    ph[i] = phi(v[i], lp);
  }
  bool uniform = n >= 5;
  const double dt0 = times[1] - times[0];
  for (size_t i = 1; i < n && uniform; ++i)
    if (std::abs((times[i] - times[i - 1]) - dt0) > 1e-9 * std::abs(dt0)) uniform = false;
  const size_t w = uniform ? 2 : 1;
  auto deriv = [&](const std::vector<double>& f, size_t i) {
    if (uniform)
      return (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * dt0);
    double h0 = times[i] - times[i - 1], h1 = times[i + 1] - times[i];
    return (-h1 / (h0 * (h0 + h1))) * f[i - 1] + ((h1 - h0) / (h0 * h1)) * f[i] +
           (h0 / (h1 * (h0 + h1))) * f[i + 1];
  };
  std::vector<ModeResidualSample> out;
  for (size_t i = w; i + w < n; ++i) {
    ModeResidualSample s;
    s.t = times[i];
    s.alpha_plus = ap[i];
    s.alpha_minus = am[i];
    s.res_minus = deriv(am, i) - sd.e0 * am[i];
    s.res_plus = deriv(ap, i) + sd.e0 * ap[i];
    s.dphi = deriv(ph, i);
    if (!g.empty()) {
      s.forcing_minus = bilinear(g[i], yp, lp);
      s.forcing_plus = bilinear(g[i], ym, lp);
    }
    out.push_back(s);
  }
  return out;
}

RadialField q_tilde(const GroundState& gs) {
  auto d = derivative_real(gs.grid(), gs.q.re);
  std::vector<double> out(d.size());
  for (size_t i = 0; i < d.size(); ++i) out[i] = gs.q.re[i] + gs.grid().node(i) * d[i];
  out.back() = 0.0;
  return real_field(gs.q.grid, std::move(out));
}

RadialField gagliardo_constrain(RadialField h, const GroundState& gs) {
  // remove the Q component measured in the Dirichlet form
  RadialField h1 = real_field(h.grid, h.re);
  double c = dirichlet(gs.q, h1) / gs.grad_sq;
  for (int i = 0; i < h.size(); ++i) h.re[i] -= c * gs.q.re[i];
  return h;
}

double gagliardo_coefficient(const RadialField& h, const LinearizedPair& lp,
                             const GroundState& gs) {
  double qh = inner(gs.q, real_field(h.grid, h.re));
  return phi(h, lp) - qh * qh / (2.0 * gs.mass);
}

GagliardoReport gagliardo_quadratic_check(const LinearizedPair& lp, const GroundState& gs,
                                          int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GagliardoReport rep;
  rep.samples = samples;
  rep.min_coefficient = std::numeric_limits<double>::infinity();
  rep.min_relative = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    auto h = gagliardo_constrain(random_smooth_field(lp.grid, rng, true), gs);
    double c = gagliardo_coefficient(h, lp, gs);
    rep.coefficients.push_back(c);
    rep.min_coefficient = std::min(rep.min_coefficient, c);
    rep.min_relative = std::min(rep.min_relative, c / norms(h).h1sq);
  }
  rep.passed = rep.min_relative >= -1e-8;
  return rep;
}

RadialField random_smooth_field(GridPtr grid, std::mt19937_64& rng, bool complex_valued) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> width(0.15, 2.0), freq(0.0, 2.5);
  RadialField f(grid);
  const auto& r = grid->nodes();
  for (int part = 0; part < (complex_valued ? 2 : 1); ++part) {
    auto& dst = part == 0 ? f.re : f.im;
    for (int k = 0; k < 5; ++k) {
      double a = width(rng), b = freq(rng), c = nd(rng);
      for (size_t i = 0; i + 1 < r.size(); ++i) dst[i] += c * std::exp(-a * r[i] * r[i]) * std::cos(b * r[i]);
    }
  }
  return f;
}

}  // namespace nlslab
