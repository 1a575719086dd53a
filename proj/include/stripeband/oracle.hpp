#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "sideband.hpp"

namespace stripeband {

struct oracle_settings {
  int N = 32;
  double tol = 1e-11;
  int max_iter = 40;
  double h1 = 1e-3, h2 = 5e-4;
  int continuation_steps = 8;
};

struct numeric_stripe {
  int N = 0;
  std::vector<cvec2> coeffs;  // modes -N..N at index m + N
  double omega = 0;           // beta * kappa * c
  double c = 0;
  double kappa = 0, alpha_check = 0, beta = 0;
  parameters mu;
  double residual = 0;
  int iterations = 0;
  bool trivial = false;
  bool truncation_warning = false;
  bool continued = false;

  const cvec2& mode(int m) const { return coeffs[m + N]; }
  double amplitude() const { return N >= 1 ? mode(1).norm() : 0.0; }
};

// Collocation on Ng = 4N + 4 points resolves all products up to cubic order exactly.
class galerkin {
public:
  explicit galerkin(int N) : N_(N), Ng_(4 * N + 4) {
    const double pi = std::acos(-1.0);
    x_.resize(Ng_);
    for (int j = 0; j < Ng_; ++j) x_[j] = 2 * pi * j / Ng_;
    int W = 2 * N;
    E_.resize(2 * W + 1, Ng_);
    for (int m = -W; m <= W; ++m)
      for (int j = 0; j < Ng_; ++j) E_(m + W, j) = std::polar(1.0, m * x_[j]);
  }
  int N() const { return N_; }
  int points() const { return Ng_; }

  std::vector<vec2> field(const std::vector<cvec2>& uh) const {
    std::vector<vec2> u(Ng_, vec2::Zero());
    for (int j = 0; j < Ng_; ++j) {
      cvec2 acc = cvec2::Zero();
      for (int m = -N_; m <= N_; ++m) acc += uh[m + N_] * E_(m + 2 * N_, j);
      u[j] = acc.real();
    }
    return u;
  }

  template <class Sample>
  std::vector<Eigen::Matrix<cplx, Sample::RowsAtCompileTime, Sample::ColsAtCompileTime>> coefficients(
      const std::vector<Sample>& f, int W) const {
    using C = Eigen::Matrix<cplx, Sample::RowsAtCompileTime, Sample::ColsAtCompileTime>;
    std::vector<C> out(2 * W + 1);
    for (int m = -W; m <= W; ++m) {
      C acc = C::Zero();
      for (int j = 0; j < Ng_; ++j) acc += f[j].template cast<cplx>() * std::conj(E_(m + 2 * N_, j));
      out[m + W] = acc / double(Ng_);
    }
    return out;
  }

private:
  int N_, Ng_;
  std::vector<double> x_;
  Eigen::MatrixXcd E_;
};

struct comoving_problem {
  const rd_model* m;
  double kappa, alpha_check, beta;

  cmat2 block(double q, double ell, double omega) const {
    cmat2 A = (kappa * kappa * (-(q * q) - ell * ell) * m->D() + m->L + alpha_check * m->M).cast<cplx>();
    A(0, 0) += cplx(0, q * beta * kappa);
    A(0, 0) += cplx(0, q * omega);
    A(1, 1) += cplx(0, q * omega);
    return A;
  }
};

inline std::vector<mat2> jacobian_field(const rd_model& m, const std::vector<vec2>& u) {
  std::vector<mat2> J(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) J[j] = 2 * quad_matrix(m, u[j]) + 3 * cubic_matrix(m, u[j], u[j]);
  return J;
}

inline std::vector<vec2> nonlinearity_field(const rd_model& m, const std::vector<vec2>& u) {
  std::vector<vec2> F(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) F[j] = quad_form(m, u[j], u[j]) + cubic_form(m, u[j], u[j], u[j]);
  return F;
}

namespace detail {

inline int unknowns(int N) { return 4 * N + 3; }

inline Eigen::VectorXd pack(const std::vector<cvec2>& uh, double omega, int N) {
  Eigen::VectorXd z(unknowns(N));
  z.head<2>() = uh[N].real();
  for (int m = 1; m <= N; ++m) {
    int b = 2 + 4 * (m - 1);
    z.segment<2>(b) = uh[N + m].real();
    z.segment<2>(b + 2) = uh[N + m].imag();
  }
  z(z.size() - 1) = omega;
  return z;
}

inline void unpack(const Eigen::VectorXd& z, int N, std::vector<cvec2>& uh, double& omega) {
  uh.assign(2 * N + 1, cvec2::Zero());
  uh[N] = z.head<2>().cast<cplx>();
  for (int m = 1; m <= N; ++m) {
    int b = 2 + 4 * (m - 1);
    cvec2 v;
    v(0) = cplx(z(b), z(b + 2));
    v(1) = cplx(z(b + 1), z(b + 3));
    uh[N + m] = v;
    uh[N - m] = v.conjugate();
  }
  omega = z(z.size() - 1);
}

struct system_eval {
  Eigen::VectorXd F;
  Eigen::MatrixXd J;
};

inline system_eval evaluate(const comoving_problem& p, const galerkin& g, const Eigen::VectorXd& z, bool with_jac) {
  const int N = g.N();
  std::vector<cvec2> uh;
  double omega;
  unpack(z, N, uh, omega);
  auto u = g.field(uh);
  auto Nh = g.coefficients(nonlinearity_field(*p.m, u), N);
  std::vector<cvec2> R(2 * N + 1);
  for (int m = -N; m <= N; ++m) R[m + N] = p.block(m, 0, omega) * uh[m + N] + Nh[m + N];

  const int n = unknowns(N);
  system_eval out;
  out.F.resize(n);
  out.F.head<2>() = R[N].real();
  for (int m = 1; m <= N; ++m) {
    int b = 2 + 4 * (m - 1);
    out.F.segment<2>(b) = R[N + m].real();
    out.F.segment<2>(b + 2) = R[N + m].imag();
  }
  out.F(n - 1) = uh[N + 1](0).imag();
  if (!with_jac) return out;

  auto C = g.coefficients(jacobian_field(*p.m, u), 2 * N);
  auto Cm = [&](int k) -> const cmat2& { return C[k + 2 * N]; };
  out.J = Eigen::MatrixXd::Zero(n, n);
  // column for a perturbation given as (delta u_n, with delta u_{-n} its conjugate)
  auto put_column = [&](int col, int nmode, const cvec2& du) {
    for (int m = 0; m <= N; ++m) {
      cvec2 dR = Cm(m - nmode) * du;
      if (nmode != 0) dR += Cm(m + nmode) * du.conjugate();
      if (m == nmode) dR += p.block(m, 0, omega) * du;
      if (m == 0) {
        out.J.block<2, 1>(0, col) = dR.real();
      } else {
        int b = 2 + 4 * (m - 1);
        out.J.block<2, 1>(b, col) = dR.real();
        out.J.block<2, 1>(b + 2, col) = dR.imag();
      }
    }
  };
  for (int j = 0; j < 2; ++j) {
    cvec2 e = cvec2::Zero();
    e(j) = 1;
    put_column(j, 0, e);
    for (int nm = 1; nm <= N; ++nm) {
      int b = 2 + 4 * (nm - 1);
      put_column(b + j, nm, e);
      put_column(b + 2 + j, nm, cplx(0, 1) * e);
    }
  }
  for (int m = 0; m <= N; ++m) {
    cvec2 dR = cplx(0, m) * uh[N + m];
    if (m == 0) continue;
    int b = 2 + 4 * (m - 1);
    out.J.block<2, 1>(b, n - 1) = dR.real();
    out.J.block<2, 1>(b + 2, n - 1) = dR.imag();
  }
  out.J(n - 1, 2 + 2) = 1.0;  // Im of mode-1 first component
  return out;
}

struct newton_outcome {
  Eigen::VectorXd z;
  double residual;
  int iterations;
  bool converged;
};

inline newton_outcome newton(const comoving_problem& p, const galerkin& g, Eigen::VectorXd z, double tol, int max_iter) {
  newton_outcome o{z, 0, 0, false};
  system_eval s = evaluate(p, g, z, true);
  double r = s.F.norm();
  for (int it = 0; it < max_iter; ++it) {
    o.iterations = it;
    if (!std::isfinite(r)) break;
    if (r <= tol) {
      o.converged = true;
      break;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(s.J);
    Eigen::VectorXd dz = lu.solve(s.F);
    double step = 1.0;
    Eigen::VectorXd zn;
    system_eval sn;
    double rn = r;
    for (int ls = 0; ls < 8; ++ls) {
      zn = z - step * dz;
      sn = evaluate(p, g, zn, true);
      rn = sn.F.norm();
      if (std::isfinite(rn) && rn < r) break;
      step *= 0.5;
    }
    if (!(rn < r)) break;
    z = zn;
    s = std::move(sn);
    r = rn;
  }
  if (r <= tol) o.converged = true;
  o.z = z;
  o.residual = r;
  return o;
}

}  // namespace detail

inline std::vector<cvec2> predictor_coefficients(const stripe_expansion& e, const parameters& mu, double A, int N) {
  std::vector<cvec2> uh(2 * N + 1, cvec2::Zero());
  harmonic h = first_harmonic(e.lin, mu, A);
  // cos(x) a + sin(x) b = Re((a - i b) e^{ix})
  cvec2 u1 = (h.cos1.cast<cplx>() - cplx(0, 1) * h.sin1.cast<cplx>()) / 2.0;
  cplx ph = std::abs(u1(0)) > 0 ? std::conj(u1(0)) / std::abs(u1(0)) : cplx(1);
  uh[N + 1] = u1 * ph;
  uh[N - 1] = uh[N + 1].conjugate();
  if (N >= 2) {
    uh[N + 2] = (A * A / 2.0) * e.quad.Q2.cast<cplx>() * ph * ph;
    uh[N - 2] = uh[N + 2].conjugate();
  }
  uh[N] = (A * A) * e.quad.Q0.cast<cplx>();
  return uh;
}

inline numeric_stripe finish_stripe(const comoving_problem& p, int N, const detail::newton_outcome& o,
                                    const parameters& mu, double c_leading) {
  numeric_stripe s;
  s.N = N;
  detail::unpack(o.z, N, s.coeffs, s.omega);
  s.kappa = p.kappa;
  s.alpha_check = p.alpha_check;
  s.beta = p.beta;
  s.mu = mu;
  s.residual = o.residual;
  s.iterations = o.iterations;
  s.c = p.beta != 0 ? s.omega / (p.beta * p.kappa) : c_leading;
  double a1 = s.amplitude();
  s.trivial = a1 < 1e-10;
  s.truncation_warning = !s.trivial && s.mode(N).norm() > 1e-8 * a1;
  return s;
}

inline numeric_stripe solve_stripe_numeric(const rd_model& m, const stripe_expansion& e, const parameters& mu,
                                           const oracle_settings& cfg = {}) {
  if (cfg.N < 8) throw error(error_kind::validation, "solve_stripe_numeric: N must be at least 8");
  const auto& d = e.lin;
  const int N = cfg.N;
  comoving_problem p{&m, d.kc + mu.kappa_tilde, mu.alpha / d.lambda_M, mu.beta};
  galerkin g(N);
  double c0 = velocity(d, mu);
  auto A = amplitude(d, e.nl, mu);
  if (!A || *A == 0) {
    numeric_stripe s;
    s.N = N;
    s.coeffs.assign(2 * N + 1, cvec2::Zero());
    s.kappa = p.kappa;
    s.alpha_check = p.alpha_check;
    s.beta = mu.beta;
    s.mu = mu;
    s.c = c0;
    s.omega = mu.beta * p.kappa * c0;
    s.trivial = true;
    return s;
  }
  Eigen::VectorXd z0 = detail::pack(predictor_coefficients(e, mu, *A, N), mu.beta * p.kappa * c0, N);
  auto o = detail::newton(p, g, z0, cfg.tol, cfg.max_iter);
  bool continued = false;
  if (!o.converged || o.z.segment<2>(2).norm() < 1e-3 * (*A)) {
    // continuation in amplitude from near the bifurcation surface
    continued = true;
    double alpha_b = -(d.rho_kappa * mu.kappa_tilde * mu.kappa_tilde + d.rho_beta * mu.beta * mu.beta);
    Eigen::VectorXd z;
    bool have = false;
    for (int j = 1; j <= cfg.continuation_steps; ++j) {
      double Aj = (*A) * j / cfg.continuation_steps;
      parameters mj = mu;
      mj.alpha = alpha_b - e.nl.rho_nl * Aj * Aj;
      comoving_problem pj{&m, p.kappa, mj.alpha / d.lambda_M, mu.beta};
      Eigen::VectorXd start = have ? z : detail::pack(predictor_coefficients(e, mj, Aj, N), mu.beta * p.kappa * velocity(d, mj), N);
      auto oj = detail::newton(pj, g, start, cfg.tol, cfg.max_iter);
      if (!oj.converged) {
        std::ostringstream msg;
        msg << "solve_stripe_numeric: Newton did not converge (residual " << oj.residual << ")";
        throw error(error_kind::numerical, msg.str());
      }
      z = oj.z;
      have = true;
      o = oj;
    }
  }
  if (!o.converged) {
    std::ostringstream msg;
    msg << "solve_stripe_numeric: Newton did not converge (residual " << o.residual << ")";
    throw error(error_kind::numerical, msg.str());
  }
  numeric_stripe s = finish_stripe(p, N, o, mu, c0);
  s.continued = continued;
  return s;
}

inline Eigen::MatrixXcd assemble_bloch_matrix(const rd_model& m, const numeric_stripe& s, double gamma, double ell) {
  const int N = s.N, n = 2 * (2 * N + 1);
  comoving_problem p{&m, s.kappa, s.alpha_check, s.beta};
  galerkin g(N);
  auto C = g.coefficients(jacobian_field(m, g.field(s.coeffs)), 2 * N);
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(n, n);
  for (int a = -N; a <= N; ++a) {
    int ia = 2 * (a + N);
    T.block<2, 2>(ia, ia) += p.block(a + gamma, ell, s.omega);
    for (int b = -N; b <= N; ++b) T.block<2, 2>(ia, 2 * (b + N)) += C[a - b + 2 * N];
  }
  return T;
}

inline Eigen::VectorXcd bloch_eigenvalues(const Eigen::MatrixXcd& T) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(T, false);
  if (ces.info() != Eigen::Success) throw error(error_kind::numerical, "eigen-solver failed");
  return ces.eigenvalues();
}

struct tracked {
  cplx value;
  bool ambiguous = false;
};

inline tracked nearest_eigenvalue(const Eigen::VectorXcd& ev, cplx predictor) {
  tracked t;
  double best = std::numeric_limits<double>::infinity(), second = best;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double dist = std::abs(ev(i) - predictor);
    if (dist < best) {
      second = best;
      best = dist;
      t.value = ev(i);
    } else if (dist < second) {
      second = dist;
    }
  }
  t.ambiguous = second - best < 1e-10;
  return t;
}

inline tracked track_eigenvalue(const rd_model& m, const numeric_stripe& s, double gamma, double ell,
                                cplx predictor = 0.0) {
  return nearest_eigenvalue(bloch_eigenvalues(assemble_bloch_matrix(m, s, gamma, ell)), predictor);
}

enum class direction { gamma, ell };

struct curvature_result {
  double second = 0;      // Richardson-extrapolated d^2 Re(lambda) at 0
  double first_imag = 0;  // d Im(lambda) at 0 (gamma only)
  double error_estimate = 0;
  bool unreliable = false;
  bool ambiguous = false;
  double max_re = -std::numeric_limits<double>::infinity();  // over all sampled spectra
};

// Fourth-order central differences at steps h1 and h2 = h1/2, then Richardson extrapolation.
inline curvature_result curvature_fd(const rd_model& m, const numeric_stripe& s, direction dir,
                                     double h1 = 1e-3, double h2 = 5e-4) {
  curvature_result r;
  auto sample = [&](double t, cplx pred) {
    auto T = dir == direction::gamma ? assemble_bloch_matrix(m, s, t, 0) : assemble_bloch_matrix(m, s, 0, t);
    auto ev = bloch_eigenvalues(T);
    for (Eigen::Index i = 0; i < ev.size(); ++i) r.max_re = std::max(r.max_re, ev(i).real());
    auto tr = nearest_eigenvalue(ev, pred);
    r.ambiguous = r.ambiguous || tr.ambiguous;
    return tr.value;
  };
  cplx l0 = sample(0, 0.0);
  auto stencil = [&](double h, double& d2, double& d1) {
    cplx p1 = sample(h, l0), m1 = dir == direction::ell ? p1 : sample(-h, l0);
    cplx a = (p1 - m1) / (2 * h), b = (p1 + m1 - 2.0 * l0) / (2 * h * h);
    cplx p2 = sample(2 * h, l0 + 2 * h * a + 4 * h * h * b);
    cplx m2 = dir == direction::ell ? p2 : sample(-2 * h, l0 - 2 * h * a + 4 * h * h * b);
    d2 = ((-p2 + 16.0 * p1 - 30.0 * l0 + 16.0 * m1 - m2) / (12 * h * h)).real();
    d1 = ((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12 * h)).imag();
  };
  double s1, s2, f1, f2;
  stencil(h1, s1, f1);
  stencil(h2, s2, f2);
  double q = std::pow(h1 / h2, 4);
  r.second = (q * s2 - s1) / (q - 1);
  r.first_imag = (q * f2 - f1) / (q - 1);
  r.error_estimate = std::abs(s1 - s2);
  r.unreliable = r.error_estimate > 0.1 * std::abs(r.second);
  return r;
}

struct spectrum_point {
  double gamma, ell;
  cplx lambda;
};

struct spectrum_scan {
  double max_re = -std::numeric_limits<double>::infinity();
  double gamma_at = 0, ell_at = 0;
  std::vector<spectrum_point> points;  // every eigenvalue, when requested
};

inline spectrum_scan full_spectrum_scan(const rd_model& m, const numeric_stripe& s, const std::vector<double>& gammas,
                                        const std::vector<double>& ells, bool keep_all = false) {
  std::vector<std::pair<double, double>> grid;
  for (double gm : gammas)
    for (double l : ells) grid.push_back({gm, l});
  std::vector<Eigen::VectorXcd> evs(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    evs[i] = bloch_eigenvalues(assemble_bloch_matrix(m, s, grid[i].first, grid[i].second));
  });
  spectrum_scan out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (Eigen::Index j = 0; j < evs[i].size(); ++j) {
      cplx l = evs[i](j);
      if (keep_all) out.points.push_back({grid[i].first, grid[i].second, l});
      if (l.real() > out.max_re) {
        out.max_re = l.real();
        out.gamma_at = grid[i].first;
        out.ell_at = grid[i].second;
      }
    }
  return out;
}

struct map_point {
  double kappa_tilde = 0, alpha = 0;
  std::string label;
  double max_re_lambda = std::numeric_limits<double>::quiet_NaN();
  double zz_curvature = std::numeric_limits<double>::quiet_NaN();
  double eh_curvature = std::numeric_limits<double>::quiet_NaN();
  double A_numeric = std::numeric_limits<double>::quiet_NaN();
  double c_numeric = std::numeric_limits<double>::quiet_NaN();
};

inline map_point oracle_point(const rd_model& m, const stripe_expansion& e, const parameters& mu,
                              const oracle_settings& cfg) {
  map_point p;
  p.kappa_tilde = mu.kappa_tilde;
  p.alpha = mu.alpha;
  numeric_stripe s;
  try {
    s = solve_stripe_numeric(m, e, mu, cfg);
  } catch (const error& err) {
    if (err.kind() != error_kind::numerical) throw;
    p.label = "no-convergence";
    return p;
  }
  if (s.trivial) {
    p.label = region_name(region::no_stripes);
    return p;
  }
  auto zz = curvature_fd(m, s, direction::ell, cfg.h1, cfg.h2);
  auto eh = curvature_fd(m, s, direction::gamma, cfg.h1, cfg.h2);
  p.zz_curvature = 0.5 * zz.second;
  p.eh_curvature = 0.5 * eh.second;
  p.max_re_lambda = std::max(zz.max_re, eh.max_re);
  p.A_numeric = s.amplitude();
  p.c_numeric = s.c;
  auto unstable = [](const curvature_result& c) {
    return c.second > std::max(region_deadband, c.error_estimate);
  };
  p.label = region_name(label_from_signs(unstable(zz), unstable(eh)));
  return p;
}

inline std::vector<map_point> stability_map(const rd_model& m, const stripe_expansion& e,
                                            const std::vector<double>& alphas, const std::vector<double>& kappas,
                                            double beta, const oracle_settings& cfg) {
  std::vector<map_point> out(alphas.size() * kappas.size());
  parallel_for(out.size(), [&](std::size_t i) {
    parameters mu{alphas[i / kappas.size()], beta, kappas[i % kappas.size()]};
    out[i] = oracle_point(m, e, mu, cfg);
  });
  return out;
}

inline std::vector<map_point> analytic_map(const stripe_expansion& e, const sideband_coefficients& sb,
                                           const std::vector<double>& alphas, const std::vector<double>& kappas,
                                           double beta) {
  std::vector<map_point> out;
  out.reserve(alphas.size() * kappas.size());
  for (double a : alphas)
    for (double k : kappas) {
      parameters mu{a, beta, k};
      map_point p;
      p.kappa_tilde = k;
      p.alpha = a;
      region r = classify_region(e, sb, mu);
      p.label = region_name(r);
      if (r != region::no_stripes) {
        p.zz_curvature = zigzag_curvature(e, sb, mu);
        p.eh_curvature = eckhaus_spectrum_coefficients(e, mu).second;
        p.A_numeric = *amplitude(e.lin, e.nl, mu);
        p.c_numeric = velocity(e.lin, mu);
      }
      out.push_back(p);
    }
  return out;
}

}  // namespace stripeband
