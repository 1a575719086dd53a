#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "jet.hpp"
#include "model.hpp"

namespace stripeband {

struct parameters {
  double alpha = 0;
  double beta = 0;
  double kappa_tilde = 0;

  double alpha_check(double lambda_M) const { return alpha / lambda_M; }
};

inline double critical_wavenumber(const rd_model& m) {
  double num = m.d1 * m.a4() + m.d2 * m.a1();
  if (!(num > 0)) throw error(error_kind::validation, "not at Turing instability: d1*a4 + d2*a1 <= 0");
  return std::sqrt(num / (2 * m.d1 * m.d2));
}

// Symbol of the linear operator, -(k^2 + l^2) D + L + a M + i k beta B(c).
inline cmat2 symbol(const rd_model& m, double k, double ell, double alpha_check, double beta, double c) {
  cmat2 A = (-(k * k + ell * ell) * m.D() + m.L + alpha_check * m.M).cast<cplx>();
  A += cplx(0, k * beta) * advection(c).cast<cplx>();
  return A;
}

inline cplx dispersion(const rd_model& m, cplx lambda, double k, double ell, double alpha_check, double beta,
                       double c) {
  cmat2 A = symbol(m, k, ell, alpha_check, beta, c);
  return (A(0, 0) - lambda) * (A(1, 1) - lambda) - A(0, 1) * A(1, 0);
}

inline std::array<cplx, 2> eigenvalues2(const cmat2& A) {
  cplx tr = A.trace(), det = A.determinant();
  cplx disc = std::sqrt(tr * tr / 4.0 - det);
  return {tr / 2.0 + disc, tr / 2.0 - disc};
}

inline double max_re_eigenvalue(const cmat2& A) {
  auto ev = eigenvalues2(A);
  return std::max(ev[0].real(), ev[1].real());
}

struct neutral_sample {
  double k;
  double max_re;
};

struct turing_check {
  bool pass = false;
  bool homogeneous_stable = false;
  bool critical_only_at_kc = false;
  bool dlambda_nonzero = false;
  double kc = 0;
  double re_at_kc = 0;
  double max_re_off_kc = 0;
  double dlambda_d = 0;
  std::vector<neutral_sample> curve;
  std::string reason;
};

inline turing_check check_turing(const rd_model& m, int points = 2001, double kmax_factor = 4.0,
                                 double tol = 1e-8, double resolution = 0.0) {
  turing_check out;
  double tr = m.L.trace(), det = m.L.determinant();
  out.homogeneous_stable = tr < 0 && det > 0;
  double s = m.d1 * m.a4() + m.d2 * m.a1();
  double kref = s > 0 ? std::sqrt(s / (2 * m.d1 * m.d2)) : 1.0;
  out.kc = s > 0 ? kref : 0.0;
  if (points < 2) throw error(error_kind::validation, "check_turing: need at least two grid points");
  double kmax = kmax_factor * kref, dk = kmax / (points - 1);
  if (resolution > 0 && dk > resolution)
    throw error(error_kind::validation, "check_turing: grid spacing exceeds requested resolution");

  auto re_at = [&](double k) { return max_re_eigenvalue(symbol(m, k, 0, 0, 0, 0)); };
  double global = -1e300, off = -1e300;
  bool near_only = true;
  for (int i = 0; i < points; ++i) {
    double k = i * dk, r = re_at(k);
    out.curve.push_back({k, r});
    global = std::max(global, r);
    bool near = s > 0 && std::abs(k - kref) <= 1.5 * dk;
    if (!near) off = std::max(off, r);
    if (r > -tol && !near) near_only = false;
  }
  out.max_re_off_kc = off;
  if (s > 0) {
    out.re_at_kc = re_at(kref);
    mat2 L0 = -kref * kref * m.D() + m.L;
    out.dlambda_d = -L0.trace();
    out.dlambda_nonzero = std::abs(out.dlambda_d) > 1e-12;
    out.critical_only_at_kc = std::abs(out.re_at_kc) <= tol && global <= tol && near_only;
  }
  out.pass = out.homogeneous_stable && out.critical_only_at_kc && out.dlambda_nonzero;
  if (!out.homogeneous_stable)
    out.reason = "homogeneous spectrum not stable";
  else if (s <= 0)
    out.reason = "no critical wavenumber: d1*a4 + d2*a1 <= 0";
  else if (global > tol)
    out.reason = "unstable band of wavenumbers";
  else if (std::abs(out.re_at_kc) > tol)
    out.reason = "spectrum does not touch zero at k_c";
  else if (!near_only)
    out.reason = "spectrum touches zero away from k_c";
  else if (!out.dlambda_nonzero)
    out.reason = "degenerate: d_lambda d = 0";
  return out;
}

struct turing_core {
  double kc = 0;
  std::array<double, 4> b{};  // entries of -kc^2 D + L, row major
  vec2 E0, E0s;
  double c0 = 0, c0s = 0;
  mat2 L0() const {
    mat2 A;
    A << b[0], b[1], b[2], b[3];
    return A;
  }
};

inline turing_core kernel_vectors(const rd_model& m, double kc) {
  turing_core t;
  t.kc = kc;
  mat2 L0 = -kc * kc * m.D() + m.L;
  t.b = {L0(0, 0), L0(0, 1), L0(1, 0), L0(1, 1)};
  double b1 = t.b[0], b2 = t.b[1], b3 = t.b[2];
  double scale = std::max(1.0, L0.cwiseAbs().maxCoeff());
  if (std::abs(L0.determinant()) > 1e-9 * scale * scale)
    throw error(error_kind::numerical, "kernel_vectors: -kc^2 D + L is not singular");
  if (b1 == 0) throw error(error_kind::numerical, "kernel_vectors: degenerate normalization (b1 = 0)");
  t.c0 = std::hypot(b2, b1);
  t.E0 = vec2(b2, -b1) / t.c0;
  t.c0s = (b2 * b3 + b1 * b1) / t.c0;
  t.E0s = vec2(b3, -b1) / t.c0s;
  return t;
}

inline turing_core turing_core_of(const rd_model& m) { return kernel_vectors(m, critical_wavenumber(m)); }

// Coefficients of the critical eigenvalue obtained by implicit differentiation of d = 0.
struct dispersion_coefficients {
  double lambda_k = 0;  // vanishes at k_c
  double lambda_beta = 0, lambda_betabeta = 0;
  double lambda_M = 0, lambda_Mbeta = 0, lambda_Mkappa = 0, lambda_kappabeta = 0;
  double rho_beta = 0, rho_kappa = 0, gamma_beta = 0, gamma_kappabeta = 0;
  double dlambda_d = 0;
};

using djet = jet2<4>;  // variables: lambda, k, alpha_check, beta

inline djet dispersion_jet(const rd_model& m, double kc, double c) {
  const cplx I(0, 1);
  djet lam = djet::variable(0, 0.0), k = djet::variable(1, kc), a = djet::variable(2, 0.0),
       be = djet::variable(3, 0.0);
  auto C = [](double x) { return djet::constant(x); };
  djet k2 = k * k, ikb = I * (k * be);
  djet A11 = C(m.a1()) - C(m.d1) * k2 + C(m.M(0, 0)) * a + cplx(1 + c) * ikb - lam;
  djet A12 = C(m.a2()) + C(m.M(0, 1)) * a;
  djet A21 = C(m.a3()) + C(m.M(1, 0)) * a;
  djet A22 = C(m.a4()) - C(m.d2) * k2 + C(m.M(1, 1)) * a + cplx(c) * ikb - lam;
  return A11 * A22 - A12 * A21;
}

inline dispersion_coefficients dispersion_route(const rd_model& m, double kc, double c) {
  djet F = dispersion_jet(m, kc, c);
  auto r = implicit_derivatives(F);
  dispersion_coefficients o;
  o.dlambda_d = F.g[0].real();
  o.lambda_k = std::abs(r.d[1]);
  o.lambda_M = r.d[2].real();
  o.gamma_beta = r.d[3].imag();
  o.lambda_beta = o.gamma_beta / kc - c;
  o.rho_beta = 0.5 * r.dd[3][3].real();
  o.lambda_betabeta = o.rho_beta / (kc * kc);
  o.rho_kappa = 0.5 * r.dd[1][1].real();
  o.gamma_kappabeta = r.dd[1][3].imag();
  o.lambda_kappabeta = o.gamma_kappabeta - c;
  if (std::abs(o.lambda_M) > 0) {
    o.lambda_Mkappa = r.dd[1][2].real() / o.lambda_M;
    o.lambda_Mbeta = r.dd[2][3].imag() / o.lambda_M;
  }
  return o;
}

// Closed expressions in terms of the b_i.
inline double lambda_beta_closed(const turing_core& t) { return t.b[3] / (t.b[0] + t.b[3]); }
inline double lambda_betabeta_closed(const turing_core& t) {
  double s = t.b[0] + t.b[3];
  return t.b[0] * t.b[3] / (s * s * s);
}
inline double rho_kappa_closed(const rd_model& m, double kc) {
  return 2 * (m.d1 * m.a4() + m.d2 * m.a1()) / (m.a1() + m.a4() - (m.d1 + m.d2) * kc * kc);
}
inline double lambda_M_closed(const rd_model& m, const turing_core& t) {
  return (m.M(0, 0) * t.b[3] - m.M(0, 1) * m.a3() - m.M(1, 0) * m.a2() + m.M(1, 1) * t.b[0]) / (t.b[0] + t.b[3]);
}
inline double lambda_Mbeta_closed(const rd_model& m, const turing_core& t, double lambda_M) {
  double lb = lambda_beta_closed(t), s = t.b[0] + t.b[3];
  return t.kc * (m.M(1, 1) - lambda_M - (2 * lambda_M - m.M(0, 0) - m.M(1, 1)) * lb) / (lambda_M * s);
}

// Zero eigenvalue of [[b1 + i delta, b2], [b3, b4]] and its expansion coefficients.
inline cplx perturbed_zero_eigenvalue(const std::array<double, 4>& b, double delta) {
  cmat2 A;
  A << cplx(b[0], delta), b[1], b[2], b[3];
  auto ev = eigenvalues2(A);
  return std::abs(ev[0]) < std::abs(ev[1]) ? ev[0] : ev[1];
}

struct zero_eigenvalue_expansion {
  double lambda_1, lambda_2;
};

inline zero_eigenvalue_expansion zero_eigenvalue_coefficients(const std::array<double, 4>& b) {
  double s = b[0] + b[3];
  return {b[3] / s, b[0] * b[3] / (s * s * s)};
}

struct squire_sample {
  double theta, k, ell, max_re;
};

struct squire_result {
  std::vector<squire_sample> samples;
  double k_argmax = 0, ell_argmax = 0, max_re = 0;
  double re_at_k0 = 0;
  bool argmax_at_ell0 = false;
};

// Samples the critical circle k^2 + l^2 = kc^2 for theta in [0, pi/2] (the spectrum is even in k and l).
inline squire_result squire_scan(const rd_model& m, double kc, double alpha_check, double beta, double c,
                                 int n = 181) {
  squire_result r;
  const double pi = std::acos(-1.0);
  double best = -1e300;
  int ibest = 0;
  for (int i = 0; i < n; ++i) {
    double th = 0.5 * pi * i / (n - 1);
    double k = kc * std::cos(th), ell = kc * std::sin(th);
    if (i == n - 1) k = 0;
    double re = max_re_eigenvalue(symbol(m, k, ell, alpha_check, beta, c));
    r.samples.push_back({th, k, ell, re});
    if (re > best) {
      best = re;
      ibest = i;
    }
  }
  r.k_argmax = r.samples[ibest].k;
  r.ell_argmax = r.samples[ibest].ell;
  r.max_re = best;
  r.re_at_k0 = r.samples.back().max_re;
  r.argmax_at_ell0 = ibest == 0;
  return r;
}

}  // namespace stripeband
