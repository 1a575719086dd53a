#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "turing.hpp"

namespace stripeband {

struct correction_set {
  vec2 wa, wb, wk, wbb;      // primal, <w, E0*> = 0
  vec2 was, wbs, wks, wbbs;  // adjoint, <w*, E0> = 0
  double max_residual = 0;
  double max_constraint = 0;
  double max_consistency = 0;  // bordered multiplier, zero iff the rhs is in the range
};

inline correction_set correction_vectors(const rd_model& m, const turing_core& t, double c) {
  const mat2 L0 = t.L0(), L0t = L0.transpose(), D = m.D(), B = advection(c), Mt = m.M.transpose();
  const vec2 &E = t.E0, &Es = t.E0s;
  const double kc = t.kc;
  correction_set w;
  auto take = [&](const mat2& A, const vec2& rhs, const vec2& con) {
    bordered_result r = bordered_solve(A, rhs, con);
    double scale = std::max(1.0, rhs.norm());
    w.max_residual = std::max(w.max_residual, r.residual / scale);
    w.max_constraint = std::max(w.max_constraint, std::abs(con.dot(r.w)) / std::max(1.0, r.w.norm()));
    w.max_consistency = std::max(w.max_consistency, std::abs(r.s) / scale);
    return r.w;
  };
  w.wa = take(L0, (m.M * E).dot(Es) * E - m.M * E, Es);
  w.wb = take(L0, kc * ((B * E).dot(Es) * E - B * E), Es);
  w.wk = take(L0, 2 * kc * D * E, Es);
  w.wbb = take(L0, 2 * kc * (B * w.wb - (B * w.wb).dot(Es) * E), Es);
  w.was = take(L0t, (Mt * Es).dot(E) * Es - Mt * Es, E);
  w.wbs = take(L0t, kc * ((B * Es).dot(E) * Es - B * Es), E);
  w.wks = take(L0t, 2 * kc * D * Es, E);
  w.wbbs = take(L0t, 2 * kc * (B * w.wbs - (B * w.wbs).dot(E) * Es), E);
  if (w.max_consistency > 1e-10)
    throw error(error_kind::numerical, "correction_vectors: right-hand side not orthogonal to adjoint kernel");
  return w;
}

struct cross_check {
  std::string name;
  double dispersion;
  double inner_product;
  double rel;
};

inline double rel_diff(double a, double b) {
  double s = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / s;
}

struct turing_data {
  double kc = 0;
  vec2 E0, E0s;
  double c0 = 0, c0s = 0;
  std::array<double, 4> b{};
  double c = 0;  // comoving frame, -lambda_beta
  double aM = 1;
  double lambda_beta = 0, lambda_betabeta = 0, lambda_M = 0, lambda_Mbeta = 0, lambda_Mkappa = 0,
         lambda_kappabeta = 0;
  double rho_beta = 0, rho_kappa = 0, gamma_beta = 0, gamma_kappabeta = 0;
  double lambda_Mbeta_closed = 0;
  std::vector<cross_check> checks;
  correction_set w;

  turing_core core() const {
    turing_core t;
    t.kc = kc;
    t.b = b;
    t.E0 = E0;
    t.E0s = E0s;
    t.c0 = c0;
    t.c0s = c0s;
    return t;
  }
  // raw imaginary drift coefficient in an arbitrary frame
  double gamma_beta_at(double frame_c) const { return kc * (lambda_beta + frame_c); }
  double max_discrepancy() const {
    double r = 0;
    for (const auto& x : checks) r = std::max(r, x.rel);
    return r;
  }
};

inline constexpr double lambda_M_tolerance = 1e-8;
inline constexpr double cross_check_tolerance = 1e-8;

inline turing_data linear_coefficients(const rd_model& m, const turing_core& t) {
  turing_data d;
  d.kc = t.kc;
  d.E0 = t.E0;
  d.E0s = t.E0s;
  d.c0 = t.c0;
  d.c0s = t.c0s;
  d.b = t.b;
  d.aM = m.aM();
  double lb = lambda_beta_closed(t);
  d.c = -lb;
  dispersion_coefficients dc = dispersion_route(m, t.kc, d.c);
  if (std::abs(dc.lambda_M) < lambda_M_tolerance)
    throw error(error_kind::numerical, "degenerate unfolding: lambda_M vanishes");
  d.w = correction_vectors(m, t, d.c);

  const mat2 D = m.D(), B = advection(d.c);
  const vec2 &E = t.E0, &Es = t.E0s;
  const double kc = t.kc;
  const auto& w = d.w;
  double lM_ip = (m.M * E).dot(Es);
  double rb_ip = -kc * (B * w.wb).dot(Es);
  double rk_ip = -2 * kc * (D * w.wk).dot(Es);
  double gb_ip = kc * (B * E).dot(Es);
  double gkb_ip = kc * (B * w.wk - 2 * D * w.wb).dot(Es) + (B * E).dot(Es);
  double lMb_ip = (m.M * w.wb + kc * B * w.wa).dot(Es) / lM_ip;
  double lMk_ip = (m.M * w.wk - 2 * kc * D * w.wa).dot(Es) / lM_ip;

  d.lambda_beta = dc.lambda_beta;
  d.lambda_betabeta = dc.lambda_betabeta;
  d.lambda_M = dc.lambda_M;
  d.lambda_Mbeta = m.M_identity ? 0.0 : dc.lambda_Mbeta;
  d.lambda_Mkappa = m.M_identity ? 0.0 : dc.lambda_Mkappa;
  d.lambda_kappabeta = dc.lambda_kappabeta;
  d.rho_beta = dc.rho_beta;
  d.rho_kappa = dc.rho_kappa;
  d.gamma_beta = dc.gamma_beta;
  d.gamma_kappabeta = dc.gamma_kappabeta;
  d.lambda_Mbeta_closed = lambda_Mbeta_closed(m, t, d.lambda_M);

  auto add = [&](const char* n, double a, double b) { d.checks.push_back({n, a, b, rel_diff(a, b)}); };
  add("lambda_M", dc.lambda_M, lM_ip);
  add("rho_beta", dc.rho_beta, rb_ip);
  add("rho_kappa", dc.rho_kappa, rk_ip);
  add("gamma_kappabeta", dc.gamma_kappabeta, gkb_ip);
  if (!m.M_identity) {
    add("lambda_Mbeta", dc.lambda_Mbeta, lMb_ip);
    add("lambda_Mkappa", dc.lambda_Mkappa, lMk_ip);
  }
  // gamma_beta vanishes in this frame; compare absolute values
  d.checks.push_back({"gamma_beta", dc.gamma_beta, gb_ip, std::abs(dc.gamma_beta - gb_ip)});
  add("lambda_beta(closed)", dc.lambda_beta, lb);
  add("lambda_betabeta(closed)", dc.lambda_betabeta, lambda_betabeta_closed(t));
  add("rho_kappa(closed)", dc.rho_kappa, rho_kappa_closed(m, kc));
  add("lambda_M(closed)", dc.lambda_M, lambda_M_closed(m, t));
  if (d.max_discrepancy() > cross_check_tolerance)
    throw error(error_kind::numerical, "linear_coefficients: dispersion and inner-product routes disagree");
  return d;
}

inline turing_data analyze_linear(const rd_model& m) { return linear_coefficients(m, turing_core_of(m)); }

inline cplx critical_eigenvalue(const turing_data& d, const parameters& mu) {
  const double a = mu.alpha, b = mu.beta, k = mu.kappa_tilde;
  double re = a + d.rho_beta * b * b + d.rho_kappa * k * k + d.aM * d.lambda_Mkappa * a * k;
  double im = (d.gamma_beta + d.gamma_kappabeta * k + d.aM * d.lambda_Mbeta * a) * b;
  return {re, im};
}

struct quadratic_set {
  vec2 Q0, Q2, Q2s;
};

inline quadratic_set quadratic_vectors(const rd_model& m, const turing_data& d) {
  const double k2 = d.kc * d.kc;
  const mat2 D = m.D();
  vec2 QEE = quad_form(m, d.E0, d.E0);
  quadratic_set q;
  q.Q0 = -2 * solve2(m.L, QEE, "quadratic_vectors (L)");
  q.Q2 = -2 * solve2(-4 * k2 * D + m.L, QEE, "quadratic_vectors (-4kc^2 D + L)");
  mat2 J = quad_matrix(m, d.E0);
  q.Q2s = -2 * solve2(-4 * k2 * D + m.L.transpose(), J.transpose() * d.E0s, "quadratic_vectors (adjoint)");
  return q;
}

struct nonlinear_set {
  double q0 = 0, q2 = 0, k0 = 0, rho_nl = 0;
  bool supercritical = false;
};

inline nonlinear_set nonlinear_coefficient(const rd_model& m, const turing_data& d, const quadratic_set& q) {
  nonlinear_set n;
  n.q0 = quad_form(m, d.E0, q.Q0).dot(d.E0s);
  n.q2 = quad_form(m, d.E0, q.Q2).dot(d.E0s);
  n.k0 = cubic_form(m, d.E0, d.E0, d.E0).dot(d.E0s);
  n.rho_nl = 3 * n.k0 + 2 * n.q0 + n.q2;
  n.supercritical = n.rho_nl < 0;
  return n;
}

struct stripe_expansion {
  turing_data lin;
  quadratic_set quad;
  nonlinear_set nl;
};

inline stripe_expansion expand(const rd_model& m) {
  stripe_expansion e;
  e.lin = analyze_linear(m);
  e.quad = quadratic_vectors(m, e.lin);
  e.nl = nonlinear_coefficient(m, e.lin, e.quad);
  return e;
}

// Leading-order real part of the critical eigenvalue (the amplitude radicand numerator).
inline double growth_rate(const turing_data& d, const parameters& mu) {
  return mu.alpha + d.rho_beta * mu.beta * mu.beta + d.rho_kappa * mu.kappa_tilde * mu.kappa_tilde;
}

inline std::optional<double> amplitude(const turing_data& d, const nonlinear_set& n, const parameters& mu) {
  if (!(n.rho_nl < 0)) throw error(error_kind::validation, "amplitude: subcritical branch (rho_nl >= 0)");
  double g = growth_rate(d, mu);
  if (g < 0) return std::nullopt;
  return std::sqrt(-g / n.rho_nl);
}

// alpha placing the leading-order amplitude at A for given beta, kappa_tilde.
inline double alpha_for_amplitude(const turing_data& d, const nonlinear_set& n, double A, double beta,
                                  double kappa_tilde) {
  return -n.rho_nl * A * A - d.rho_beta * beta * beta - d.rho_kappa * kappa_tilde * kappa_tilde;
}

inline double velocity(const turing_data& d, const parameters& mu) {
  return -d.lambda_beta - d.lambda_Mbeta / d.kc * d.aM * mu.alpha -
         (d.lambda_kappabeta - d.lambda_beta) / d.kc * mu.kappa_tilde;
}

// First harmonic amplitude vector (cos part, sin part) of the leading-order stripe.
struct harmonic {
  vec2 cos1, sin1;
};

inline harmonic first_harmonic(const turing_data& d, const parameters& mu, double A) {
  const auto& w = d.w;
  double ach = mu.alpha / d.lambda_M;
  harmonic h;
  h.cos1 = 2 * A * (d.E0 + mu.kappa_tilde * w.wk + ach * w.wa + mu.beta * mu.beta * w.wbb);
  h.sin1 = -2 * A * mu.beta * w.wb;
  return h;
}

struct profile_point {
  double x;
  vec2 u;
};

inline std::vector<profile_point> stripe_profile(const stripe_expansion& e, const parameters& mu,
                                                 const std::vector<double>& xs) {
  std::vector<profile_point> out;
  auto A = amplitude(e.lin, e.nl, mu);
  if (!A) return out;
  harmonic h = first_harmonic(e.lin, mu, *A);
  for (double x : xs) {
    vec2 u = h.cos1 * std::cos(x) + h.sin1 * std::sin(x) + (*A) * (*A) * e.quad.Q2 * std::cos(2 * x) +
             (*A) * (*A) * e.quad.Q0;
    out.push_back({x, u});
  }
  return out;
}

struct direction_result {
  int sign;
  bool degenerate;
  bool consistent;  // agrees with sgn(-lambda_beta)
};

inline direction_result motion_direction(const rd_model& m) {
  direction_result r{};
  r.sign = -static_cast<int>(sgn(m.a1()));
  r.degenerate = m.a1() == 0;
  turing_core t = turing_core_of(m);
  r.consistent = r.sign == static_cast<int>(sgn(-lambda_beta_closed(t)));
  return r;
}

}  // namespace stripeband
