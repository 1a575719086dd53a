#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "expansion.hpp"

namespace stripeband {

struct sideband_coefficients {
  double rho_alpha = 0;
  double rho_betabeta = 0;
  double q22 = 0;
  // rho_alpha including the O(A^2) first-harmonic corrections of the stripe and its adjoint
  double rho_alpha_amplitude_corrected = 0;
  // bracket <DE0,w*_bb> + <Dw_bb,E0*> - <Dw_b,w*_b>
  double betabeta_bracket = 0;
  double kc = 0, rho_kappa = 0, rho_beta = 0, rho_nl = 0, lambda_kappabeta = 0, lambda_beta = 0;
};

inline sideband_coefficients zigzag_coefficients(const rd_model& m, const stripe_expansion& e) {
  const auto& d = e.lin;
  const auto& w = d.w;
  const mat2 D = m.D();
  const vec2 &E = d.E0, &Es = d.E0s;
  const double k2 = d.kc * d.kc;
  sideband_coefficients s;
  s.kc = d.kc;
  s.rho_kappa = d.rho_kappa;
  s.rho_beta = d.rho_beta;
  s.rho_nl = e.nl.rho_nl;
  s.lambda_kappabeta = d.lambda_kappabeta;
  s.lambda_beta = d.lambda_beta;
  const double rnl = e.nl.rho_nl;
  if (rnl == 0) throw error(error_kind::numerical, "zigzag_coefficients: rho_nl = 0");
  s.q22 = -k2 * (D * e.quad.Q2).dot(e.quad.Q2s);
  double alpha_bracket = (D * E).dot(w.was) + (D * w.wa).dot(Es);
  s.rho_alpha = -d.aM * k2 * alpha_bracket / d.lambda_M - s.q22 / rnl;
  s.betabeta_bracket = (D * E).dot(w.wbbs) + (D * w.wbb).dot(Es) - (D * w.wb).dot(w.wbs);
  s.rho_betabeta = -k2 * s.betabeta_bracket - s.q22 * d.rho_beta / rnl;

  const mat2 L0 = d.core().L0();
  const auto& q = e.quad;
  vec2 r = -(2 * quad_form(m, E, q.Q0) + quad_form(m, E, q.Q2) + 3 * cubic_form(m, E, E, E)) + e.nl.rho_nl * E;
  vec2 rs = 2 * quad_matrix(m, q.Q0).transpose() * Es - quad_matrix(m, q.Q2).transpose() * Es +
            2 * quad_matrix(m, E).transpose() * q.Q2s + 3 * cubic_matrix(m, E, E).transpose() * Es;
  rs = -rs + e.nl.rho_nl * Es;
  vec2 wnl = bordered_solve(L0, r, Es).w;
  vec2 wnls = bordered_solve(L0.transpose(), rs, E).w;
  s.rho_alpha_amplitude_corrected = s.rho_alpha + k2 * ((D * E).dot(wnls) + (D * wnl).dot(Es)) / rnl;
  return s;
}

inline double rho_betabeta_closed_form(const rd_model& m, const turing_core& t) {
  if (m.has_quadratic()) throw error(error_kind::validation, "rho_betabeta_closed_form requires Q = 0");
  double b1 = t.b[0], b3 = t.b[2], b4 = t.b[3], s = b1 + b4, k4 = std::pow(t.kc, 4);
  return k4 * b3 * b3 * m.d1 / (b1 * b1 * s * s * s * s) * b4 * (5 * b1 + b4);
}

struct boundary_values {
  double alpha_bif = 0;
  double alpha_eckhaus = 0;
  std::optional<double> alpha_zigzag;
  std::optional<double> kappa_zigzag;  // vertical zigzag line when rho_alpha = 0
  double alpha_tilde_eckhaus = 0;
  std::optional<double> alpha_tilde_zigzag;
};

inline boundary_values boundaries(const sideband_coefficients& s, double kt, double beta) {
  boundary_values b;
  double b2 = beta * beta;
  b.alpha_bif = -(s.rho_kappa * kt * kt + s.rho_beta * b2);
  b.alpha_eckhaus = -3 * s.rho_kappa * kt * kt - s.rho_beta * b2;
  b.alpha_tilde_eckhaus = -3 * s.rho_kappa * kt * kt;
  if (s.rho_alpha != 0) {
    b.alpha_zigzag = -(s.kc * s.rho_kappa * kt + s.rho_betabeta * b2) / s.rho_alpha;
    b.alpha_tilde_zigzag = -(s.kc * s.rho_kappa * kt + (s.rho_betabeta - s.rho_alpha * s.rho_beta) * b2) / s.rho_alpha;
  } else {
    b.kappa_zigzag = -s.rho_betabeta * b2 / (s.kc * s.rho_kappa);
  }
  return b;
}

inline double zigzag_curvature(const stripe_expansion& e, const sideband_coefficients& s, const parameters& mu) {
  if (!amplitude(e.lin, e.nl, mu)) throw error(error_kind::validation, "zigzag_curvature: no stripe at these parameters");
  return s.kc * s.rho_kappa * mu.kappa_tilde + s.rho_alpha * mu.alpha + s.rho_betabeta * mu.beta * mu.beta;
}

// Leading-order coefficients of lambda_eh = i*first*gamma + second*gamma^2.
struct eckhaus_coefficients {
  double first_imag = 0;
  double second = 0;
};

inline eckhaus_coefficients eckhaus_spectrum_coefficients(const stripe_expansion& e, const parameters& mu) {
  auto A = amplitude(e.lin, e.nl, mu);
  if (!A || *A == 0) throw error(error_kind::numerical, "eckhaus_spectrum: zero amplitude");
  const auto& d = e.lin;
  eckhaus_coefficients c;
  c.first_imag = d.kc * (d.lambda_kappabeta - d.lambda_beta) * mu.beta;
  double g = mu.alpha + d.rho_beta * mu.beta * mu.beta + 3 * d.rho_kappa * mu.kappa_tilde * mu.kappa_tilde;
  c.second = -d.kc * d.kc * (d.rho_kappa / e.nl.rho_nl) / ((*A) * (*A)) * g;
  return c;
}

inline cplx eckhaus_spectrum(const stripe_expansion& e, const parameters& mu, double gamma) {
  auto c = eckhaus_spectrum_coefficients(e, mu);
  return {c.second * gamma * gamma, c.first_imag * gamma};
}

enum class region { no_stripes, stable, eckhaus_unstable, zigzag_unstable, both_unstable };

inline const char* region_name(region r) {
  switch (r) {
    case region::no_stripes: return "no-stripes";
    case region::stable: return "stable";
    case region::eckhaus_unstable: return "eckhaus-unstable";
    case region::zigzag_unstable: return "zigzag-unstable";
    case region::both_unstable: return "both-unstable";
  }
  return "?";
}

inline region label_from_signs(bool zz_unstable, bool eh_unstable) {
  if (zz_unstable && eh_unstable) return region::both_unstable;
  if (zz_unstable) return region::zigzag_unstable;
  if (eh_unstable) return region::eckhaus_unstable;
  return region::stable;
}

inline constexpr double region_deadband = 1e-10;

inline region classify_region(const stripe_expansion& e, const sideband_coefficients& s, const parameters& mu,
                              double eps = region_deadband) {
  if (!(growth_rate(e.lin, mu) > eps)) return region::no_stripes;
  double zz = zigzag_curvature(e, s, mu);
  double eh = eckhaus_spectrum_coefficients(e, mu).second;
  return label_from_signs(zz > eps, eh > eps);
}

inline std::string zigzag_scenario(const sideband_coefficients& s, double beta) {
  auto sign_tol = [](double x, double scale) { return std::abs(x) <= 1e-12 * std::max(1.0, scale) ? 0 : (x > 0 ? 1 : -1); };
  if (beta == 0) {
    int r = sign_tol(s.rho_alpha, 1.0);
    return r < 0 ? "(i)" : r == 0 ? "(ii)" : "(iii)";
  }
  if (sign_tol(s.rho_alpha, 1.0) == 0) {
    int r = sign_tol(s.rho_betabeta, 1.0);
    return r < 0 ? "(A)" : r == 0 ? "(B)" : "(C)";
  }
  if (sign_tol(s.rho_betabeta, 1.0) == 0) return "(2)";
  double ratio = s.rho_betabeta / s.rho_alpha;
  if (ratio < 0) return "(1)";
  int cmp = sign_tol(ratio - s.rho_beta, s.rho_beta);
  return cmp < 0 ? "(3)" : cmp == 0 ? "(4)" : "(5)";
}

}  // namespace stripeband
