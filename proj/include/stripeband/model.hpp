#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace stripeband {

// Cubic coefficients T[j][k][l] stored flat at 4j + 2k + l.
using tensor3 = std::array<double, 8>;

inline constexpr int tidx(int j, int k, int l) { return 4 * j + 2 * k + l; }

struct rd_model {
  double d1 = 1, d2 = 1;
  mat2 L = mat2::Zero();
  mat2 M = mat2::Identity();
  std::array<mat2, 2> S{mat2::Zero(), mat2::Zero()};
  std::array<tensor3, 2> T{};
  bool M_identity = true;
  std::string name;

  mat2 D() const { return vec2(d1, d2).asDiagonal(); }
  double a1() const { return L(0, 0); }
  double a2() const { return L(0, 1); }
  double a3() const { return L(1, 0); }
  double a4() const { return L(1, 1); }
  double aM() const { return M_identity ? 0.0 : 1.0; }
  bool has_quadratic() const { return !(S[0].isZero(0) && S[1].isZero(0)); }
};

// B(c) = diag(1 + c, c)
inline mat2 advection(double c) {
  mat2 B = mat2::Zero();
  B(0, 0) = 1 + c;
  B(1, 1) = c;
  return B;
}

template <class Vec>
Vec quad_form(const rd_model& m, const Vec& u, const Vec& v) {
  Vec out;
  for (int i = 0; i < 2; ++i) {
    typename Vec::Scalar acc = 0;
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) acc += m.S[i](j, k) * u(j) * v(k);
    out(i) = acc;
  }
  return out;
}

template <class Vec>
Vec cubic_form(const rd_model& m, const Vec& u, const Vec& v, const Vec& w) {
  Vec out;
  for (int i = 0; i < 2; ++i) {
    typename Vec::Scalar acc = 0;
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) acc += m.T[i][tidx(j, k, l)] * u(j) * v(k) * w(l);
    out(i) = acc;
  }
  return out;
}

// Matrix of v -> Q[u, v].
template <class Vec>
Eigen::Matrix<typename Vec::Scalar, 2, 2> quad_matrix(const rd_model& m, const Vec& u) {
  Eigen::Matrix<typename Vec::Scalar, 2, 2> J;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) J(i, k) = m.S[i](0, k) * u(0) + m.S[i](1, k) * u(1);
  return J;
}

// Matrix of w -> K[u, v, w].
template <class Vec>
Eigen::Matrix<typename Vec::Scalar, 2, 2> cubic_matrix(const rd_model& m, const Vec& u, const Vec& v) {
  Eigen::Matrix<typename Vec::Scalar, 2, 2> J = Eigen::Matrix<typename Vec::Scalar, 2, 2>::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) J(i, l) += m.T[i][tidx(j, k, l)] * u(j) * v(k);
  return J;
}

template <class Vec>
Vec eval_reaction(const rd_model& m, const Vec& u, double alpha_check) {
  using S = typename Vec::Scalar;
  Vec lin = (m.L + alpha_check * m.M).template cast<S>() * u;
  return lin + quad_form(m, u, u) + cubic_form(m, u, u, u);
}

struct check_entry {
  std::string name;
  double value;
  bool pass;
};

struct validation_report {
  std::vector<check_entry> checks;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline double symmetry_defect(const rd_model& m) {
  double s = 0;
  for (int i = 0; i < 2; ++i) {
    s = std::max(s, std::abs(m.S[i](0, 1) - m.S[i](1, 0)));
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          double t = m.T[i][tidx(j, k, l)];
          s = std::max({s, std::abs(t - m.T[i][tidx(j, l, k)]), std::abs(t - m.T[i][tidx(k, j, l)]),
                        std::abs(t - m.T[i][tidx(l, k, j)])});
        }
  }
  return s;
}

inline validation_report validate_model(const rd_model& m) {
  validation_report r;
  double tr = m.L.trace(), det = m.L.determinant();
  double s = m.d1 * m.a4() + m.d2 * m.a1();
  double p23 = m.a2() * m.a3(), p14 = m.a1() * m.a4();
  double sym = symmetry_defect(m);
  r.checks.push_back({"d1 > 0", m.d1, m.d1 > 0});
  r.checks.push_back({"d2 > 0", m.d2, m.d2 > 0});
  r.checks.push_back({"forms symmetric", sym, sym <= 1e-14});
  r.checks.push_back({"trace(L) < 0", tr, tr < 0});
  r.checks.push_back({"det(L) > 0", det, det > 0});
  r.checks.push_back({"d1*a4 + d2*a1 > 0", s, s > 0});
  r.checks.push_back({"a2*a3 < a1*a4", p23 - p14, p23 < p14});
  r.checks.push_back({"a1*a4 < 0", p14, p14 < 0});
  bool mid = (m.M - mat2::Identity()).isZero(0);
  r.checks.push_back({"identity flag consistent", mid ? 1.0 : 0.0, !m.M_identity || mid});
  return r;
}

}  // namespace stripeband
