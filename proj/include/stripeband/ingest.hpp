#pragma once

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "turing.hpp"

namespace stripeband {

inline constexpr int model_schema_version = 1;

namespace detail {

inline std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline double number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw error(error_kind::validation, "parse error: " + where + " is not a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw error(error_kind::validation, "parse error: " + where + " is not finite");
  return v;
}

inline std::vector<double> numbers(const nlohmann::json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n)
    throw error(error_kind::validation, "parse error: " + where + " must be an array of " + std::to_string(n) + " numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

inline mat2 matrix(const nlohmann::json& j, const std::string& where) {
  mat2 A;
  if (j.is_array() && j.size() == 2 && j[0].is_array()) {
    for (int r = 0; r < 2; ++r) {
      auto row = numbers(j[r], 2, where + "[" + std::to_string(r) + "]");
      A(r, 0) = row[0];
      A(r, 1) = row[1];
    }
  } else {
    auto v = numbers(j, 4, where);
    A << v[0], v[1], v[2], v[3];
  }
  return A;
}

}  // namespace detail

inline rd_model parse_model(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw error(error_kind::validation, "parse error at " + detail::line_context(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw error(error_kind::validation, "parse error: model document must be an object");
  if (doc.contains("schema") && detail::number(doc["schema"], "schema") != model_schema_version)
    throw error(error_kind::validation, "parse error: unsupported schema version");
  for (const char* key : {"diffusion", "linear"})
    if (!doc.contains(key)) throw error(error_kind::validation, std::string("parse error: missing field '") + key + "'");

  rd_model m;
  if (doc.contains("name") && doc["name"].is_string()) m.name = doc["name"].get<std::string>();
  auto dif = detail::numbers(doc["diffusion"], 2, "diffusion");
  m.d1 = dif[0];
  m.d2 = dif[1];
  m.L = detail::matrix(doc["linear"], "linear");

  if (!doc.contains("unfolding") || (doc["unfolding"].is_string() && doc["unfolding"] == "identity")) {
    m.M = mat2::Identity();
    m.M_identity = true;
  } else if (doc["unfolding"].is_string()) {
    throw error(error_kind::validation, "parse error: unfolding must be 4 numbers or \"identity\"");
  } else {
    m.M = detail::matrix(doc["unfolding"], "unfolding");
    m.M_identity = false;
  }

  if (doc.contains("quadratic") && !doc["quadratic"].is_null() && !doc["quadratic"].empty()) {
    const auto& q = doc["quadratic"];
    if (!q.is_array() || q.size() != 2) throw error(error_kind::validation, "parse error: quadratic must hold two matrices");
    for (int i = 0; i < 2; ++i) {
      std::string where = "quadratic[" + std::to_string(i) + "]";
      m.S[i] = detail::matrix(q[i], where);
      if (m.S[i](0, 1) != m.S[i](1, 0))
        throw error(error_kind::validation, "parse error: " + where + " is not symmetric (entry [0][1] != [1][0])");
    }
  }
  if (doc.contains("cubic") && !doc["cubic"].is_null() && !doc["cubic"].empty()) {
    const auto& c = doc["cubic"];
    if (!c.is_array() || c.size() != 2) throw error(error_kind::validation, "parse error: cubic must hold two tensors");
    for (int i = 0; i < 2; ++i) {
      std::string where = "cubic[" + std::to_string(i) + "]";
      auto v = detail::numbers(c[i], 8, where);
      for (int k = 0; k < 8; ++k) m.T[i][k] = v[k];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int d = 0; d < 2; ++d) {
            double t = m.T[i][tidx(a, b, d)];
            int perms[3] = {tidx(a, d, b), tidx(b, a, d), tidx(d, b, a)};
            for (int p : perms)
              if (m.T[i][p] != t)
                throw error(error_kind::validation, "parse error: " + where + " is not symmetric (entry " +
                                                        std::to_string(tidx(a, b, d)) + " vs " + std::to_string(p) + ")");
          }
    }
  }
  return m;
}

inline rd_model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(error_kind::io, "cannot read model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

inline nlohmann::json model_to_json(const rd_model& m) {
  nlohmann::json j;
  j["schema"] = model_schema_version;
  if (!m.name.empty()) j["name"] = m.name;
  j["diffusion"] = {m.d1, m.d2};
  j["linear"] = {m.L(0, 0), m.L(0, 1), m.L(1, 0), m.L(1, 1)};
  if (m.M_identity)
    j["unfolding"] = "identity";
  else
    j["unfolding"] = {m.M(0, 0), m.M(0, 1), m.M(1, 0), m.M(1, 1)};
  j["quadratic"] = nlohmann::json::array();
  for (int i = 0; i < 2; ++i)
    j["quadratic"].push_back({{m.S[i](0, 0), m.S[i](0, 1)}, {m.S[i](1, 0), m.S[i](1, 1)}});
  j["cubic"] = nlohmann::json::array();
  for (int i = 0; i < 2; ++i) j["cubic"].push_back(std::vector<double>(m.T[i].begin(), m.T[i].end()));
  return j;
}

struct klausmeier_params {
  double d = 500;
  double m = 0.45;
  double a = 0;
  double beta = 0;
};

struct homogeneous_state {
  double u_plus, v_plus, u_minus, v_minus;
};

inline homogeneous_state homogeneous_states(const klausmeier_params& k) {
  double disc = k.a * k.a - 4 * k.m * k.m;
  if (disc < 0) throw error(error_kind::validation, "no vegetated state: a < 2m");
  double r = std::sqrt(disc);
  return {2 * k.m * k.m / (k.a + r), (k.a + r) / (2 * k.m), 2 * k.m * k.m / (k.a - r), (k.a - r) / (2 * k.m)};
}

inline mat2 klausmeier_linear(double m, double v) {
  mat2 L;
  L << -1 - v * v, -2 * m, v * v, m;
  return L;
}

// Derivative of the linearisation at the vegetated state with respect to a.
inline mat2 klausmeier_unfolding(double a, double m) {
  double v = (a + std::sqrt(a * a - 4 * m * m)) / (2 * m);
  double dv = (1 + a / std::sqrt(a * a - 4 * m * m)) / (2 * m);
  mat2 M;
  M << -2 * v * dv, 0, 2 * v * dv, 0;
  return M;
}

// min over k of det(-k^2 D + L(a)); its zero is the Turing threshold.
inline double klausmeier_criticality(double a, double d, double m) {
  klausmeier_params s{d, m, a, 0};
  double v = homogeneous_states(s).v_plus;
  mat2 L = klausmeier_linear(m, v);
  double sum = d * L(1, 1) + L(0, 0);
  double det = L.determinant();
  return sum > 0 ? det - sum * sum / (4 * d) : det;
}

struct klausmeier_result {
  rd_model model;
  double a_T = 0;
  double lambda_M = 0;
  homogeneous_state state{};
};

inline klausmeier_result klausmeier_normal_form(const klausmeier_params& k, double bracket_lo = -1,
                                                double bracket_hi = -1, double tol = 1e-12) {
  if (!(k.d > 0) || !(k.m > 0)) throw error(error_kind::validation, "klausmeier: d and m must be positive");
  double lo = bracket_lo > 0 ? bracket_lo : 2 * k.m, hi = bracket_hi > 0 ? bracket_hi : 10 * k.m;
  double flo = klausmeier_criticality(lo, k.d, k.m), fhi = klausmeier_criticality(hi, k.d, k.m);
  if (flo * fhi > 0) throw error(error_kind::numerical, "klausmeier: no sign change in bisection bracket");
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi), fm = klausmeier_criticality(mid, k.d, k.m);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  klausmeier_result r;
  r.a_T = 0.5 * (lo + hi);
  r.state = homogeneous_states({k.d, k.m, r.a_T, k.beta});
  double u = r.state.u_plus, v = r.state.v_plus;
  rd_model& md = r.model;
  md.name = "klausmeier";
  md.d1 = k.d;
  md.d2 = 1;
  md.L = klausmeier_linear(k.m, v);
  md.M = klausmeier_unfolding(r.a_T, k.m);
  md.M_identity = false;
  mat2 S2;
  S2 << 0, v, v, u;
  md.S = {-S2, S2};
  for (int p : {tidx(0, 1, 1), tidx(1, 0, 1), tidx(1, 1, 0)}) {
    md.T[0][p] = -1.0 / 3;
    md.T[1][p] = 1.0 / 3;
  }
  turing_core t = kernel_vectors(md, critical_wavenumber(md));
  r.lambda_M = lambda_M_closed(md, t);
  return r;
}

}  // namespace stripeband
