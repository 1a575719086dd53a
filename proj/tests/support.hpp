#pragma once

#include <random>
#include <stripeband/stripeband.hpp>

namespace testing_support {

using namespace stripeband;

inline rd_model example51() { return load_model(std::string(STRIPEBAND_DATA_DIR) + "/example51.json"); }

inline rd_model example51_linear_only() {
  rd_model m = example51();
  m.S = {mat2::Zero(), mat2::Zero()};
  m.T = {};
  return m;
}

// Random model sitting exactly at a Turing threshold: d2 solves (d1 a4 + d2 a1)^2 = 4 d1 d2 det L.
inline rd_model random_turing_model(std::mt19937& rng, bool with_quadratic = true, bool with_cubic = true,
                                    bool identity_unfolding = false) {
  std::uniform_real_distribution<double> u(-1, 1), pos(0.3, 3);
  while (true) {
    rd_model m;
    double a1 = pos(rng) * (u(rng) < 0 ? -1 : 1);
    double a4 = -a1 * pos(rng) * (a1 > 0 ? 1.2 : 0.8);
    double a2 = pos(rng) * (u(rng) < 0 ? -1 : 1);
    double a3 = pos(rng) * (u(rng) < 0 ? -1 : 1);
    m.L << a1, a2, a3, a4;
    m.d1 = pos(rng);
    double det = m.L.determinant(), tr = m.L.trace();
    if (!(tr < 0) || !(det > 0)) continue;
    // a1^2 d2^2 + (2 d1 a1 a4 - 4 d1 det) d2 + d1^2 a4^2 = 0
    double A = a1 * a1, B = 2 * m.d1 * a1 * a4 - 4 * m.d1 * det, C = m.d1 * m.d1 * a4 * a4;
    double disc = B * B - 4 * A * C;
    if (disc < 0) continue;
    bool found = false;
    for (double sgn : {1.0, -1.0}) {
      double d2 = (-B + sgn * std::sqrt(disc)) / (2 * A);
      if (d2 > 0 && m.d1 * a4 + d2 * a1 > 0) {
        m.d2 = d2;
        found = true;
        break;
      }
    }
    if (!found) continue;
    if (identity_unfolding) {
      m.M = mat2::Identity();
      m.M_identity = true;
    } else {
      m.M << u(rng), u(rng), u(rng), u(rng);
      m.M_identity = false;
    }
    if (with_quadratic)
      for (int i = 0; i < 2; ++i) {
        double off = u(rng);
        m.S[i] << u(rng), off, off, u(rng);
      }
    if (with_cubic)
      for (int i = 0; i < 2; ++i) {
        double c[4] = {u(rng), u(rng), u(rng), u(rng)};  // indexed by number of second-component slots
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) m.T[i][tidx(j, k, l)] = c[j + k + l];
      }
    if (!validate_model(m).pass()) continue;
    if (!check_turing(m, 801).pass) continue;
    try {
      auto t = turing_core_of(m);
      if (std::abs(lambda_M_closed(m, t)) < 1e-3) continue;
    } catch (const error&) {
      continue;
    }
    return m;
  }
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing_support
