#pragma once

#include <array>
#include <complex>

namespace stripeband {

// Truncated second-order Taylor jet in N variables: value, gradient, Hessian.
template <int N, class T = std::complex<double>>
struct jet2 {
  T v{};
  std::array<T, N> g{};
  std::array<std::array<T, N>, N> h{};

  static jet2 constant(T c) {
    jet2 j;
    j.v = c;
    return j;
  }
  static jet2 variable(int i, T at) {
    jet2 j;
    j.v = at;
    j.g[i] = T(1);
    return j;
  }
};

template <int N, class T>
jet2<N, T> operator+(const jet2<N, T>& a, const jet2<N, T>& b) {
  jet2<N, T> r;
  r.v = a.v + b.v;
  for (int i = 0; i < N; ++i) {
    r.g[i] = a.g[i] + b.g[i];
    for (int j = 0; j < N; ++j) r.h[i][j] = a.h[i][j] + b.h[i][j];
  }
  return r;
}

template <int N, class T>
jet2<N, T> operator-(const jet2<N, T>& a) {
  jet2<N, T> r;
  r.v = -a.v;
  for (int i = 0; i < N; ++i) {
    r.g[i] = -a.g[i];
    for (int j = 0; j < N; ++j) r.h[i][j] = -a.h[i][j];
  }
  return r;
}

template <int N, class T>
jet2<N, T> operator-(const jet2<N, T>& a, const jet2<N, T>& b) {
  return a + (-b);
}

template <int N, class T>
jet2<N, T> operator*(const jet2<N, T>& a, const jet2<N, T>& b) {
  jet2<N, T> r;
  r.v = a.v * b.v;
  for (int i = 0; i < N; ++i) {
    r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (int j = 0; j < N; ++j)
      r.h[i][j] = a.h[i][j] * b.v + a.g[i] * b.g[j] + a.g[j] * b.g[i] + a.v * b.h[i][j];
  }
  return r;
}

template <int N, class T>
jet2<N, T> operator*(T s, const jet2<N, T>& a) {
  return jet2<N, T>::constant(s) * a;
}

template <int N, class T>
jet2<N, T> operator+(T s, const jet2<N, T>& a) {
  return jet2<N, T>::constant(s) + a;
}

// Derivatives of the root x0(p) of F(x0, p) = 0 through the origin, variable 0 being x0.
template <int N, class T>
struct implicit_root {
  std::array<T, N> d{};
  std::array<std::array<T, N>, N> dd{};
};

template <int N, class T>
implicit_root<N, T> implicit_derivatives(const jet2<N, T>& F) {
  implicit_root<N, T> r;
  const T Fx = F.g[0];
  for (int p = 1; p < N; ++p) r.d[p] = -F.g[p] / Fx;
  for (int p = 1; p < N; ++p)
    for (int q = 1; q < N; ++q)
      r.dd[p][q] = -(F.h[p][q] + F.h[0][p] * r.d[q] + F.h[0][q] * r.d[p] + F.h[0][0] * r.d[p] * r.d[q]) / Fx;
  return r;
}

}  // namespace stripeband
