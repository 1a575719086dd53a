#pragma once

#include <Eigen/Dense>
#include <complex>

#include "error.hpp"

namespace stripeband {

using cplx = std::complex<double>;
using vec2 = Eigen::Vector2d;
using mat2 = Eigen::Matrix2d;
using cvec2 = Eigen::Vector2cd;
using cmat2 = Eigen::Matrix2cd;

struct bordered_result {
  vec2 w;
  double s;  // multiplier: nonzero iff rhs has a component along the adjoint kernel
  double residual;
};

// Solves A w + s con = rhs, <con, w> = 0 for singular A with a simple kernel.
inline bordered_result bordered_solve(const mat2& A, const vec2& rhs, const vec2& con) {
  Eigen::Matrix3d B = Eigen::Matrix3d::Zero();
  B.topLeftCorner<2, 2>() = A;
  B.block<2, 1>(0, 2) = con;
  B.block<1, 2>(2, 0) = con.transpose();
  Eigen::Vector3d r(rhs(0), rhs(1), 0.0);
  Eigen::FullPivLU<Eigen::Matrix3d> lu(B);
  if (!lu.isInvertible())
    throw error(error_kind::numerical, "bordered system is singular");
  Eigen::Vector3d x = lu.solve(r);
  bordered_result out;
  out.w = x.head<2>();
  out.s = x(2);
  out.residual = (A * out.w - rhs).norm();
  return out;
}

inline vec2 solve2(const mat2& A, const vec2& rhs, const char* what) {
  double det = A.determinant();
  if (std::abs(det) <= 1e-14 * std::max(1.0, A.cwiseAbs().maxCoeff() * A.cwiseAbs().maxCoeff()))
    throw error(error_kind::numerical, std::string("singular matrix in ") + what);
  return A.partialPivLu().solve(rhs);
}

inline double sgn(double x) { return (x > 0) - (x < 0); }

}  // namespace stripeband
