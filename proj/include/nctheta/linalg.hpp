#pragma once

// Small dense linear-algebra helpers shared by every module.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace nctheta {

using cplx = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using IVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Integer index into Z^d, ordered lexicographically.
using Index = std::vector<std::int64_t>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr cplx kI{0.0, 1.0};

/// Numerical rank with singular values below rel_tol * sigma_max discarded.
template <typename Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& m, double rel_tol = 1e-8) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<typename Derived::PlainObject> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++rank;
  }
  return rank;
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

/// |k|_inf of an integer index.
inline std::int64_t inf_norm(const Index& k) {
  std::int64_t r = 0;
  for (auto v : k) r = std::max<std::int64_t>(r, v < 0 ? -v : v);
  return r;
}

/// Every index in {-radius..radius}^dim, lexicographic order.
std::vector<Index> index_ball(int dim, std::int64_t radius);

}  // namespace nctheta
