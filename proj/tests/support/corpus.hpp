#pragma once

// Embeddings exercised by the unit tests and the acceptance runner.

#include "nctheta/holomorphy.hpp"

#include <string>
#include <vector>

namespace nctheta::testing {

struct Instance {
  std::string name;
  EmbeddingMap emb;
};

inline EmbeddingMap canonical(int p, int q, std::vector<double> theta, const RMatrix& Q, const RMatrix& Delta) {
  RVector t(p);
  for (int i = 0; i < p; ++i) t(i) = theta[static_cast<std::size_t>(i)];
  return canonical_embedding(p, q, t, Q, Delta);
}

inline RMatrix mat(int rows, int cols, std::initializer_list<double> v) {
  RMatrix m(rows, cols);
  auto it = v.begin();
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = *it++;
  return m;
}

inline EmbeddingMap canonical_10() { return canonical(1, 0, {0.5}, RMatrix(0, 0), RMatrix(0, 0)); }
inline EmbeddingMap canonical_20() { return canonical(2, 0, {0.5, 0.3}, RMatrix(0, 0), RMatrix(0, 0)); }
inline EmbeddingMap canonical_12() {
  return canonical(1, 2, {0.5}, RMatrix::Identity(2, 2), mat(2, 2, {0.3, 0.0, 0.0, 0.2}));
}
inline EmbeddingMap canonical_02() {
  return canonical(0, 2, {}, mat(2, 2, {2, 1, 1, 1}), mat(2, 2, {0.31, 0.17, 0.0, 0.23}));
}

/// p = 2, q = 0 with a dense X~.
inline EmbeddingMap general_20() {
  return EmbeddingMap::from_phi(2, 0, mat(4, 4, {0.5, 0.1, 0.0, 0.2,   //
                                                 0.0, 0.3, 0.1, 0.0,   //
                                                 0.1, 0.0, 1.0, 0.2,   //
                                                 0.0, 0.2, 0.0, 1.0}));
}

/// p = 1, q = 1 with mixed R and Z rows.
inline EmbeddingMap general_11() {
  return EmbeddingMap::from_phi(1, 1, mat(4, 3, {0.6, 0.1, 0.2,   //
                                                 0.1, 1.0, 0.3,   //
                                                 1.0, 0.0, 1.0,   //
                                                 0.0, 0.2, 0.35}));
}

inline std::vector<Instance> corpus() {
  return {{"canonical_10", canonical_10()}, {"canonical_20", canonical_20()}, {"canonical_12", canonical_12()},
          {"canonical_02", canonical_02()}, {"general_20", general_20()},     {"general_11", general_11()}};
}

/// Omega = 2i-ish symmetric matrix with positive imaginary part, for building test vectors.
inline CMatrix test_omega(int p) {
  CMatrix om = CMatrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    om(i, i) = cplx(0.2 * i, 1.5 + 0.5 * i);
    for (int k = i + 1; k < p; ++k) om(i, k) = om(k, i) = cplx(0.1, 0.2);
  }
  return om;
}

}  // namespace nctheta::testing
