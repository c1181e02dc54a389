#include "nctheta/lattice_core.hpp"

#include "nctheta/errors.hpp"

#include <cmath>
#include <string>

namespace nctheta {

namespace {

constexpr double kIntegerTol = 1e-12;
constexpr double kDetTol = 1e-10;

std::string dims(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

std::vector<Index> index_ball(int dim, std::int64_t radius) {
  std::vector<Index> out;
  if (dim < 0 || radius < 0) return out;
  Index k(static_cast<std::size_t>(dim), -radius);
  while (true) {
    out.push_back(k);
    int pos = dim - 1;
    while (pos >= 0 && k[pos] == radius) {
      k[pos] = -radius;
      --pos;
    }
    if (pos < 0) break;
    ++k[pos];
  }
  return out;
}

EmbeddingMap EmbeddingMap::from_phi(int p, int q, const RMatrix& phi) {
  if (p < 0 || q < 0 || p + q < 1) {
    throw Error(ErrorCode::InvalidArgument, "need p, q >= 0 and p + q >= 1");
  }
  const int d = 2 * p + q;
  if (phi.rows() != 2 * p + 2 * q || phi.cols() != d) {
    throw Error(ErrorCode::DimensionMismatch,
                "phi must be " + dims(2 * p + 2 * q, d) + ", got " + dims(phi.rows(), phi.cols()));
  }
  if (!phi.allFinite()) throw Error(ErrorCode::InvalidArgument, "phi has non-finite entries");
  for (int i = 2 * p; i < 2 * p + q; ++i) {
    for (int j = 0; j < d; ++j) {
      if (std::abs(phi(i, j) - std::round(phi(i, j))) > kIntegerTol) {
        throw Error(ErrorCode::NonIntegerLattice,
                    "Z^q row " + std::to_string(i) + " has non-integer entry");
      }
    }
  }
  // Row-normalised determinant keeps the threshold scale-free.
  RMatrix xt = phi.topRows(d);
  for (int i = 0; i < d; ++i) {
    const double n = xt.row(i).norm();
    if (n == 0.0) throw Error(ErrorCode::SingularEmbedding, "zero row in X~");
    xt.row(i) /= n;
  }
  if (std::abs(xt.determinant()) <= kDetTol) {
    throw Error(ErrorCode::SingularEmbedding, "X~ is singular");
  }
  return EmbeddingMap(p, q, phi);
}

EmbeddingMap canonical_embedding(int p, int q, const RVector& theta, const RMatrix& Q,
                                 const RMatrix& Delta) {
  if (p < 0 || q < 0) throw Error(ErrorCode::InvalidArgument, "negative p or q");
  if (theta.size() != p) throw Error(ErrorCode::DimensionMismatch, "theta must have length p");
  if (Q.rows() != q || Q.cols() != q || Delta.rows() != q || Delta.cols() != q) {
    throw Error(ErrorCode::DimensionMismatch, "Q and Delta must be q x q");
  }
  for (int i = 0; i < p; ++i) {
    if (theta(i) == 0.0) throw Error(ErrorCode::ZeroTheta, "theta_" + std::to_string(i + 1) + " = 0");
  }
  if (q > 0 && std::abs(Q.determinant()) < 0.5) {
    // Q is integral, so any nonzero determinant has modulus >= 1.
    throw Error(ErrorCode::SingularQ, "det Q = 0");
  }
  const int d = 2 * p + q;
  RMatrix phi = RMatrix::Zero(2 * p + 2 * q, d);
  for (int i = 0; i < p; ++i) {
    phi(i, i) = theta(i);
    phi(p + i, p + i) = 1.0;
  }
  if (q > 0) {
    phi.block(2 * p, 2 * p, q, q) = Q;
    phi.block(2 * p + q, 2 * p, q, q) = Delta;
  }
  return EmbeddingMap::from_phi(p, q, phi);
}

bool LatticePoint::is_zero() const {
  for (auto v : index) {
    if (v != 0) return false;
  }
  return true;
}

LatticePoint lattice_point(const EmbeddingMap& emb, const Index& k) {
  const int p = emb.p();
  const int q = emb.q();
  if (static_cast<int>(k.size()) != emb.d()) {
    throw Error(ErrorCode::DimensionMismatch,
                "index has length " + std::to_string(k.size()) + ", expected " + std::to_string(emb.d()));
  }
  RVector kv(emb.d());
  for (int j = 0; j < emb.d(); ++j) kv(j) = static_cast<double>(k[j]);
  const RVector h = emb.phi() * kv;

  LatticePoint out;
  out.index = k;
  out.w1 = h.segment(0, p);
  out.w2 = h.segment(p, p);
  out.m.resize(q);
  for (int l = 0; l < q; ++l) out.m(l) = static_cast<std::int64_t>(std::llround(h(2 * p + l)));
  out.r = h.segment(2 * p + q, q);
  return out;
}

LatticePoint operator+(const LatticePoint& a, const LatticePoint& b) {
  if (a.index.size() != b.index.size() || a.p() != b.p() || a.q() != b.q()) {
    throw Error(ErrorCode::DimensionMismatch, "lattice points from different embeddings");
  }
  LatticePoint out;
  out.index.resize(a.index.size());
  for (std::size_t i = 0; i < a.index.size(); ++i) out.index[i] = a.index[i] + b.index[i];
  out.w1 = a.w1 + b.w1;
  out.w2 = a.w2 + b.w2;
  out.m = a.m + b.m;
  out.r = a.r + b.r;
  return out;
}

LatticePoint operator-(const LatticePoint& a) {
  LatticePoint out;
  out.index.resize(a.index.size());
  for (std::size_t i = 0; i < a.index.size(); ++i) out.index[i] = -a.index[i];
  out.w1 = -a.w1;
  out.w2 = -a.w2;
  out.m = -a.m;
  out.r = -a.r;
  return out;
}

double cocycle_exponent(const LatticePoint& x, const LatticePoint& y) {
  if (x.p() != y.p() || x.q() != y.q()) {
    throw Error(ErrorCode::DimensionMismatch, "cocycle of points with different (p,q)");
  }
  const RVector xm = x.m.cast<double>();
  const RVector ym = y.m.cast<double>();
  return x.w1.dot(y.w2) + xm.dot(y.r) - y.w1.dot(x.w2) - ym.dot(x.r);
}

cplx cocycle(const LatticePoint& x, const LatticePoint& y) {
  return std::polar(1.0, kPi * cocycle_exponent(x, y));
}

RMatrix induced_theta(const EmbeddingMap& emb) {
  const int d = emb.d();
  std::vector<LatticePoint> cols;
  cols.reserve(d);
  for (int j = 0; j < d; ++j) {
    Index e(d, 0);
    e[j] = 1;
    cols.push_back(lattice_point(emb, e));
  }
  // S_ij = x_i.w1 . x_j.w2 + x_i.m . x_j.r ; theta' = S - S^T.
  RMatrix S(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      S(i, j) = cols[i].w1.dot(cols[j].w2) + cols[i].m.cast<double>().dot(cols[j].r);
    }
  }
  return S - S.transpose();
}

QuantumElement::QuantumElement(EmbeddingMap emb, std::int64_t radius)
    : emb_(std::move(emb)), radius_(radius) {
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "negative radius");
}

QuantumElement QuantumElement::basis(const EmbeddingMap& emb, const Index& k, cplx c) {
  QuantumElement out(emb, inf_norm(k));
  out.set(k, c);
  return out;
}

void QuantumElement::check_key(const Index& k) const {
  if (static_cast<int>(k.size()) != emb_.d()) {
    throw Error(ErrorCode::DimensionMismatch, "coefficient key has wrong length");
  }
  if (inf_norm(k) > radius_) {
    throw Error(ErrorCode::InvalidArgument, "coefficient key outside truncation radius");
  }
}

cplx QuantumElement::coeff(const Index& k) const {
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? cplx{} : it->second;
}

void QuantumElement::set(const Index& k, cplx c) {
  check_key(k);
  if (std::abs(c) < drop_) {
    coeffs_.erase(k);
  } else {
    coeffs_[k] = c;
  }
}

void QuantumElement::add(const Index& k, cplx c) { set(k, coeff(k) + c); }

QuantumElement qel_multiply(const QuantumElement& a, const QuantumElement& b) {
  if (!(a.embedding() == b.embedding())) {
    throw Error(ErrorCode::InvalidArgument, "product of elements over different embeddings");
  }
  const auto& emb = a.embedding();
  std::map<Index, cplx> acc;

  std::vector<LatticePoint> bpts;
  bpts.reserve(b.size());
  for (const auto& [kb, cb] : b.coeffs()) bpts.push_back(lattice_point(emb, kb));

  for (const auto& [ka, ca] : a.coeffs()) {
    const LatticePoint xa = lattice_point(emb, ka);
    std::size_t j = 0;
    for (const auto& [kb, cb] : b.coeffs()) {
      Index k(ka.size());
      for (std::size_t i = 0; i < k.size(); ++i) k[i] = ka[i] + kb[i];
      acc[k] += ca * cb * cocycle(xa, bpts[j++]);
    }
  }
  QuantumElement out(emb, a.radius() + b.radius());
  out.set_drop_threshold(std::min(a.drop_threshold(), b.drop_threshold()));
  for (const auto& [k, c] : acc) out.set(k, c);
  return out;
}

}  // namespace nctheta
