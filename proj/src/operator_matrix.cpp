#include "cavbh/operator_matrix.hpp"

#include <cmath>
#include <functional>
#include <unsupported/Eigen/KroneckerProduct>

namespace cavbh {

OperatorMatrix::OperatorMatrix(Dense m, BasisTag tag, bool hermitian)
    : tag_(std::move(tag)), dim_(m.rows()), hermitian_(hermitian),
      sparse_storage_(false), dense_(std::move(m)) {
  if (dense_.rows() != dense_.cols()) throw std::invalid_argument("matrix must be square");
  if (dim_ != tag_.dim) throw std::invalid_argument("matrix dimension disagrees with basis tag");
}

OperatorMatrix::OperatorMatrix(Sparse m, BasisTag tag, bool hermitian)
    : tag_(std::move(tag)), dim_(m.rows()), hermitian_(hermitian),
      sparse_storage_(true), sparse_(std::move(m)) {
  if (sparse_.rows() != sparse_.cols()) throw std::invalid_argument("matrix must be square");
  if (dim_ != tag_.dim) throw std::invalid_argument("matrix dimension disagrees with basis tag");
  sparse_.makeCompressed();
}

OperatorMatrix OperatorMatrix::identity(const BasisTag& tag) {
  if (tag.dim > kSparseThreshold) {
    Sparse s(tag.dim, tag.dim);
    s.setIdentity();
    return OperatorMatrix(std::move(s), tag, true);
  }
  return OperatorMatrix(Dense::Identity(tag.dim, tag.dim), tag, true);
}

OperatorMatrix OperatorMatrix::from_triplets(const std::vector<Eigen::Triplet<cplx>>& t,
                                             const BasisTag& tag, bool hermitian) {
  Sparse s(tag.dim, tag.dim);
  s.setFromTriplets(t.begin(), t.end());
  if (tag.dim > kSparseThreshold) return OperatorMatrix(std::move(s), tag, hermitian);
  return OperatorMatrix(Dense(s), tag, hermitian);
}

OperatorMatrix::Dense OperatorMatrix::to_dense() const {
  return sparse_storage_ ? Dense(sparse_) : dense_;
}

const OperatorMatrix::Sparse& OperatorMatrix::sparse() const {
  if (!sparse_storage_) throw std::logic_error("operator is stored dense");
  return sparse_;
}

cplx OperatorMatrix::coeff(Eigen::Index i, Eigen::Index j) const {
  return sparse_storage_ ? sparse_.coeff(i, j) : dense_(i, j);
}

Eigen::VectorXcd OperatorMatrix::apply(const Eigen::VectorXcd& v) const {
  if (v.size() != dim_) throw std::invalid_argument("vector dimension mismatch");
  return sparse_storage_ ? Eigen::VectorXcd(sparse_ * v) : Eigen::VectorXcd(dense_ * v);
}

cplx OperatorMatrix::expectation(const Eigen::VectorXcd& state) const {
  return state.dot(apply(state));
}

OperatorMatrix OperatorMatrix::adjoint() const {
  if (sparse_storage_)
    return OperatorMatrix(Sparse(sparse_.adjoint()), tag_, hermitian_);
  return OperatorMatrix(Dense(dense_.adjoint()), tag_, hermitian_);
}

double OperatorMatrix::hermiticity_defect() const {
  if (sparse_storage_) {
    Sparse d = sparse_ - Sparse(sparse_.adjoint());
    double m = 0;
    for (int k = 0; k < d.outerSize(); ++k)
      for (Sparse::InnerIterator it(d, k); it; ++it)
        m = std::max(m, std::abs(it.value()));
    return m;
  }
  return (dense_ - dense_.adjoint()).cwiseAbs().maxCoeff();
}

void OperatorMatrix::assert_hermitian(double tol) const {
  if (!hermitian_) return;
  const double defect = hermiticity_defect();
  if (defect >= tol)
    throw NumericalError("operator flagged hermitian has defect " +
                         std::to_string(defect));
}

void OperatorMatrix::check_tag(const OperatorMatrix& o) const {
  if (tag_ != o.tag_)
    throw std::invalid_argument("basis tag mismatch: '" + tag_.label + "' vs '" +
                                o.tag_.label + "'");
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& o) {
  check_tag(o);
  hermitian_ = hermitian_ && o.hermitian_;
  if (sparse_storage_ && o.sparse_storage_) {
    sparse_ += o.sparse_;
  } else if (!sparse_storage_ && !o.sparse_storage_) {
    dense_ += o.dense_;
  } else {
    // Mixed storage falls back to dense.
    Dense sum = to_dense() + o.to_dense();
    sparse_storage_ = false;
    sparse_.resize(0, 0);
    dense_ = std::move(sum);
  }
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(cplx scale) {
  hermitian_ = hermitian_ && scale.imag() == 0.0;
  if (sparse_storage_)
    sparse_ *= scale;
  else
    dense_ *= scale;
  return *this;
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  return a + cplx(-1.0, 0.0) * b;
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  a.check_tag(b);
  if (a.sparse_storage_ && b.sparse_storage_)
    return OperatorMatrix(OperatorMatrix::Sparse(a.sparse_ * b.sparse_), a.tag_, false);
  return OperatorMatrix(OperatorMatrix::Dense(a.to_dense() * b.to_dense()), a.tag_, false);
}

OperatorMatrix tensor(const OperatorMatrix& atom_op, const OperatorMatrix& photon_op) {
  if (atom_op.tag().kind != BasisTag::Kind::Atom ||
      photon_op.tag().kind != BasisTag::Kind::Photon)
    throw std::invalid_argument("tensor expects (atom, photon) operands");
  BasisTag tag{BasisTag::Kind::Coupled, atom_op.dim() * photon_op.dim(),
               atom_op.tag().label + " x " + photon_op.tag().label};
  const bool herm = atom_op.hermitian() && photon_op.hermitian();
  // Atom index slow, photon index fast: kron(A, P).
  OperatorMatrix::Sparse a = atom_op.is_sparse()
                                 ? atom_op.sparse()
                                 : OperatorMatrix::Sparse(atom_op.to_dense().sparseView());
  OperatorMatrix::Sparse p = photon_op.is_sparse()
                                 ? photon_op.sparse()
                                 : OperatorMatrix::Sparse(photon_op.to_dense().sparseView());
  OperatorMatrix::Sparse k = Eigen::kroneckerProduct(a, p).eval();
  if (tag.dim > OperatorMatrix::kSparseThreshold)
    return OperatorMatrix(std::move(k), tag, herm);
  return OperatorMatrix(OperatorMatrix::Dense(k), tag, herm);
}

OperatorMatrix hop_operator(const AtomBasis& basis, Boundary boundary) {
  if (boundary == Boundary::Periodic && basis.n_sites() < 3)
    throw std::invalid_argument("periodic hopping requires at least 3 sites");
  const int m = basis.n_sites();
  const int n_bonds = boundary == Boundary::Periodic ? m : m - 1;
  std::vector<Eigen::Triplet<cplx>> trips;
  std::vector<int> moved;
  for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
    const auto& occ = basis.state(idx);
    for (int b = 0; b < n_bonds; ++b) {
      const int k = b;
      const int kp = (b + 1) % m;
      // b^dag_{k+1} b_k
      if (occ[k] > 0) {
        moved = occ;
        moved[k] -= 1;
        moved[kp] += 1;
        const double amp = std::sqrt(double(occ[k]) * double(occ[kp] + 1));
        trips.emplace_back(basis.index_of(moved), idx, amp);
      }
      // b^dag_k b_{k+1}
      if (occ[kp] > 0) {
        moved = occ;
        moved[kp] -= 1;
        moved[k] += 1;
        const double amp = std::sqrt(double(occ[kp]) * double(occ[k] + 1));
        trips.emplace_back(basis.index_of(moved), idx, amp);
      }
    }
  }
  auto op = OperatorMatrix::from_triplets(trips, basis.tag(), true);
  op.assert_hermitian();
  return op;
}

namespace {

OperatorMatrix diagonal_operator(const AtomBasis& basis,
                                 const std::function<double(const std::vector<int>&)>& f) {
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(basis.dim());
  for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
    const double v = f(basis.state(idx));
    if (v != 0.0) trips.emplace_back(idx, idx, v);
  }
  return OperatorMatrix::from_triplets(trips, basis.tag(), true);
}

}  // namespace

OperatorMatrix number_operator(const AtomBasis& basis, int site) {
  if (site < 1 || site > basis.n_sites())
    throw std::invalid_argument("site index out of range");
  return diagonal_operator(basis, [site](const std::vector<int>& occ) {
    return double(occ[site - 1]);
  });
}

OperatorMatrix total_number_operator(const AtomBasis& basis) {
  return diagonal_operator(basis, [](const std::vector<int>& occ) {
    int n = 0;
    for (int v : occ) n += v;
    return double(n);
  });
}

OperatorMatrix alternating_number_operator(const AtomBasis& basis) {
  return diagonal_operator(basis, [](const std::vector<int>& occ) {
    double s = 0;
    for (std::size_t k = 0; k < occ.size(); ++k) s += (k % 2 == 0 ? 1.0 : -1.0) * occ[k];
    return s;
  });
}

OperatorMatrix interaction_operator(const AtomBasis& basis) {
  return diagonal_operator(basis, [](const std::vector<int>& occ) {
    double s = 0;
    for (int n : occ) s += double(n) * double(n - 1);
    return s;
  });
}

std::pair<OperatorMatrix, OperatorMatrix> photon_ops(const PhotonBasis& pb) {
  if (pb.n_max < 1) throw std::invalid_argument("photon cutoff must be >= 1");
  const int d = pb.dim();
  OperatorMatrix::Dense a = OperatorMatrix::Dense::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  OperatorMatrix::Dense adag = a.adjoint();
  const BasisTag tag = pb.tag();
  if (d > OperatorMatrix::kSparseThreshold) {
    return {OperatorMatrix(OperatorMatrix::Sparse(a.sparseView()), tag, false),
            OperatorMatrix(OperatorMatrix::Sparse(adag.sparseView()), tag, false)};
  }
  return {OperatorMatrix(std::move(a), tag, false),
          OperatorMatrix(std::move(adag), tag, false)};
}

OperatorMatrix photon_number_operator(const PhotonBasis& pb) {
  const int d = pb.dim();
  OperatorMatrix::Dense n = OperatorMatrix::Dense::Zero(d, d);
  for (int i = 0; i < d; ++i) n(i, i) = double(i);
  if (d > OperatorMatrix::kSparseThreshold)
    return OperatorMatrix(OperatorMatrix::Sparse(n.sparseView()), pb.tag(), true);
  return OperatorMatrix(std::move(n), pb.tag(), true);
}

}  // namespace cavbh
