#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "cavbh/fock.hpp"
#include "cavbh/params.hpp"

namespace cavbh {

/// Complex matrix over a tagged basis, dense or sparse behind one interface.
/// Builders use sparse storage above dimension 200 and dense below.
class OperatorMatrix {
 public:
  using Dense = Eigen::MatrixXcd;
  using Sparse = Eigen::SparseMatrix<cplx>;

  static constexpr Eigen::Index kSparseThreshold = 200;

  OperatorMatrix() = default;
  OperatorMatrix(Dense m, BasisTag tag, bool hermitian);
  OperatorMatrix(Sparse m, BasisTag tag, bool hermitian);

  static OperatorMatrix identity(const BasisTag& tag);
  /// Builds from triplets, picking the storage by dimension.
  static OperatorMatrix from_triplets(const std::vector<Eigen::Triplet<cplx>>& t,
                                      const BasisTag& tag, bool hermitian);

  Eigen::Index dim() const { return dim_; }
  const BasisTag& tag() const { return tag_; }
  bool is_sparse() const { return sparse_storage_; }
  bool hermitian() const { return hermitian_; }

  Dense to_dense() const;
  const Sparse& sparse() const;

  cplx coeff(Eigen::Index i, Eigen::Index j) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  cplx expectation(const Eigen::VectorXcd& state) const;

  OperatorMatrix adjoint() const;
  /// max_ij |A - A^dag|; the hermitian flag promises < 1e-12.
  double hermiticity_defect() const;
  /// Throws when the hermitian flag is set but the defect exceeds tol.
  void assert_hermitian(double tol = 1e-12) const;

  OperatorMatrix& operator+=(const OperatorMatrix& o);
  OperatorMatrix& operator*=(cplx scale);

  friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) {
    a += b;
    return a;
  }
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(cplx s, OperatorMatrix a) {
    a *= s;
    return a;
  }
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);

 private:
  void check_tag(const OperatorMatrix& o) const;

  BasisTag tag_;
  Eigen::Index dim_ = 0;
  bool hermitian_ = false;
  bool sparse_storage_ = false;
  Dense dense_;
  Sparse sparse_;
};

OperatorMatrix tensor(const OperatorMatrix& atom_op, const OperatorMatrix& photon_op);

// --- operator builders -------------------------------------------------

/// B = sum_k (b^dag_{k+1} b_k + h.c.); wraps around only for periodic chains.
OperatorMatrix hop_operator(const AtomBasis& basis, Boundary boundary);

/// n_k for a 1-based site index.
OperatorMatrix number_operator(const AtomBasis& basis, int site);

/// N = sum_k n_k.
OperatorMatrix total_number_operator(const AtomBasis& basis);

/// sum_k (-1)^{k+1} n_k, the transverse-pump weight.
OperatorMatrix alternating_number_operator(const AtomBasis& basis);

/// sum_k n_k (n_k - 1), without the U/2 prefactor.
OperatorMatrix interaction_operator(const AtomBasis& basis);

/// (a, a^dag) on the truncated photon space.
std::pair<OperatorMatrix, OperatorMatrix> photon_ops(const PhotonBasis& pb);

OperatorMatrix photon_number_operator(const PhotonBasis& pb);

}  // namespace cavbh
