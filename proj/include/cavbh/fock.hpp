#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cavbh/params.hpp"

namespace cavbh {

/// Identifies the space an operator acts on. Binary operations require equal
/// tags; tensor products combine an Atom and a Photon tag into a Coupled one.
struct BasisTag {
  enum class Kind { Atom, Photon, Coupled };
  Kind kind = Kind::Atom;
  std::int64_t dim = 0;
  std::string label;

  bool operator==(const BasisTag& o) const {
    return kind == o.kind && dim == o.dim && label == o.label;
  }
  bool operator!=(const BasisTag& o) const { return !(*this == o); }
};

/// Fixed-number bosonic occupation basis, lexicographically ordered.
class AtomBasis {
 public:
  static AtomBasis enumerate(int n_sites, int n_atoms,
                             std::size_t capacity = 1'000'000);

  int n_sites() const { return n_sites_; }
  int n_atoms() const { return n_atoms_; }
  std::size_t dim() const { return states_.size(); }
  const std::vector<std::vector<int>>& states() const { return states_; }
  const std::vector<int>& state(std::size_t i) const { return states_[i]; }

  /// Inverse of states(); throws if the occupation tuple is not in the basis.
  std::size_t index_of(const std::vector<int>& occupation) const;

  BasisTag tag() const;

 private:
  int n_sites_ = 0;
  int n_atoms_ = 0;
  std::vector<std::vector<int>> states_;
};

/// Truncated photon Fock space |0> .. |n_max>.
struct PhotonBasis {
  int n_max = 1;
  int dim() const { return n_max + 1; }
  BasisTag tag() const;
};

/// Atom (slow index) x photon (fast index) product space.
struct CoupledBasis {
  AtomBasis atoms;
  PhotonBasis photons;
  std::size_t dim() const { return atoms.dim() * photons.dim(); }
  BasisTag tag() const;
  std::size_t index(std::size_t atom_index, int photon_n) const {
    return atom_index * photons.dim() + photon_n;
  }
};

}  // namespace cavbh
