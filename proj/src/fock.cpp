#include "cavbh/fock.hpp"

#include <algorithm>
#include <sstream>

namespace cavbh {

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

AtomBasis AtomBasis::enumerate(int n_sites, int n_atoms, std::size_t capacity) {
  if (n_sites < 1) throw std::invalid_argument("n_sites must be >= 1");
  if (n_atoms < 0) throw std::invalid_argument("n_atoms must be >= 0");

  const std::size_t dim = binomial(n_atoms + n_sites - 1, n_sites - 1);
  if (dim > capacity) {
    std::ostringstream msg;
    msg << "basis dimension " << dim << " exceeds capacity " << capacity
        << " (M=" << n_sites << ", N=" << n_atoms << ")";
    throw NumericalError(msg.str());
  }

  AtomBasis b;
  b.n_sites_ = n_sites;
  b.n_atoms_ = n_atoms;
  b.states_.reserve(dim);

  std::vector<int> occ(n_sites, 0);
  // Depth-first fill in lexicographically ascending order.
  auto fill = [&](auto&& self, int site, int remaining) -> void {
    if (site == n_sites - 1) {
      occ[site] = remaining;
      b.states_.push_back(occ);
      return;
    }
    for (int n = 0; n <= remaining; ++n) {
      occ[site] = n;
      self(self, site + 1, remaining - n);
    }
    occ[site] = 0;
  };
  fill(fill, 0, n_atoms);

  if (b.states_.size() != dim)
    throw std::logic_error("basis enumeration produced the wrong dimension");
  return b;
}

std::size_t AtomBasis::index_of(const std::vector<int>& occupation) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), occupation);
  if (it == states_.end() || *it != occupation)
    throw std::invalid_argument("occupation tuple not in basis");
  return static_cast<std::size_t>(it - states_.begin());
}

BasisTag AtomBasis::tag() const {
  std::ostringstream label;
  label << "atoms(M=" << n_sites_ << ",N=" << n_atoms_ << ")";
  return {BasisTag::Kind::Atom, static_cast<std::int64_t>(dim()), label.str()};
}

BasisTag PhotonBasis::tag() const {
  std::ostringstream label;
  label << "photons(n_max=" << n_max << ")";
  return {BasisTag::Kind::Photon, dim(), label.str()};
}

BasisTag CoupledBasis::tag() const {
  std::ostringstream label;
  label << atoms.tag().label << " x " << photons.tag().label;
  return {BasisTag::Kind::Coupled, static_cast<std::int64_t>(dim()), label.str()};
}

}  // namespace cavbh
