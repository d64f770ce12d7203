#pragma once

#include <vector>

#include "kerrmech/fock.hpp"

namespace kerrmech::detail {

inline SparseMatrix sparse_identity(int n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

/// Kronecker product a (x) b.
inline SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ja = 0; ja < a.outerSize(); ++ja) {
    for (SparseMatrix::InnerIterator ia(a, ja); ia; ++ia) {
      for (int jb = 0; jb < b.outerSize(); ++jb) {
        for (SparseMatrix::InnerIterator ib(b, jb); ib; ++ib) {
          t.emplace_back(ia.row() * b.rows() + ib.row(), ja * b.cols() + jb,
                         ia.value() * ib.value());
        }
      }
    }
  }
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace kerrmech::detail
