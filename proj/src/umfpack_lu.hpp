#pragma once

// Thin RAII wrapper over UMFPACK's 64-bit-index LU factorization, for real
// (umfpack_dl_*) and complex (umfpack_zl_*) matrices.

#include <complex>
#include <type_traits>
#include <vector>

#include <Eigen/SparseCore>
#include <suitesparse/umfpack.h>

namespace kerrmech::detail {

struct UmfpackOptions {
  int strategy = UMFPACK_STRATEGY_SYMMETRIC;
  int ordering = UMFPACK_ORDERING_METIS;
  /// Skip the numeric factorization when the symbolic peak-memory estimate
  /// exceeds this many bytes (0 disables the check).
  double memory_cap_bytes = 0.0;
};

template <typename Scalar>
class UmfpackLu {
  static_assert(std::is_same_v<Scalar, double> || std::is_same_v<Scalar, std::complex<double>>);

 public:
  using Matrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, SuiteSparse_long>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// Factorizes a; the matrix must outlive the object.
  UmfpackLu(const Matrix& a, const UmfpackOptions& opts);
  ~UmfpackLu();
  UmfpackLu(const UmfpackLu&) = delete;
  UmfpackLu& operator=(const UmfpackLu&) = delete;

  /// UMFPACK status of the factorization (UMFPACK_OK, a warning such as
  /// UMFPACK_WARNING_singular_matrix, or an error code).
  int status() const { return status_; }
  bool ok() const { return status_ == UMFPACK_OK; }
  double rcond() const { return info_[UMFPACK_RCOND]; }
  /// Symbolic estimate of the peak memory of the factorization, in bytes.
  double peak_memory_estimate() const { return peak_estimate_; }

  Vector solve(const Vector& b) const;

 private:
  const Matrix& a_;
  void* symbolic_ = nullptr;
  void* numeric_ = nullptr;
  int status_ = UMFPACK_OK;
  double peak_estimate_ = 0.0;
  std::vector<double> control_;
  mutable std::vector<double> info_;
};

extern template class UmfpackLu<double>;
extern template class UmfpackLu<std::complex<double>>;

}  // namespace kerrmech::detail
