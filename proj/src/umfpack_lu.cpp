#include "umfpack_lu.hpp"

#include <mutex>
#include <stdexcept>
#include <string>

namespace kerrmech::detail {

namespace {

constexpr const double* raw(const double* p) { return p; }
constexpr double* raw(double* p) { return p; }
// Packed complex storage: interleaved (re, im), imaginary array pointer null.
const double* raw(const std::complex<double>* p) { return reinterpret_cast<const double*>(p); }
double* raw(std::complex<double>* p) { return reinterpret_cast<double*>(p); }

}  // namespace

template <typename Scalar>
UmfpackLu<Scalar>::UmfpackLu(const Matrix& a, const UmfpackOptions& opts)
    : a_(a), control_(UMFPACK_CONTROL), info_(UMFPACK_INFO) {
  if (!a.isCompressed()) throw std::invalid_argument("UmfpackLu: matrix must be compressed");
  constexpr bool is_complex = !std::is_same_v<Scalar, double>;
  if constexpr (is_complex) {
    umfpack_zl_defaults(control_.data());
  } else {
    umfpack_dl_defaults(control_.data());
  }
  control_[UMFPACK_STRATEGY] = opts.strategy;
  control_[UMFPACK_ORDERING] = opts.ordering;

  const auto n = static_cast<SuiteSparse_long>(a.rows());
  // METIS keeps its random state in globals; concurrent orderings perturb
  // each other and with them the rounding of the factors.
  static std::mutex symbolic_mutex;
  std::unique_lock lock(symbolic_mutex);
  if constexpr (is_complex) {
    status_ = static_cast<int>(umfpack_zl_symbolic(n, n, a.outerIndexPtr(), a.innerIndexPtr(),
                                                   raw(a.valuePtr()), nullptr, &symbolic_,
                                                   control_.data(), info_.data()));
  } else {
    status_ = static_cast<int>(umfpack_dl_symbolic(n, n, a.outerIndexPtr(), a.innerIndexPtr(),
                                                   raw(a.valuePtr()), &symbolic_,
                                                   control_.data(), info_.data()));
  }
  lock.unlock();
  if (status_ != UMFPACK_OK) return;
  peak_estimate_ = info_[UMFPACK_PEAK_MEMORY_ESTIMATE] * info_[UMFPACK_SIZE_OF_UNIT];
  if (opts.memory_cap_bytes > 0.0 && peak_estimate_ > opts.memory_cap_bytes) {
    status_ = UMFPACK_ERROR_out_of_memory;
    return;
  }
  if constexpr (is_complex) {
    status_ = static_cast<int>(umfpack_zl_numeric(a.outerIndexPtr(), a.innerIndexPtr(),
                                                  raw(a.valuePtr()), nullptr, symbolic_,
                                                  &numeric_, control_.data(), info_.data()));
  } else {
    status_ = static_cast<int>(umfpack_dl_numeric(a.outerIndexPtr(), a.innerIndexPtr(),
                                                  raw(a.valuePtr()), symbolic_, &numeric_,
                                                  control_.data(), info_.data()));
  }
}

template <typename Scalar>
UmfpackLu<Scalar>::~UmfpackLu() {
  if constexpr (std::is_same_v<Scalar, double>) {
    if (numeric_) umfpack_dl_free_numeric(&numeric_);
    if (symbolic_) umfpack_dl_free_symbolic(&symbolic_);
  } else {
    if (numeric_) umfpack_zl_free_numeric(&numeric_);
    if (symbolic_) umfpack_zl_free_symbolic(&symbolic_);
  }
}

template <typename Scalar>
typename UmfpackLu<Scalar>::Vector UmfpackLu<Scalar>::solve(const Vector& b) const {
  if (!numeric_) throw std::logic_error("UmfpackLu: no numeric factorization");
  Vector x(b.size());
  SuiteSparse_long st = 0;
  if constexpr (std::is_same_v<Scalar, double>) {
    st = umfpack_dl_solve(UMFPACK_A, a_.outerIndexPtr(), a_.innerIndexPtr(), raw(a_.valuePtr()),
                          raw(x.data()), raw(b.data()), numeric_, control_.data(), info_.data());
  } else {
    st = umfpack_zl_solve(UMFPACK_A, a_.outerIndexPtr(), a_.innerIndexPtr(), raw(a_.valuePtr()),
                          nullptr, raw(x.data()), nullptr, raw(b.data()), nullptr, numeric_,
                          control_.data(), info_.data());
  }
  if (st != UMFPACK_OK && st != UMFPACK_WARNING_singular_matrix) {
    throw std::runtime_error("UmfpackLu: solve failed with status " + std::to_string(st));
  }
  return x;
}

template class UmfpackLu<double>;
template class UmfpackLu<std::complex<double>>;

}  // namespace kerrmech::detail
