// Configure-time probe: exits 0 when a small real UMFPACK solve is accurate.
// Some OpenBLAS builds pick a faulty dtrsm kernel on AVX-512 machines.

#include <cmath>
#include <vector>

#include <suitesparse/umfpack.h>

int main() {
  constexpr SuiteSparse_long n = 64;
  std::vector<SuiteSparse_long> ap(n + 1), ai;
  std::vector<double> ax;
  for (SuiteSparse_long j = 0; j < n; ++j) {
    ap[j] = static_cast<SuiteSparse_long>(ai.size());
    for (SuiteSparse_long i = 0; i < n; ++i) {
      const double v = 1.0 / (1.0 + std::abs(static_cast<double>(i - j))) +
                       0.1 * std::sin(7.0 * i + 3.0 * j);
      ai.push_back(i);
      ax.push_back(v + (i == j ? 2.0 : 0.0));
    }
  }
  ap[n] = static_cast<SuiteSparse_long>(ai.size());

  std::vector<double> b(n), x(n);
  for (SuiteSparse_long i = 0; i < n; ++i) b[i] = 1.0 + static_cast<double>(i) / (n - 1);

  void* symbolic = nullptr;
  void* numeric = nullptr;
  if (umfpack_dl_symbolic(n, n, ap.data(), ai.data(), ax.data(), &symbolic, nullptr, nullptr) != UMFPACK_OK) return 2;
  if (umfpack_dl_numeric(ap.data(), ai.data(), ax.data(), symbolic, &numeric, nullptr, nullptr) != UMFPACK_OK) return 2;
  umfpack_dl_solve(UMFPACK_A, ap.data(), ai.data(), ax.data(), x.data(), b.data(), numeric, nullptr, nullptr);
  umfpack_dl_free_numeric(&numeric);
  umfpack_dl_free_symbolic(&symbolic);

  double err = 0.0;
  for (SuiteSparse_long i = 0; i < n; ++i) {
    double s = -b[i];
    for (SuiteSparse_long j = 0; j < n; ++j) s += ax[j * n + i] * x[j];
    err = std::max(err, std::abs(s));
  }
  return err < 1e-10 ? 0 : 1;
}
