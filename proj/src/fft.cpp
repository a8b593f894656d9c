#include "sbd/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace sbd {
namespace {

enum class Layout { Grid, Columns, Rows };

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per shape under a lock and reused.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(Layout layout, int rows, int cols, int sign) {
    const auto key = std::make_tuple(layout, rows, cols, sign);
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const int total = rows * cols;
    auto* in = fftw_alloc_complex(static_cast<size_t>(total));
    auto* out = fftw_alloc_complex(static_cast<size_t>(total));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = nullptr;
    switch (layout) {
      case Layout::Grid:
        // column-major rows x cols == row-major cols x rows
        plan = fftw_plan_dft_2d(cols, rows, in, out, sign, flags);
        break;
      case Layout::Columns: {
        int n[] = {rows};
        plan = fftw_plan_many_dft(1, n, cols, in, nullptr, 1, rows, out, nullptr, 1, rows, sign, flags);
        break;
      }
      case Layout::Rows: {
        int n[] = {cols};
        plan = fftw_plan_many_dft(1, n, rows, in, nullptr, rows, 1, out, nullptr, rows, 1, sign, flags);
        break;
      }
    }
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<Layout, int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

MatrixXcd run(Layout layout, const MatrixXcd& in, int sign, double scale) {
  MatrixXcd out(in.rows(), in.cols());
  if (in.size() == 0) return out;
  auto plan = cache().get(layout, static_cast<int>(in.rows()), static_cast<int>(in.cols()), sign);
  // FFTW does not modify the input for out-of-place complex transforms.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
  out *= scale;
  return out;
}

}  // namespace

VectorXcd dft(const VectorXcd& x) {
  const double s = 1.0 / std::sqrt(static_cast<double>(x.size()));
  return run(Layout::Grid, x, FFTW_FORWARD, s);
}

VectorXcd dft(const VectorXd& x) { return dft(VectorXcd(x.cast<std::complex<double>>())); }

VectorXcd idft(const VectorXcd& x) {
  const double s = 1.0 / std::sqrt(static_cast<double>(x.size()));
  return run(Layout::Grid, x, FFTW_BACKWARD, s);
}

MatrixXcd dft2(const MatrixXcd& grid) {
  const double s = 1.0 / std::sqrt(static_cast<double>(grid.size()));
  return run(Layout::Grid, grid, FFTW_FORWARD, s);
}

MatrixXcd dft2(const MatrixXd& grid) { return dft2(MatrixXcd(grid.cast<std::complex<double>>())); }

MatrixXcd idft2(const MatrixXcd& grid) {
  const double s = 1.0 / std::sqrt(static_cast<double>(grid.size()));
  return run(Layout::Grid, grid, FFTW_BACKWARD, s);
}

MatrixXcd dft_columns(const MatrixXcd& grid) {
  const double s = 1.0 / std::sqrt(static_cast<double>(grid.rows()));
  return run(Layout::Columns, grid, FFTW_FORWARD, s);
}

MatrixXcd idft_columns(const MatrixXcd& grid) {
  const double s = 1.0 / std::sqrt(static_cast<double>(grid.rows()));
  return run(Layout::Columns, grid, FFTW_BACKWARD, s);
}

MatrixXcd dft_rows(const MatrixXcd& grid) {
  const double s = 1.0 / std::sqrt(static_cast<double>(grid.cols()));
  return run(Layout::Rows, grid, FFTW_FORWARD, s);
}

MatrixXcd fourier_matrix(Index n) {
  MatrixXcd f(n, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(n);
      f(j, k) = std::polar(s, angle);
    }
  return f;
}

}  // namespace sbd
