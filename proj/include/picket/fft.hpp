#pragma once

// Unitary DFT backed by FFTW: (F y)_w = sum_n y_n e^{-2 pi i w n / L} / sqrt(L).

#include <complex>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

#include "picket/errors.hpp"

namespace picket {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

enum class Direction { forward, inverse };

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Reusable plan for one length and direction. Execution is thread-safe on
/// distinct buffers; planning is serialized.
class DftPlan {
 public:
  DftPlan(std::size_t length, Direction dir) : length_(length), dir_(dir) {
    if (length == 0) throw ArgumentError("DftPlan: zero length");
    in_.reset(fftw_alloc_complex(length));
    out_.reset(fftw_alloc_complex(length));
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(length), in_.get(), out_.get(),
                             dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                             FFTW_ESTIMATE);
  }
  ~DftPlan() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (plan_) fftw_destroy_plan(plan_);
  }
  DftPlan(const DftPlan&) = delete;
  DftPlan& operator=(const DftPlan&) = delete;

  std::size_t length() const { return length_; }

  /// Unnormalized transform.
  void execute_raw(std::span<const Complex> in, std::span<Complex> out) {
    if (in.size() != length_ || out.size() != length_) throw ArgumentError("DftPlan: size mismatch");
    // std::complex<double> and fftw_complex share layout.
    std::memcpy(in_.get(), in.data(), length_ * sizeof(fftw_complex));
    fftw_execute(plan_);
    std::memcpy(static_cast<void*>(out.data()), out_.get(), length_ * sizeof(fftw_complex));
  }

  CVector unitary(std::span<const Complex> in) {
    CVector out(length_);
    execute_raw(in, out);
    const double scale = 1.0 / std::sqrt(static_cast<double>(length_));
    for (auto& v : out) v *= scale;
    return out;
  }

 private:
  struct Free {
    void operator()(fftw_complex* p) const { fftw_free(p); }
  };
  std::size_t length_;
  Direction dir_;
  std::unique_ptr<fftw_complex, Free> in_;
  std::unique_ptr<fftw_complex, Free> out_;
  fftw_plan plan_ = nullptr;
};

inline CVector unitary_dft(std::span<const Complex> y) {
  return DftPlan(y.size(), Direction::forward).unitary(y);
}

inline CVector unitary_idft(std::span<const Complex> y) {
  return DftPlan(y.size(), Direction::inverse).unitary(y);
}

}  // namespace picket
