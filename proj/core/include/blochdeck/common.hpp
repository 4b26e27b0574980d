#ifndef BLOCHDECK_COMMON_HPP
#define BLOCHDECK_COMMON_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace blochdeck {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr const char* kVersion = "0.1.0";

/// Soft warnings attached to results. Operations that fall off the copy
/// window or outside a dual grid's exactness band record the condition here
/// instead of failing; callers decide how to treat flagged values.
struct Flags {
  bool window_overflow = false;
  bool band_exceeded = false;

  Flags& operator|=(const Flags& o) {
    window_overflow = window_overflow || o.window_overflow;
    band_exceeded = band_exceeded || o.band_exceeded;
    return *this;
  }
  bool any() const { return window_overflow || band_exceeded; }
  std::string to_string() const {
    if (!any()) return "none";
    std::string s;
    if (window_overflow) s += "window-overflow";
    if (band_exceeded) s += s.empty() ? "band-exceeded" : ",band-exceeded";
    return s;
  }
};

/// Thrown when a group translate of a vertex leaves the truncation window.
/// Carries the offending copy element (canonical coordinates, printed).
class WindowOverflowError : public std::runtime_error {
 public:
  WindowOverflowError(const std::string& what, std::string offending_copy)
      : std::runtime_error(what + " (offending copy " + offending_copy + ")"),
        offending_copy_(std::move(offending_copy)) {}
  const std::string& offending_copy() const { return offending_copy_; }

 private:
  std::string offending_copy_;
};

inline long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline long floor_mod(long a, long b) { return a - floor_div(a, b) * b; }

/// Runs fn(i) for i in [0, n). With nthreads > 1 the index range is split in
/// contiguous chunks; every index writes only its own slot, so results do not
/// depend on the thread count.
inline void parallel_for(std::size_t n, int nthreads,
                         const std::function<void(std::size_t)>& fn) {
  if (nthreads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(nthreads), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace blochdeck

#endif
