#pragma once

// Data-parallel reductions shared by the certificate, sampling and grid
// search code. Every kernel has a serial reference path; the OpenMP path
// must return bit-identical results (ties resolve to the lowest index).

#include <cstddef>
#include <exception>
#include <limits>

#include <omp.h>

namespace spm::kernels {

enum class Exec { serial, parallel };

struct Extremum {
  std::size_t index = 0;
  double value = std::numeric_limits<double>::infinity();
};

namespace detail {

inline bool better_min(double v, std::size_t i, const Extremum& best) {
  return v < best.value || (v == best.value && i < best.index);
}

template <class F>
Extremum argmin_serial(std::size_t n, F&& f) {
  Extremum best;
  best.index = n;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f(i);
    if (detail::better_min(v, i, best)) best = {i, v};
  }
  return best;
}

template <class F>
Extremum argmin_parallel(std::size_t n, F&& f) {
  Extremum best;
  best.index = n;
  std::exception_ptr error;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
  {
    Extremum local;
    local.index = n;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      const auto i = static_cast<std::size_t>(k);
      try {
        const double v = f(i);
        if (detail::better_min(v, i, local)) local = {i, v};
      } catch (...) {
#pragma omp critical(spm_kernel_error)
        if (!error) error = std::current_exception();
      }
    }
#pragma omp critical(spm_kernel_reduce)
    if (local.index < n && detail::better_min(local.value, local.index, best)) best = local;
  }
  if (error) std::rethrow_exception(error);
  return best;
}

}  // namespace detail

/// Index and value of the smallest f(i), i in [0, n). For n == 0 the index
/// is n and the value +inf. NaN values never win.
template <class F>
Extremum argmin(std::size_t n, F&& f, Exec exec = Exec::parallel) {
  if (exec == Exec::serial || n < 64 || omp_in_parallel()) return detail::argmin_serial(n, f);
  return detail::argmin_parallel(n, f);
}

/// Index and value of the largest f(i). For n == 0 the value is -inf.
template <class F>
Extremum argmax(std::size_t n, F&& f, Exec exec = Exec::parallel) {
  auto r = argmin(n, [&](std::size_t i) { return -f(i); }, exec);
  r.value = -r.value;
  return r;
}

template <class F>
double min_value(std::size_t n, F&& f, Exec exec = Exec::parallel) {
  return argmin(n, f, exec).value;
}

template <class F>
double max_value(std::size_t n, F&& f, Exec exec = Exec::parallel) {
  return argmax(n, f, exec).value;
}

/// Applies f to every index; f must only write to slots owned by its index.
template <class F>
void for_each_index(std::size_t n, F&& f, Exec exec = Exec::parallel) {
  if (exec == Exec::serial || omp_in_parallel()) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      f(static_cast<std::size_t>(k));
    } catch (...) {
#pragma omp critical(spm_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace spm::kernels
