#pragma once

// Lane-wise line sum body. Included once per instruction set with
// PASI_KERNEL_NS naming the variant; only whole vectors are processed.

#include <cstddef>
#include <experimental/simd>

#include "pasi/contour_kernel.hpp"

namespace pasi::specfun::kernel::PASI_KERNEL_NS {
namespace {

namespace stdx = std::experimental;
using vd = stdx::native_simd<double>;

constexpr double kG = 7.0;
constexpr double kCoef[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                             771.32342877765313,   -176.61502916214059,   12.507343278686905,
                             -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kHalfLog2Pi = 0.91893853320467274178;

struct cvec {
  vd re, im;
};

inline cvec cmul(const cvec& x, const cvec& y) {
  return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}

inline cvec cdiv(const cvec& x, const cvec& y) {
  const vd d = y.re * y.re + y.im * y.im;
  return {(x.re * y.re + x.im * y.im) / d, (x.im * y.re - x.re * y.im) / d};
}

// Adds sign * ((w + 1/2) log t - t + log sqrt(2 pi)) to log_acc, t = w + g + 1/2,
// and returns the Lanczos series so the caller can take one log at the end.
inline cvec lanczos_parts(const cvec& z, cvec& log_acc, double sign) {
  const cvec w{z.re - 1.0, z.im};
  cvec series{vd(kCoef[0]), vd(0.0)};
  for (int i = 1; i < 9; ++i) {
    const vd dr = w.re + static_cast<double>(i);
    const vd d = dr * dr + w.im * w.im;
    series.re += kCoef[i] * dr / d;
    series.im -= kCoef[i] * w.im / d;
  }
  const cvec t{w.re + (kG + 0.5), w.im};
  const vd log_abs_t = 0.5 * stdx::log(t.re * t.re + t.im * t.im);
  const vd arg_t = stdx::atan2(t.im, t.re);
  const vd pr = w.re + 0.5;
  log_acc.re += sign * (pr * log_abs_t - w.im * arg_t - t.re + kHalfLog2Pi);
  log_acc.im += sign * (pr * arg_t + w.im * log_abs_t - t.im);
  return series;
}

}  // namespace

std::size_t width() { return vd::size(); }

// Processes floor(n / width) * width nodes and returns how many were consumed.
std::size_t line_sum(const double* b, std::size_t nb, const double* a, std::size_t na, double c,
                     double log_x, const double* tau, std::size_t n, LineSum& out) {
  constexpr std::size_t W = vd::size();
  vd sum_re(0.0), sum_abs(0.0), peak(0.0);
  std::size_t k = 0;
  for (; k + W <= n; k += W) {
    const vd t(&tau[k], stdx::element_aligned);
    cvec acc{vd(-c * log_x), -t * log_x};
    cvec num{vd(1.0), vd(0.0)};
    cvec den{vd(1.0), vd(0.0)};
    for (std::size_t j = 0; j < nb; ++j) num = cmul(num, lanczos_parts({vd(b[j] + c), t}, acc, 1.0));
    for (std::size_t j = 0; j < na; ++j) den = cmul(den, lanczos_parts({vd(a[j] + c), t}, acc, -1.0));
    const cvec q = cdiv(num, den);
    const vd mag = stdx::exp(acc.re + 0.5 * stdx::log(q.re * q.re + q.im * q.im));
    const vd ph = acc.im + stdx::atan2(q.im, q.re);
    sum_re += mag * stdx::cos(ph);
    sum_abs += mag;
    peak = stdx::max(peak, mag);
  }
  out.sum_re += stdx::reduce(sum_re);
  out.sum_abs += stdx::reduce(sum_abs);
  double pk = 0.0;
  for (std::size_t i = 0; i < W; ++i) pk = pk > peak[i] ? pk : peak[i];
  out.peak = out.peak > pk ? out.peak : pk;
  return k;
}

}  // namespace pasi::specfun::kernel::PASI_KERNEL_NS
