#include "pasi/contour_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <tuple>

namespace pasi::specfun::kernel {

#define PASI_DECLARE_VARIANT(ns)                                                              \
  namespace ns {                                                                              \
  std::size_t width();                                                                        \
  std::size_t line_sum(const double* b, std::size_t nb, const double* a, std::size_t na,      \
                       double c, double log_x, const double* tau, std::size_t n, LineSum& out); \
  }
PASI_DECLARE_VARIANT(sse2)
PASI_DECLARE_VARIANT(avx2)
PASI_DECLARE_VARIANT(avx512)
#undef PASI_DECLARE_VARIANT

namespace {

constexpr double kG = 7.0;
constexpr double kCoef[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                             771.32342877765313,   -176.61502916214059,   12.507343278686905,
                             -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kHalfLog2Pi = 0.91893853320467274178;

std::complex<double> lanczos_log(std::complex<double> z) {
  const std::complex<double> w = z - 1.0;
  std::complex<double> acc = kCoef[0];
  for (int i = 1; i < 9; ++i) acc += kCoef[i] / (w + static_cast<double>(i));
  const std::complex<double> t = w + kG + 0.5;
  return kHalfLog2Pi + (w + 0.5) * std::log(t) - t + std::log(acc);
}

bool cpu_has(Isa isa) {
  __builtin_cpu_init();
  switch (isa) {
    case Isa::sse2:
      return true;
    case Isa::avx2:
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    case Isa::avx512:
      return __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512dq");
  }
  return false;
}

}  // namespace

bool simd_eligible(const LineTerms& t) {
  for (double b : t.b)
    if (b + t.c < 0.5) return false;
  for (double a : t.a)
    if (a + t.c < 0.5) return false;
  return true;
}

LineSum line_sum_scalar(const LineTerms& t, std::span<const double> tau) {
  LineSum out;
  for (double tk : tau) {
    const std::complex<double> s(t.c, tk);
    std::complex<double> acc = -s * t.log_x;
    for (double b : t.b) acc += lanczos_log(b + s);
    for (double a : t.a) acc -= lanczos_log(a + s);
    const double mag = std::exp(acc.real());
    out.sum_re += mag * std::cos(acc.imag());
    out.sum_abs += mag;
    out.peak = std::max(out.peak, mag);
  }
  return out;
}

LineSum line_sum_simd(const LineTerms& t, std::span<const double> tau, Isa isa) {
  if (!cpu_has(isa)) throw std::invalid_argument(std::string("line_sum_simd: CPU lacks ") + isa_name(isa));
  LineSum out;
  const auto args = std::make_tuple(t.b.data(), t.b.size(), t.a.data(), t.a.size(), t.c, t.log_x,
                                    tau.data(), tau.size());
  std::size_t done = 0;
  switch (isa) {
    case Isa::sse2:
      done = std::apply([&](auto... v) { return sse2::line_sum(v..., out); }, args);
      break;
    case Isa::avx2:
      done = std::apply([&](auto... v) { return avx2::line_sum(v..., out); }, args);
      break;
    case Isa::avx512:
      done = std::apply([&](auto... v) { return avx512::line_sum(v..., out); }, args);
      break;
  }
  const LineSum tail = line_sum_scalar(t, tau.subspan(done));
  out.sum_re += tail.sum_re;
  out.sum_abs += tail.sum_abs;
  out.peak = std::max(out.peak, tail.peak);
  return out;
}

LineSum line_sum_simd(const LineTerms& t, std::span<const double> tau) {
  static const Isa isa = best_isa();
  return line_sum_simd(t, tau, isa);
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa i : {Isa::sse2, Isa::avx2, Isa::avx512})
    if (cpu_has(i)) out.push_back(i);
  return out;
}

Isa best_isa() { return available_isas().back(); }

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::sse2:
      return "sse2";
    case Isa::avx2:
      return "avx2";
    case Isa::avx512:
      return "avx512";
  }
  return "unknown";
}

std::size_t simd_width(Isa isa) {
  switch (isa) {
    case Isa::sse2:
      return sse2::width();
    case Isa::avx2:
      return avx2::width();
    case Isa::avx512:
      return avx512::width();
  }
  return 1;
}

}  // namespace pasi::specfun::kernel
