#pragma once

// Line sums for Mellin-Barnes integrals along Re(s) = c.
//
// For nodes tau_k the kernel accumulates
//
//     f(tau) = exp( sum_j lnG(b_j + s) - sum_j lnG(a_j + s) - s * L ),  s = c + i tau
//
// which is the integrand of a lower-only Meijer G at x = exp(L). The scalar
// routine is the reference. The simd routines evaluate the same Lanczos
// series lane-wise; one variant is built per instruction set and the widest
// one the CPU supports is picked at run time.

#include <cstddef>
#include <span>
#include <vector>

namespace pasi::specfun::kernel {

struct LineSum {
  double sum_re = 0.0;   // sum of Re f(tau_k)
  double sum_abs = 0.0;  // sum of |f(tau_k)|
  double peak = 0.0;     // max |f(tau_k)|
};

struct LineTerms {
  std::span<const double> b;  // numerator Gamma(b_j + s)
  std::span<const double> a;  // denominator Gamma(a_j + s)
  double c = 0.0;
  double log_x = 0.0;
};

enum class Isa { sse2, avx2, avx512 };

// True when every Gamma argument on the line has real part >= 1/2, the
// region where the kernels skip the reflection formula.
bool simd_eligible(const LineTerms& t);

LineSum line_sum_scalar(const LineTerms& t, std::span<const double> tau);

// Uses the best variant for this CPU.
LineSum line_sum_simd(const LineTerms& t, std::span<const double> tau);
// Uses a specific variant; throws std::invalid_argument if the CPU lacks it.
LineSum line_sum_simd(const LineTerms& t, std::span<const double> tau, Isa isa);

std::vector<Isa> available_isas();
Isa best_isa();
const char* isa_name(Isa isa);
std::size_t simd_width(Isa isa);

}  // namespace pasi::specfun::kernel
