#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pasi/poschl_teller.hpp"

namespace pasi::cs {

using cplx = std::complex<double>;

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ZKind { phase_only, gamma_weighted };

// Z_k = e^{-i alpha R(a_{k+1})} for PhaseOnly; GammaWeighted scales it by
// kappa sqrt((2rho + 2k + 1)(2rho + 2k)). The index offset j is 0.
struct ZChoice {
  ZKind kind = ZKind::phase_only;
  double alpha = 0.0;
  double kappa = 1.0;

  static ZChoice phase_only(double alpha = 0.0) { return ZChoice{ZKind::phase_only, alpha, 1.0}; }
  static ZChoice gamma_weighted(double kappa, double alpha = 0.0) {
    return ZChoice{ZKind::gamma_weighted, alpha, kappa};
  }

  // GammaWeighted needs lambda = kappa; throws std::invalid_argument otherwise.
  void validate(const PTParams& p) const;
  // Largest admissible x = |z|^2 (exclusive); infinite for PhaseOnly.
  double x_limit() const;
};

// A complex number held as ln|v|^2 and arg v (unwrapped).
struct LogPolar {
  double log_mod2 = 0.0;
  double phase = 0.0;
  double mod2() const;
  cplx value() const;
};

// Single factor Z_k; k may be -1.
cplx z_factor(const ZChoice& c, const PTParams& p, int k);

// prod_{k=m}^{n+m-1} Z_k with the phase fixed to e^{-i alpha E_n}.
LogPolar z_product_log(const ZChoice& c, const PTParams& p, std::size_t m, std::size_t n);
cplx z_product(const ZChoice& c, const PTParams& p, std::size_t m, std::size_t n);

// K_n^m = sqrt(prod_{k=m+1}^{n+m} S_k) / (Z-product * sqrt(prod_{k=1}^m S_k)),
// S_k = sum_{s=k}^{n+m} R(a_s). Raw uses direct sums and factor-by-factor Z
// products; closed uses Gamma ratios.
LogPolar coefficient_raw(const ZChoice& c, const PTParams& p, std::size_t m, std::size_t n);
LogPolar coefficient_closed(const ZChoice& c, const PTParams& p, std::size_t m, std::size_t n);

struct CoefficientTable {
  std::size_t m = 0;
  std::vector<double> log_mod2;
  std::vector<double> mod2;
  std::vector<double> phase;
};

CoefficientTable coefficient_table(const ZChoice& c, const PTParams& p, std::size_t m, std::size_t n_max);

// sum_n x^n / |K_n^m|^2 with the geometric tail rule.
struct SeriesSum {
  double log_sum = 0.0;    // ln of the full sum
  std::size_t terms = 0;   // terms used
  double last_ratio = 0.0; // ratio of the last two terms
};

SeriesSum inverse_norm_series(const ZChoice& c, const PTParams& p, std::size_t m, double x,
                              double rel_tol = 1e-16);

// N_m(x) = [sum_n x^n / |K_n^m|^2]^{-1/2}.
double normalization(const ZChoice& c, const PTParams& p, std::size_t m, double x);
// Same quantity through 3F4 (PhaseOnly) or 3F2 (GammaWeighted).
double normalization_hypergeometric(const ZChoice& c, const PTParams& p, std::size_t m, double x);
// Same quantity through the upper-reducible Meijer G forms.
double normalization_meijer(const ZChoice& c, const PTParams& p, std::size_t m, double x);

struct StateExpansion {
  cplx z;
  std::size_t m = 0;
  double norm_const = 0.0;
  std::vector<cplx> coeffs;  // amplitude on Fock index k = 0 .. m + truncation
  std::size_t truncation = 0;
};

// Amplitudes N_m z^n / K_n^m on index n + m. truncation = 0 picks the
// smallest one whose tail is below tail_tol of the partial sum.
StateExpansion state_coefficients(const ZChoice& c, const PTParams& p, cplx z, std::size_t m,
                                  std::size_t truncation = 0, double tail_tol = 1e-12);

// <z1, m1 | z2, m2> by direct summation over the Fock index.
cplx overlap(const ZChoice& c, const PTParams& p, cplx z1, std::size_t m1, cplx z2, std::size_t m2);

// Closed hypergeometric form; valid for alpha = 0 or m1 = m2.
cplx overlap_closed(const ZChoice& c, const PTParams& p, cplx z1, std::size_t m1, cplx z2, std::size_t m2);

// ||B_- psi - z Z_{-1} psi|| / ||z Z_{-1} psi|| for the m = 0 state at label z.
double lowering_eigenvalue_check(const ZChoice& c, const PTParams& p, cplx z, std::size_t truncation = 0);

}  // namespace pasi::cs
