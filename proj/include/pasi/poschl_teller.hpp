#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "pasi/susy_core.hpp"

namespace pasi {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Trigonometric Poschl-Teller well on 0 < x < pi a.
struct PTParams {
  double l = 2.0;
  double l_prime = 2.0;
  double a = 1.0;

  double lambda() const { return 1.0 / a; }
  double rho() const { return 0.5 * (l + l_prime); }
  double nu() const { return 2.0 * rho() - 1.0; }
  double u(double x) const { return x / (2.0 * a); }
  double width() const;

  // Throws std::invalid_argument unless l, l' >= 3/2 and a > 0.
  void validate() const;

  // Symmetric well with l = l' = rho and a = 1 / lambda.
  static PTParams symmetric(double rho, double lambda);
  // Parameters after k - 1 shape-invariance steps, (l, l') -> (l + k - 1, l' + k - 1).
  PTParams shifted(std::size_t k) const;
};

// V(x) = (1/4a^2) [l(l-1)/sin^2 u + l'(l'-1)/cos^2 u] - (l + l')^2 / 4a^2
double potential_value(const PTParams& p, double x);

// W(x) = -(1/2a) [l cot u - l' tan u]
double superpotential_value(const PTParams& p, double x);
double superpotential_derivative(const PTParams& p, double x);

// R(a_k) = lambda^2 (l + l' + 2k - 1)
double remainder(const PTParams& p, std::size_t k);

// E_n = lambda^2 n (n + 2 rho)
double energy(const PTParams& p, std::size_t n);

// Closed Gamma forms of the remainder products that enter K_n^m:
//   numerator   = prod_{k=m+1}^{n+m} sum_{s=k}^{n+m} R(a_s)
//               = lambda^{2n} Gamma(n+1) Gamma(2n+2m+2rho) / Gamma(n+2m+2rho)
//   denominator = prod_{k=1}^{m} sum_{s=k}^{n+m} R(a_s)
//               = lambda^{2m} Gamma(n+m+1) Gamma(n+2m+2rho) / (Gamma(n+1) Gamma(n+m+2rho))
struct GammaProducts {
  double log_numerator = 0.0;
  double log_denominator = 0.0;
  double numerator() const;
  double denominator_extra() const;
};

GammaProducts gamma_products(const PTParams& p, std::size_t m, std::size_t n);

// Raw products of the same quantities, summing remainders term by term.
GammaProducts raw_products(const PTParams& p, std::size_t m, std::size_t n);

// sin^{l+k-1}(u) cos^{l'+k-1}(u), the unnormalized ground state for a_k.
double ground_state_shape(const PTParams& p, std::size_t k, double x);

// Chain a_k = l + l' + 2(k - 1) with R(a) = lambda^2 (a + 1).
susy::ParameterChain parameter_chain(const PTParams& p);

// The shape-invariant model with analytic ground states for every a_k.
susy::ShapeInvariantModel shape_invariant_model(const PTParams& p);

}  // namespace pasi
