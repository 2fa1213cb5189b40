#include "pasi/poschl_teller.hpp"

#include <cmath>
#include <numbers>

#include "pasi/specfun.hpp"

namespace pasi {
namespace {

void check_interior(const PTParams& p, double x) {
  if (!(x > 0.0 && x < p.width())) throw DomainError("x outside (0, pi a)");
}

bool is_even_integer(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-12 && static_cast<long>(r) % 2 == 0;
}

}  // namespace

double PTParams::width() const { return std::numbers::pi * a; }

void PTParams::validate() const {
  if (!(l >= 1.5) || !(l_prime >= 1.5)) throw std::invalid_argument("PTParams: l and l' must be >= 3/2");
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("PTParams: a must be > 0");
}

PTParams PTParams::symmetric(double rho, double lambda) { return PTParams{rho, rho, 1.0 / lambda}; }

PTParams PTParams::shifted(std::size_t k) const {
  const double d = static_cast<double>(k) - 1.0;
  return PTParams{l + d, l_prime + d, a};
}

double potential_value(const PTParams& p, double x) {
  check_interior(p, x);
  const double s = std::sin(p.u(x));
  const double c = std::cos(p.u(x));
  const double f = 1.0 / (4.0 * p.a * p.a);
  const double sum = p.l + p.l_prime;
  return f * (p.l * (p.l - 1.0) / (s * s) + p.l_prime * (p.l_prime - 1.0) / (c * c)) - f * sum * sum;
}

double superpotential_value(const PTParams& p, double x) {
  check_interior(p, x);
  const double u = p.u(x);
  return -(p.l / std::tan(u) - p.l_prime * std::tan(u)) / (2.0 * p.a);
}

double superpotential_derivative(const PTParams& p, double x) {
  check_interior(p, x);
  const double s = std::sin(p.u(x));
  const double c = std::cos(p.u(x));
  return (p.l / (s * s) + p.l_prime / (c * c)) / (4.0 * p.a * p.a);
}

double remainder(const PTParams& p, std::size_t k) {
  const double lam = p.lambda();
  return lam * lam * (p.l + p.l_prime + 2.0 * static_cast<double>(k) - 1.0);
}

double energy(const PTParams& p, std::size_t n) {
  const double lam = p.lambda();
  const double nn = static_cast<double>(n);
  return lam * lam * nn * (nn + 2.0 * p.rho());
}

double GammaProducts::numerator() const { return std::exp(log_numerator); }
double GammaProducts::denominator_extra() const { return std::exp(log_denominator); }

GammaProducts gamma_products(const PTParams& p, std::size_t m, std::size_t n) {
  using specfun::log_gamma;
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  const double r2 = 2.0 * p.rho();
  const double log_lam2 = 2.0 * std::log(p.lambda());
  GammaProducts g;
  g.log_numerator =
      nn * log_lam2 + log_gamma(nn + 1.0) + log_gamma(2.0 * nn + 2.0 * mm + r2) - log_gamma(nn + 2.0 * mm + r2);
  g.log_denominator = mm * log_lam2 + log_gamma(nn + mm + 1.0) + log_gamma(nn + 2.0 * mm + r2) -
                      log_gamma(nn + 1.0) - log_gamma(nn + mm + r2);
  return g;
}

GammaProducts raw_products(const PTParams& p, std::size_t m, std::size_t n) {
  const std::size_t top = n + m;
  auto partial = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t j = k; j <= top; ++j) s += remainder(p, j);
    return s;
  };
  GammaProducts g;
  for (std::size_t k = m + 1; k <= top; ++k) g.log_numerator += std::log(partial(k));
  for (std::size_t k = 1; k <= m; ++k) g.log_denominator += std::log(partial(k));
  return g;
}

double ground_state_shape(const PTParams& p, std::size_t k, double x) {
  check_interior(p, x);
  const double d = static_cast<double>(k) - 1.0;
  return std::pow(std::sin(p.u(x)), p.l + d) * std::pow(std::cos(p.u(x)), p.l_prime + d);
}

susy::ParameterChain parameter_chain(const PTParams& p) {
  const double lam2 = p.lambda() * p.lambda();
  return susy::ParameterChain{p.l + p.l_prime, 2.0, [lam2](double a) { return lam2 * (a + 1.0); }};
}

susy::ShapeInvariantModel shape_invariant_model(const PTParams& p) {
  p.validate();
  susy::ShapeInvariantModel m;
  m.chain = parameter_chain(p);
  m.x_min = 0.0;
  m.x_max = p.width();
  m.superpotential = [p](std::size_t k, double x) { return superpotential_value(p.shifted(k), x); };
  m.superpotential_derivative = [p](std::size_t k, double x) { return superpotential_derivative(p.shifted(k), x); };
  m.potential = [p](std::size_t k, double x) { return potential_value(p.shifted(k), x); };
  m.ground_state = [p](std::size_t k, std::size_t n) {
    const PTParams q = p.shifted(k);
    // sin^e near x = 0 continues evenly for even integer e, and likewise cos^e' at the far end.
    const auto left = is_even_integer(q.l) ? susy::Parity::even : susy::Parity::odd;
    const auto right = is_even_integer(q.l_prime) ? susy::Parity::even : susy::Parity::odd;
    return susy::sample(0.0, q.width(), n, [q](double x) { return ground_state_shape(q, 1, x); }, left, right);
  };
  return m;
}

}  // namespace pasi
