#include "pasi/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pasi::thermal {
namespace {

constexpr double kTailLog = 36.85;  // -ln(1e-16)

std::size_t resolve_truncation(const PTParams& p, const ThermalConfig& cfg) {
  return cfg.truncation > 0 ? cfg.truncation : boltzmann_truncation(p, cfg.beta);
}

// sum_n x^n e^{-beta E_n} / |K_n^m|^2 as a log, summed until the terms stop mattering.
double log_boltzmann_series(const PTParams& p, const cs::ZChoice& c, std::size_t m, double beta, double x) {
  const double log_x = x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
  auto log_term = [&](std::size_t n) {
    const double lk = cs::coefficient_closed(c, p, m, n).log_mod2;
    const double base = n == 0 ? 0.0 : static_cast<double>(n) * log_x;
    return base - lk - beta * energy(p, n);
  };
  double ref = log_term(0);
  double sum = 1.0;
  if (x == 0.0) return ref;
  double prev = ref;
  for (std::size_t n = 1; n < 100000; ++n) {
    const double lt = log_term(n);
    if (lt > ref + 300.0) {
      sum *= std::exp(ref - lt);
      ref = lt;
    }
    const double t = std::exp(lt - ref);
    sum += t;
    // Gaussian decay in n: once a term is falling and negligible the rest are smaller still.
    if (lt < prev && t <= 1e-17 * sum) break;
    prev = lt;
  }
  return ref + std::log(sum);
}

measure::WeightSpec weight_spec(const PTParams& p, const cs::ZChoice& c, std::size_t m) {
  return measure::WeightSpec{c, p, m, specfun::SeriesControl::contour()};
}

double relative(double printed, double direct) {
  const double d = std::abs(direct);
  return d > 0.0 ? (printed - direct) / d : printed - direct;
}

struct Printed {
  double mean_N, mean_N2, g2, mandel_q;
};

// The printed closed forms with a given occupation nbar.
Printed printed_forms(const PTParams& p, const cs::ZChoice& c, std::size_t m_count, double beta, double nbar) {
  const double m = static_cast<double>(m_count);
  const double r2 = p.l + p.l_prime;
  const double a1 = 1.0 / (m + 1.0);
  const double a2 = 1.0 / (m + 1.0 + r2);
  const double q = 1.0 - std::exp(-beta);
  const double n1 = nbar, n2 = nbar * nbar, n3 = n2 * nbar, n4 = n3 * nbar;
  const double bracket_n = 1.0 + (a1 + a2) * n1 + a1 * a2 * (n1 / q + n2);
  const double bracket_n2 = 1.0 + 2.0 * (a1 + a2) * n1 + (a1 * a1 + a2 * a2 + 4.0 * a1 * a2) * (n1 / q + n2) +
                            2.0 * (a1 * a1 * a2 + a1 * a2 * a2) * (n1 / (q * q) + 4.0 * n2 / q + n3) +
                            a1 * a1 * a2 * a2 * (n1 / (q * q * q) + 11.0 * n2 / (q * q) + 11.0 * n3 / q + n4);
  const double curly = (a1 + a2) * (a1 + a2) * n1 / q +
                       (a1 * a1 * a2 + a1 * a2 * a2) * (2.0 * n1 / (q * q) + 6.0 * n2 / q) +
                       a1 * a1 * a2 * a2 * (n1 / (q * q * q) + 10.0 * n2 / (q * q) + 9.0 * n3 / q);
  Printed out{};
  if (c.kind == cs::ZKind::phase_only) {
    const double lam = p.lambda();
    const double amod = p.a;
    const double cpow = std::pow(amod * amod / 4.0, m + 1.0);
    const double core = m * (m + r2) * a1 * a2;
    out.mean_N = cpow * std::pow(lam, -2.0 * (m - 1.0)) * core * bracket_n;
    out.mean_N2 = cpow * std::pow(lam, -2.0 * (m - 2.0)) * core * core * bracket_n2;
    const double scaled = std::pow(lam, m) * out.mean_N / std::sqrt(cpow);
    out.g2 = 1.0 + curly / (scaled * scaled) - 1.0 / scaled;
    out.mandel_q = curly / scaled - 1.0;
  } else {
    const double k2 = c.kappa * c.kappa;
    const double core = m * (m + r2);
    out.mean_N = k2 * core * bracket_n;
    out.mean_N2 = k2 * k2 * core * core * bracket_n2;
    out.g2 = 1.0 + curly / (out.mean_N * out.mean_N) - 1.0 / out.mean_N;
    out.mandel_q = curly / out.mean_N - 1.0;
  }
  return out;
}

}  // namespace

void ThermalConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("ThermalConfig: beta must be > 0");
}

std::size_t boltzmann_truncation(const PTParams& p, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("boltzmann_truncation: beta must be > 0");
  std::size_t n = 1;
  while (beta * energy(p, n) < kTailLog) ++n;
  return n;
}

double partition_function(const PTParams& p, const ThermalConfig& cfg) {
  cfg.validate();
  const std::size_t top = resolve_truncation(p, cfg);
  double z = 0.0;
  for (std::size_t n = top + 1; n-- > 0;) z += std::exp(-cfg.beta * energy(p, n));
  return z;
}

ThermalReport thermal_report(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg) {
  cfg.validate();
  choice.validate(p);
  ThermalReport r;
  r.truncation = resolve_truncation(p, cfg);
  double z = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t n = r.truncation + 1; n-- > 0;) {
    const double w = std::exp(-cfg.beta * energy(p, n));
    const double e = energy(p, n + cfg.m);
    z += w;
    s1 += w * e;
    s2 += w * e * e;
  }
  r.partition = z;
  r.mean_N = s1 / z;
  r.mean_N2 = s2 / z;
  r.g2 = (r.mean_N2 - r.mean_N) / (r.mean_N * r.mean_N);
  r.mandel_q = r.mean_N * (r.g2 - 1.0);
  return r;
}

double husimi(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg, std::complex<double> z) {
  cfg.validate();
  choice.validate(p);
  const double x = std::norm(z);
  const double log_series = log_boltzmann_series(p, choice, cfg.m, cfg.beta, x);
  const double log_inv_n2 = cs::inverse_norm_series(choice, p, cfg.m, x).log_sum;
  return std::exp(log_series - log_inv_n2) / partition_function(p, cfg);
}

double occupation_a(const PTParams& p, double beta) {
  const double a = beta * p.lambda() * p.lambda();
  return 1.0 / std::expm1(a);
}

double p_function(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg, double x) {
  cfg.validate();
  const double nbar = occupation_a(p, cfg.beta);
  const double k = (nbar + 1.0) / nbar;
  const auto spec = weight_spec(p, choice, cfg.m);
  return measure::moment_density(spec, k * x) / (nbar * measure::moment_density(spec, x));
}

namespace {

// W_m(x) P(x) = W_m(k x) / nbar_A, written out so that no ratio of small numbers is formed.
// Integrals against pi omega_m = W_m / N_m^2 then carry the factor 1 / N_m^2.
double weighted_p(const measure::WeightSpec& spec, double nbar, double x) {
  return measure::moment_density(spec, (nbar + 1.0) / nbar * x) / nbar;
}

double p_split(const PTParams& p, const cs::ZChoice& choice, std::size_t m, std::size_t n) {
  return measure::radial_split(weight_spec(p, choice, m), n);
}

}  // namespace

double p_normalization(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg,
                       const measure::QuadratureControl& q) {
  cfg.validate();
  const auto spec = weight_spec(p, choice, cfg.m);
  const double nbar = occupation_a(p, cfg.beta);
  auto f = [&](double x) {
    const double w = weighted_p(spec, nbar, x);
    if (w == 0.0) return 0.0;
    return w * std::exp(cs::inverse_norm_series(choice, p, cfg.m, x).log_sum);
  };
  return measure::integrate_radial(f, spec.x_max(), p_split(p, choice, cfg.m, 0), q);
}

DiagonalCheck p_diagonal(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg, std::size_t n,
                         const measure::QuadratureControl& q) {
  cfg.validate();
  const auto spec = weight_spec(p, choice, cfg.m);
  const double nbar = occupation_a(p, cfg.beta);
  const double nn = static_cast<double>(n);
  auto f = [&](double x) { return std::pow(x, nn) * weighted_p(spec, nbar, x); };
  DiagonalCheck d;
  d.n = n;
  d.value = measure::integrate_radial(f, spec.x_max(), p_split(p, choice, cfg.m, n), q) /
            cs::coefficient_closed(choice, p, cfg.m, n).mod2();
  const double a = cfg.beta * p.lambda() * p.lambda();
  d.target = std::exp(-a * nn) * -std::expm1(-a);
  d.rel_err = std::abs(d.value - d.target) / d.target;
  return d;
}

double p_mean_x(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg,
                const measure::QuadratureControl& q) {
  cfg.validate();
  const auto spec = weight_spec(p, choice, cfg.m);
  const double nbar = occupation_a(p, cfg.beta);
  auto f = [&](double x) {
    const double w = weighted_p(spec, nbar, x);
    if (w == 0.0) return 0.0;
    return x * w * std::exp(cs::inverse_norm_series(choice, p, cfg.m, x).log_sum);
  };
  return measure::integrate_radial(f, spec.x_max(), p_split(p, choice, cfg.m, 1), q);
}

double trace_check(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg,
                   const measure::QuadratureControl& q) {
  cfg.validate();
  const auto spec = weight_spec(p, choice, cfg.m);
  const double z = partition_function(p, cfg);
  // pi omega_m = W_m / N_m^2 and the Husimi function carries N_m^2, so the two cancel.
  auto f = [&](double x) {
    return measure::moment_density(spec, x) * std::exp(log_boltzmann_series(p, choice, cfg.m, cfg.beta, x)) / z;
  };
  return measure::integrate_radial(f, spec.x_max(), p_split(p, choice, cfg.m, 2), q);
}

CsExpectation cs_expectations(const PTParams& p, const cs::ZChoice& choice, std::complex<double> z, std::size_t m) {
  const cs::StateExpansion s = cs::state_coefficients(choice, p, z, m, 0, 1e-16);
  CsExpectation e;
  for (std::size_t k = m; k < s.coeffs.size(); ++k) {
    const double w = std::norm(s.coeffs[k]);
    const double en = energy(p, k);
    e.mean_N += w * en;
    e.mean_N2 += w * en * en;
  }
  return e;
}

CrosscheckReport closed_form_crosscheck(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg) {
  cfg.validate();
  const ThermalReport r = thermal_report(p, choice, cfg);
  ThermalConfig doubled = cfg;
  doubled.truncation = 2 * r.truncation;
  const ThermalReport r2 = thermal_report(p, choice, doubled);

  const Printed pr = printed_forms(p, choice, cfg.m, cfg.beta, 1.0 / std::expm1(-cfg.beta));
  const Printed ps = printed_forms(p, choice, cfg.m, cfg.beta, 1.0 / std::expm1(cfg.beta));

  CrosscheckReport rep;
  auto add = [&](const char* name, double direct, double direct2, double printed, double sub) {
    rep.entries.push_back({name, direct, printed, relative(printed, direct), sub, relative(sub, direct)});
    const double d = std::abs(direct) > 0.0 ? std::abs(direct2 - direct) / std::abs(direct) : std::abs(direct2);
    rep.truncation_delta = std::max(rep.truncation_delta, d);
  };
  add("mean_N", r.mean_N, r2.mean_N, pr.mean_N, ps.mean_N);
  add("mean_N2", r.mean_N2, r2.mean_N2, pr.mean_N2, ps.mean_N2);
  add("g2", r.g2, r2.g2, pr.g2, ps.g2);
  add("mandel_q", r.mandel_q, r2.mandel_q, pr.mandel_q, ps.mandel_q);
  return rep;
}

}  // namespace pasi::thermal
