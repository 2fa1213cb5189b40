#include "pasi/coherent_states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pasi/specfun.hpp"

namespace pasi::cs {
namespace {

using specfun::log_gamma;

constexpr double kRatioLimit = 0.99;
constexpr std::size_t kMaxTerms = 200000;

double two_rho(const PTParams& p) { return p.l + p.l_prime; }

// E_n as the partial sum of remainders.
double energy_partial(const PTParams& p, std::size_t n) {
  double e = 0.0;
  for (std::size_t k = 1; k <= n; ++k) e += remainder(p, k);
  return e;
}

void check_x(const ZChoice& c, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("|z|^2 must be finite and >= 0");
  if (x >= c.x_limit()) throw DomainError("|z|^2 outside the convergence disc");
}

// ln(x^n / |K_n^m|^2) for n = 0, 1, ... until the tail rule is met.
struct TermWalker {
  const ZChoice& c;
  const PTParams& p;
  std::size_t m;
  double log_x;

  double log_term(std::size_t n) const {
    const double lk = coefficient_closed(c, p, m, n).log_mod2;
    return n == 0 ? -lk : static_cast<double>(n) * log_x - lk;
  }
};

}  // namespace

void ZChoice::validate(const PTParams& p) const {
  p.validate();
  if (!std::isfinite(alpha)) throw std::invalid_argument("ZChoice: alpha must be finite");
  if (kind == ZKind::gamma_weighted) {
    if (!(kappa > 0.0)) throw std::invalid_argument("ZChoice: kappa must be > 0");
    const double lam = p.lambda();
    if (std::abs(lam - kappa) > 1e-12 * std::max(1.0, lam))
      throw std::invalid_argument("ZChoice: GammaWeighted requires lambda = kappa");
  }
}

double ZChoice::x_limit() const {
  return kind == ZKind::gamma_weighted ? 1.0 : std::numeric_limits<double>::infinity();
}

double LogPolar::mod2() const { return std::exp(log_mod2); }
cplx LogPolar::value() const { return std::polar(std::exp(0.5 * log_mod2), phase); }

cplx z_factor(const ZChoice& c, const PTParams& p, int k) {
  const double lam = p.lambda();
  const double kk = static_cast<double>(k);
  const double r = lam * lam * (two_rho(p) + 2.0 * kk + 1.0);
  double mod = 1.0;
  if (c.kind == ZKind::gamma_weighted) mod = c.kappa * std::sqrt((two_rho(p) + 2.0 * kk + 1.0) * (two_rho(p) + 2.0 * kk));
  return std::polar(mod, -c.alpha * r);
}

LogPolar z_product_log(const ZChoice& c, const PTParams& p, std::size_t m, std::size_t n) {
  LogPolar z;
  z.phase = -c.alpha * energy(p, n);
  if (c.kind == ZKind::gamma_weighted) {
    const double nn = static_cast<double>(n), mm = static_cast<double>(m);
    z.log_mod2 = 2.0 * nn * std::log(c.kappa) + log_gamma(2.0 * nn + 2.0 * mm + two_rho(p)) -
                 log_gamma(2.0 * mm + two_rho(p));
  }
  return z;
}

cplx z_product(const ZChoice& c, const PTParams& p, std::size_t m, std::size_t n) {
  return z_product_log(c, p, m, n).value();
}

LogPolar coefficient_raw(const ZChoice& c, const PTParams& p, std::size_t m, std::size_t n) {
  c.validate(p);
  const GammaProducts g = raw_products(p, m, n);
  double log_z = 0.0;
  for (std::size_t k = m; k < n + m; ++k) log_z += std::log(std::norm(z_factor(c, p, static_cast<int>(k))));
  return LogPolar{g.log_numerator - g.log_denominator - log_z, c.alpha * energy_partial(p, n)};
}

LogPolar coefficient_closed(const ZChoice& c, const PTParams& p, std::size_t m, std::size_t n) {
  const GammaProducts g = gamma_products(p, m, n);
  const LogPolar z = z_product_log(c, p, m, n);
  return LogPolar{g.log_numerator - g.log_denominator - z.log_mod2, -z.phase};
}

CoefficientTable coefficient_table(const ZChoice& c, const PTParams& p, std::size_t m, std::size_t n_max) {
  c.validate(p);
  CoefficientTable t;
  t.m = m;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const LogPolar k = coefficient_closed(c, p, m, n);
    t.log_mod2.push_back(k.log_mod2);
    t.mod2.push_back(k.mod2());
    t.phase.push_back(k.phase);
  }
  return t;
}

SeriesSum inverse_norm_series(const ZChoice& c, const PTParams& p, std::size_t m, double x, double rel_tol) {
  c.validate(p);
  if (c.kind == ZKind::gamma_weighted && x >= 1.0) throw DomainError("normalization series diverges for |z|^2 >= 1");
  check_x(c, x);
  const TermWalker w{c, p, m, x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity()};
  SeriesSum out;
  double ref = w.log_term(0);
  double sum = 1.0;
  double prev = ref;
  out.terms = 1;
  if (x == 0.0) {
    out.log_sum = ref;
    return out;
  }
  for (std::size_t n = 1; n < kMaxTerms; ++n) {
    const double lt = w.log_term(n);
    if (lt > ref + 300.0) {
      sum *= std::exp(ref - lt);
      ref = lt;
    }
    const double t = std::exp(lt - ref);
    sum += t;
    const double r = std::exp(lt - prev);
    prev = lt;
    out.terms = n + 1;
    out.last_ratio = r;
    if (r < kRatioLimit && t * r / (1.0 - r) <= rel_tol * sum) {
      out.log_sum = ref + std::log(sum);
      return out;
    }
  }
  throw TruncationError("normalization series: term ratio did not fall below 0.99");
}

double normalization(const ZChoice& c, const PTParams& p, std::size_t m, double x) {
  return std::exp(-0.5 * inverse_norm_series(c, p, m, x).log_sum);
}

double normalization_hypergeometric(const ZChoice& c, const PTParams& p, std::size_t m, double x) {
  c.validate(p);
  check_x(c, x);
  const double mm = static_cast<double>(m);
  const double r2 = two_rho(p);
  const double lam = p.lambda();
  double log_pref, f;
  if (c.kind == ZKind::phase_only) {
    log_pref = 2.0 * mm * std::log(lam) + log_gamma(mm + 1.0) + log_gamma(2.0 * mm + r2) - log_gamma(mm + r2);
    f = specfun::hypergeometric_pfq({mm + 1.0, 2.0 * mm + r2, 2.0 * mm + r2},
                                    {1.0, mm + 0.5 * r2, mm + 0.5 * r2 + 0.5, mm + r2}, x / (4.0 * lam * lam));
  } else {
    log_pref = 2.0 * mm * std::log(c.kappa) + log_gamma(mm + 1.0) + log_gamma(2.0 * mm + r2) - log_gamma(mm + r2);
    f = specfun::hypergeometric_pfq({mm + 1.0, 2.0 * mm + r2, 2.0 * mm + r2}, {1.0, mm + r2}, x);
  }
  return 1.0 / std::sqrt(std::exp(log_pref) * f);
}

double normalization_meijer(const ZChoice& c, const PTParams& p, std::size_t m, double x) {
  c.validate(p);
  check_x(c, x);
  const double mm = static_cast<double>(m);
  const double r2 = two_rho(p);
  const double rho = 0.5 * r2;
  const double lam = p.lambda();
  specfun::MeijerGSpec g;
  g.m_idx = 1;
  g.n_idx = 3;
  double log_pref, arg;
  if (c.kind == ZKind::phase_only) {
    g.a_list = {-mm, 1.0 - 2.0 * mm - r2, 1.0 - 2.0 * mm - r2};
    g.b_list = {0.0, 0.0, 1.0 - mm - rho, 1.0 - mm - r2, 0.5 - mm - rho};
    log_pref = 2.0 * mm * std::log(lam) + log_gamma(mm + rho) + log_gamma(mm + rho + 0.5) - log_gamma(2.0 * mm + r2);
    arg = -x / (4.0 * lam * lam);
  } else {
    const double nu = r2 - 1.0;
    g.a_list = {-mm, -2.0 * mm - nu, -2.0 * mm - nu};
    g.b_list = {0.0, 0.0, -mm - nu};
    log_pref = 2.0 * mm * std::log(c.kappa) - log_gamma(2.0 * mm + nu + 1.0);
    arg = -x;
  }
  return 1.0 / std::sqrt(std::exp(log_pref) * specfun::meijer_g(g, arg, specfun::SeriesControl::series()));
}

StateExpansion state_coefficients(const ZChoice& c, const PTParams& p, cplx z, std::size_t m,
                                  std::size_t truncation, double tail_tol) {
  c.validate(p);
  const double x = std::norm(z);
  check_x(c, x);
  const TermWalker w{c, p, m, x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity()};

  std::size_t top = truncation;
  if (x > 0.0) {
    // Partial sums relative to the first term; the tail is bounded geometrically.
    const double ref = w.log_term(0);
    auto term = [&](std::size_t n) { return std::exp(w.log_term(n) - ref); };
    if (truncation == 0) {
      double sum = 1.0, prev = 1.0;
      std::size_t n = 1;
      for (;; ++n) {
        if (n >= kMaxTerms) throw TruncationError("state_coefficients: no admissible truncation");
        const double t = term(n);
        sum += t;
        const double r = t / prev;
        prev = t;
        if (r < kRatioLimit && t * r / (1.0 - r) <= tail_tol * sum) break;
      }
      top = n;
    } else {
      double sum = 0.0;
      for (std::size_t n = 0; n <= truncation; ++n) sum += term(n);
      const double t1 = term(truncation + 1), t2 = term(truncation + 2);
      const double r = t1 > 0.0 ? t2 / t1 : 0.0;
      if (r >= kRatioLimit || t1 / (1.0 - r) > tail_tol * sum)
        throw TruncationError("state_coefficients: truncation leaves a tail above tolerance");
    }
  }

  StateExpansion s;
  s.z = z;
  s.m = m;
  s.truncation = top;
  s.norm_const = normalization(c, p, m, x);
  s.coeffs.assign(m + top + 1, cplx(0.0, 0.0));
  const double log_r = x > 0.0 ? 0.5 * std::log(x) : 0.0;
  const double arg = std::arg(z);
  for (std::size_t n = 0; n <= top; ++n) {
    const LogPolar k = coefficient_closed(c, p, m, n);
    if (x == 0.0 && n > 0) break;
    const double nn = static_cast<double>(n);
    s.coeffs[n + m] = std::polar(s.norm_const * std::exp(nn * log_r - 0.5 * k.log_mod2), nn * arg - k.phase);
  }
  return s;
}

cplx overlap(const ZChoice& c, const PTParams& p, cplx z1, std::size_t m1, cplx z2, std::size_t m2) {
  const StateExpansion a0 = state_coefficients(c, p, z1, m1);
  const StateExpansion b0 = state_coefficients(c, p, z2, m2);
  const std::size_t len = std::max(a0.coeffs.size(), b0.coeffs.size());
  auto extend = [&](const StateExpansion& s0, cplx z, std::size_t m) {
    if (s0.coeffs.size() == len) return s0;
    if (std::norm(z) == 0.0) {
      StateExpansion s = s0;
      s.coeffs.resize(len, cplx(0.0, 0.0));
      return s;
    }
    return state_coefficients(c, p, z, m, len - 1 - m, 1.0);
  };
  const StateExpansion a = extend(a0, z1, m1);
  const StateExpansion b = extend(b0, z2, m2);
  cplx acc(0.0, 0.0);
  for (std::size_t k = 0; k < len; ++k) acc += std::conj(a.coeffs[k]) * b.coeffs[k];
  return acc;
}

cplx overlap_closed(const ZChoice& c, const PTParams& p, cplx z1, std::size_t m1, cplx z2, std::size_t m2) {
  if (m1 > m2) return std::conj(overlap_closed(c, p, z2, m2, z1, m1));
  if (c.alpha != 0.0 && m1 != m2)
    throw std::invalid_argument("overlap_closed: needs alpha = 0 unless m1 = m2");
  c.validate(p);
  // Bra (z1, m'), ket (z2, m) with m >= m'.
  const double mp = static_cast<double>(m1), mm = static_cast<double>(m2);
  const std::size_t d = m2 - m1;
  const double dd = static_cast<double>(d);
  const double r2 = two_rho(p);
  const cplx w = std::conj(z1) * z2;
  double log_pref;
  cplx f;
  if (c.kind == ZKind::phase_only) {
    const double lam = p.lambda();
    log_pref = 2.0 * mp * std::log(lam) + log_gamma(mm + 1.0) + log_gamma(mm + mp + r2) - log_gamma(dd + 1.0) -
               log_gamma(mm + r2);
    f = specfun::hypergeometric_pfq({mm + 1.0, 2.0 * mm + r2, mm + mp + r2},
                                    {dd + 1.0, mm + 0.5 * r2, mm + 0.5 * r2 + 0.5, mm + r2}, w / (4.0 * lam * lam));
  } else {
    log_pref = (mm + mp) * std::log(c.kappa) - 0.5 * (log_gamma(2.0 * mm + r2) + log_gamma(2.0 * mp + r2)) +
               log_gamma(mm + 1.0) + log_gamma(mm + mp + r2) + log_gamma(2.0 * mm + r2) - log_gamma(dd + 1.0) -
               log_gamma(mm + r2);
    f = specfun::hypergeometric_pfq({mm + 1.0, mm + mp + r2, 2.0 * mm + r2}, {dd + 1.0, mm + r2}, w);
  }
  const double n1 = normalization(c, p, m1, std::norm(z1));
  const double n2 = normalization(c, p, m2, std::norm(z2));
  cplx zd(1.0, 0.0);
  for (std::size_t k = 0; k < d; ++k) zd *= std::conj(z1);
  return n1 * n2 * zd * std::exp(log_pref) * f;
}

double lowering_eigenvalue_check(const ZChoice& c, const PTParams& p, cplx z, std::size_t truncation) {
  c.validate(p);
  if (std::norm(z) == 0.0) return 0.0;
  // Tail of |amplitude|^2 below 1e-24 keeps the dropped last component at roundoff.
  const std::size_t top = state_coefficients(c, p, z, 0, truncation, truncation == 0 ? 1e-24 : 1.0).truncation;
  const double n0 = normalization(c, p, 0, std::norm(z));

  // ln prod_{k=1}^n sum_{s=k}^n R(a_s), from the remainders directly.
  auto log_chain = [&](std::size_t n) { return raw_products(p, 0, n).log_numerator; };
  // prod_{k=0}^{n-1} Z_{j+k}
  auto z_prod = [&](int j, std::size_t n) {
    cplx v(1.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) v *= z_factor(c, p, j + static_cast<int>(k));
    return v;
  };
  auto amplitude = [&](int j, std::size_t n) {
    return n0 * std::pow(z, static_cast<double>(n)) * std::exp(-0.5 * log_chain(n)) * z_prod(j, n);
  };

  const cplx eig = z * z_factor(c, p, -1);
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n <= top; ++n) {
    // B_- sends the level-(n+1) amplitude to level n and shifts the Z chain to j - 1.
    const double ell = std::exp(0.5 * (log_chain(n + 1) - log_chain(n)));
    const cplx lowered = n + 1 <= top ? ell * amplitude(-1, n + 1) : cplx(0.0, 0.0);
    const cplx target = eig * amplitude(0, n);
    num += std::norm(lowered - target);
    den += std::norm(target);
  }
  return std::sqrt(num / den);
}

}  // namespace pasi::cs
