#include "pasi/measure.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <exception>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace pasi::measure {
namespace {

using specfun::log_gamma;

struct Workspace {
  explicit Workspace(std::size_t n) : w(gsl_integration_workspace_alloc(n)) {
    if (!w) throw std::bad_alloc();
  }
  ~Workspace() { gsl_integration_workspace_free(w); }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
  gsl_integration_workspace* w;
};

// Keeps C++ exceptions from unwinding through GSL.
struct Callback {
  std::function<double(double)> f;
  std::exception_ptr error;

  static double call(double x, void* self) {
    auto* cb = static_cast<Callback*>(self);
    if (cb->error) return 0.0;
    try {
      return cb->f(x);
    } catch (...) {
      cb->error = std::current_exception();
      return 0.0;
    }
  }
};

enum class Rule { qags, qag };

double run(const std::function<double(double)>& f, double lo, double hi, const QuadratureControl& q, Rule rule) {
  gsl_set_error_handler_off();
  Workspace ws(q.limit);
  Callback cb{f, nullptr};
  gsl_function g{&Callback::call, &cb};
  double result = 0.0, abserr = 0.0;
  const int status = rule == Rule::qags
                         ? gsl_integration_qags(&g, lo, hi, q.abs_tol, q.rel_tol, q.limit, ws.w, &result, &abserr)
                         : gsl_integration_qag(&g, lo, hi, q.abs_tol, q.rel_tol, q.limit, GSL_INTEG_GAUSS21, ws.w,
                                               &result, &abserr);
  if (cb.error) std::rethrow_exception(cb.error);
  if (status != GSL_SUCCESS && abserr > 1e3 * q.rel_tol * std::abs(result) && abserr > q.abs_tol)
    throw std::runtime_error(std::string("integrate_radial: ") + gsl_strerror(status));
  return result;
}

}  // namespace

WeightKernel weight_kernel(const WeightSpec& spec) {
  spec.choice.validate(spec.p);
  const double m = static_cast<double>(spec.m);
  const double r2 = spec.p.l + spec.p.l_prime;
  const double rho = 0.5 * r2;
  WeightKernel k;
  k.g.m_idx = 0;
  k.g.n_idx = 0;
  if (spec.choice.kind == cs::ZKind::phase_only) {
    const double lam = spec.p.lambda();
    k.g.m_idx = 5;
    k.g.a_list = {m, 2.0 * m + r2 - 1.0, 2.0 * m + r2 - 1.0};
    k.g.b_list = {0.0, 0.0, m + rho - 1.0, m + rho - 0.5, m + r2 - 1.0};
    k.scale = 4.0 * lam * lam;
    k.log_pref = (-2.0 - 2.0 * m) * std::log(lam) + (2.0 * m + r2 - 3.0) * std::numbers::ln2 -
                 0.5 * std::log(std::numbers::pi);
  } else {
    const double nu = r2 - 1.0;
    k.g.m_idx = 3;
    k.g.a_list = {m, 2.0 * m + nu, 2.0 * m + nu};
    k.g.b_list = {0.0, 0.0, m + nu};
    k.scale = 1.0;
    k.log_pref = -2.0 * m * std::log(spec.choice.kappa) + log_gamma(2.0 * m + nu + 1.0);
  }
  return k;
}

double moment_density(const WeightSpec& spec, double x) {
  if (!(x > 0.0)) throw DomainError("moment_density: x must be > 0");
  // The GammaWeighted kernel vanishes like (1 - x)^{4m + nu - 1} at the rim.
  if (x >= spec.x_max()) return 0.0;
  const WeightKernel k = weight_kernel(spec);
  return std::exp(k.log_pref) * specfun::meijer_g(k.g, x / k.scale, spec.contour);
}

double weight_function(const WeightSpec& spec, double x) {
  const double w = moment_density(spec, x);
  const double log_inv_n2 = cs::inverse_norm_series(spec.choice, spec.p, spec.m, x).log_sum;
  return w * std::exp(log_inv_n2) / std::numbers::pi;
}

double moment_density_m0_gamma(double nu, double x) { return nu * std::pow(1.0 - x, nu - 1.0); }

double weight_m0_gamma(double nu, double x) { return nu / std::numbers::pi / ((1.0 - x) * (1.0 - x)); }

double integrate_radial(const std::function<double(double)>& f, double x_max, double split,
                        const QuadratureControl& q) {
  if (std::isfinite(x_max)) return run(f, 0.0, x_max, q, Rule::qags);
  const double head = run(f, 0.0, split, q, Rule::qags);
  // Walk out until the integrand times x is negligible against the head.
  double hi = split;
  int quiet = 0;
  for (int i = 0; i < 80 && quiet < 2; ++i) {
    hi *= 2.0;
    quiet = std::abs(f(hi)) * hi <= 1e-16 * std::abs(head) ? quiet + 1 : 0;
  }
  auto mapped = [&](double t) {
    const double x = split * std::exp(t);
    return f(x) * x;
  };
  QuadratureControl tq = q;
  tq.abs_tol = std::max(q.abs_tol, 1e-3 * q.rel_tol * std::abs(head));
  return head + run(mapped, 0.0, std::log(hi / split), tq, Rule::qag);
}

double radial_split(const WeightSpec& spec, std::size_t n) {
  if (std::isfinite(spec.x_max())) return spec.x_max();
  const double lam = spec.p.lambda();
  const double k = static_cast<double>(n + spec.m) + 2.0;
  return 4.0 * lam * lam * k * k;
}

MomentResult moment_check(const WeightSpec& spec, std::size_t n, const QuadratureControl& q) {
  MomentResult r;
  r.n = n;
  const double nn = static_cast<double>(n);
  r.integral = integrate_radial([&](double x) { return std::pow(x, nn) * moment_density(spec, x); }, spec.x_max(),
                                radial_split(spec, n), q);
  r.target = cs::coefficient_closed(spec.choice, spec.p, spec.m, n).mod2();
  r.rel_err = std::abs(r.integral - r.target) / std::abs(r.target);
  return r;
}

IdentityReport identity_resolution_report(const WeightSpec& spec, std::size_t n_max, const QuadratureControl& q) {
  IdentityReport rep;
  for (std::size_t n = 0; n <= n_max; ++n) {
    rep.moments.push_back(moment_check(spec, n, q));
    rep.max_rel_err = std::max(rep.max_rel_err, rep.moments.back().rel_err);
  }
  return rep;
}

}  // namespace pasi::measure
