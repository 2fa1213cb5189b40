#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "pasi/coherent_states.hpp"
#include "pasi/specfun.hpp"

namespace pasi::measure {

// Radial weight for the resolution of identity of the m-th family.
struct WeightSpec {
  cs::ZChoice choice;
  PTParams p;
  std::size_t m = 0;
  specfun::SeriesControl contour = specfun::SeriesControl::contour();

  // Upper end of the radial domain in x = |z|^2: 1 for GammaWeighted, infinite otherwise.
  double x_max() const { return choice.x_limit(); }
};

// The Meijer G behind the weight, with x -> scale * y.
struct WeightKernel {
  specfun::MeijerGSpec g;
  double scale = 1.0;     // x = scale * y
  double log_pref = 0.0;  // W_m(x) = exp(log_pref) * G(x / scale)
};

WeightKernel weight_kernel(const WeightSpec& spec);

// W_m(x) = pi N_m(x)^2 omega_m(x), whose moments are int x^n W_m dx = |K_n^m|^2.
double moment_density(const WeightSpec& spec, double x);

// omega_m(x).
double weight_function(const WeightSpec& spec, double x);

// Closed forms for m = 0 GammaWeighted: W_0 = nu (1 - x)^{nu - 1}, omega_0 = nu / pi (1 - x)^{-2}.
double moment_density_m0_gamma(double nu, double x);
double weight_m0_gamma(double nu, double x);

struct QuadratureControl {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t limit = 2000;
};

// int_0^{x_max} f(x) dx: QAGS on [0, split] and, for an infinite domain, the
// map x = split e^t on the rest.
double integrate_radial(const std::function<double(double)>& f, double x_max, double split,
                        const QuadratureControl& q = {});

struct MomentResult {
  std::size_t n = 0;
  double integral = 0.0;
  double target = 0.0;
  double rel_err = 0.0;
};

MomentResult moment_check(const WeightSpec& spec, std::size_t n, const QuadratureControl& q = {});

struct IdentityReport {
  std::vector<MomentResult> moments;
  double max_rel_err = 0.0;
  bool ok(double tol) const { return max_rel_err <= tol; }
};

IdentityReport identity_resolution_report(const WeightSpec& spec, std::size_t n_max,
                                          const QuadratureControl& q = {});

// Splitting point for the radial quadrature: past the bulk of x^n W_m.
double radial_split(const WeightSpec& spec, std::size_t n);

}  // namespace pasi::measure
