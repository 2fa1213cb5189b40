#include "pasi/susy_core.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pasi::susy {
namespace {

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : size(n), data(fftw_alloc_real(std::max<std::size_t>(n, 1))) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  std::size_t size;
  double* data;
};

// Coefficients below this fraction of the largest one are roundoff; left in
// place they are amplified by k at every derivative.
constexpr double kNoiseFloor = 3e-13;

void drop_noise(double* c, std::size_t n) {
  double peak = 0.0;
  for (std::size_t k = 0; k < n; ++k) peak = std::max(peak, std::abs(c[k]));
  const double cut = kNoiseFloor * peak;
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(c[k]) <= cut) c[k] = 0.0;
}

void run_r2r(FftwBuffer& in, FftwBuffer& out, fftw_r2r_kind kind) {
  fftw_plan plan = fftw_plan_r2r_1d(static_cast<int>(in.size), in.data, out.data, kind, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

// d/dtheta of sum_k b_k sin(k theta) sampled at theta_j = j pi / (N + 1).
std::vector<double> derivative_odd_odd(const std::vector<double>& f) {
  const std::size_t n = f.size();
  const double m = static_cast<double>(n + 1);
  FftwBuffer in(n), out(n);
  std::copy(f.begin(), f.end(), in.data);
  run_r2r(in, out, FFTW_RODFT00);
  drop_noise(out.data, n);
  FftwBuffer cin(n + 2), cout(n + 2);
  cin.data[0] = 0.0;
  cin.data[n + 1] = 0.0;
  for (std::size_t k = 1; k <= n; ++k) cin.data[k] = 0.5 * static_cast<double>(k) * out.data[k - 1] / m;
  run_r2r(cin, cout, FFTW_REDFT00);
  return {cout.data + 1, cout.data + 1 + n};
}

// Same for a cosine series whose endpoint samples are zero.
std::vector<double> derivative_even_even(const std::vector<double>& f) {
  const std::size_t n = f.size();
  const double m = static_cast<double>(n + 1);
  FftwBuffer in(n + 2), out(n + 2);
  in.data[0] = 0.0;
  in.data[n + 1] = 0.0;
  std::copy(f.begin(), f.end(), in.data + 1);
  run_r2r(in, out, FFTW_REDFT00);
  drop_noise(out.data, n + 2);
  FftwBuffer sin_in(n), sin_out(n);
  for (std::size_t k = 1; k <= n; ++k) sin_in.data[k - 1] = -0.5 * static_cast<double>(k) * out.data[k] / m;
  run_r2r(sin_in, sin_out, FFTW_RODFT00);
  return {sin_out.data, sin_out.data + n};
}

// Round trip through the transform with the noise floor applied.
std::vector<double> project_odd_odd(const std::vector<double>& f) {
  const std::size_t n = f.size();
  FftwBuffer in(n), out(n);
  std::copy(f.begin(), f.end(), in.data);
  run_r2r(in, out, FFTW_RODFT00);
  drop_noise(out.data, n);
  run_r2r(out, in, FFTW_RODFT00);
  const double s = 1.0 / (2.0 * static_cast<double>(n + 1));
  std::vector<double> r(n);
  for (std::size_t j = 0; j < n; ++j) r[j] = s * in.data[j];
  return r;
}

std::vector<double> project_even_even(const std::vector<double>& f) {
  const std::size_t n = f.size();
  FftwBuffer in(n + 2), out(n + 2);
  in.data[0] = 0.0;
  in.data[n + 1] = 0.0;
  std::copy(f.begin(), f.end(), in.data + 1);
  run_r2r(in, out, FFTW_REDFT00);
  drop_noise(out.data, n + 2);
  run_r2r(out, in, FFTW_REDFT00);
  const double s = 1.0 / (2.0 * static_cast<double>(n + 1));
  std::vector<double> r(n);
  for (std::size_t j = 0; j < n; ++j) r[j] = s * in.data[j + 1];
  return r;
}

std::vector<double> reflect(const std::vector<double>& f, Parity right) {
  const std::size_t n = f.size();
  const double sign = right == Parity::even ? 1.0 : -1.0;
  std::vector<double> g(2 * n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    g[j] = f[j];
    g[2 * n - j] = sign * f[j];
  }
  return g;
}

std::vector<double> project(const std::vector<double>& f, Parity left, Parity right) {
  if (left == right) return left == Parity::odd ? project_odd_odd(f) : project_even_even(f);
  auto g = left == Parity::odd ? project_odd_odd(reflect(f, right)) : project_even_even(reflect(f, right));
  g.resize(f.size());
  return g;
}

std::vector<double> derivative_theta(const std::vector<double>& f, Parity left, Parity right) {
  if (left == right) return left == Parity::odd ? derivative_odd_odd(f) : derivative_even_even(f);
  // Reflect about the right end onto a doubled interval; the midpoint sample is
  // the (zero) endpoint value. Both new ends then share the left parity.
  const std::size_t n = f.size();
  const auto g = reflect(f, right);
  auto dg = left == Parity::odd ? derivative_odd_odd(g) : derivative_even_even(g);
  // The transform sees the doubled interval as (0, pi), i.e. in units of theta / 2.
  dg.resize(n);
  for (double& v : dg) v *= 0.5;
  return dg;
}

GridFunction combine(const GridFunction& f, const std::vector<double>& a, double sa, const std::vector<double>& b,
                     double sb) {
  GridFunction r = f;
  for (std::size_t j = 0; j < r.values.size(); ++j) r.values[j] = sa * a[j] + sb * b[j];
  return r;
}

}  // namespace

std::vector<double> remainder_sequence(const ParameterChain& chain, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) out.push_back(chain.remainder(k));
  return out;
}

SpectrumTable spectrum(const ParameterChain& chain, std::size_t n_max) {
  SpectrumTable t;
  t.energies.reserve(n_max + 1);
  double e = 0.0;
  t.energies.push_back(e);
  for (std::size_t k = 1; k <= n_max; ++k) {
    e += chain.remainder(k);
    t.energies.push_back(e);
  }
  return t;
}

GridFunction sample(double x_min, double x_max, std::size_t n, const std::function<double(double)>& f,
                    Parity left, Parity right) {
  if (n < 3) throw std::invalid_argument("sample: need at least 3 interior points");
  GridFunction g{x_min, x_max, std::vector<double>(n), left, right};
  for (std::size_t j = 0; j < n; ++j) g.values[j] = f(g.x(j));
  return g;
}

GridFunction derivative(const GridFunction& f) {
  GridFunction d = f;
  d.values = derivative_theta(f.values, f.left, f.right);
  const double scale = std::numbers::pi / (f.x_max - f.x_min);
  for (double& v : d.values) v *= scale;
  d.left = flip(f.left);
  d.right = flip(f.right);
  return d;
}

double inner(const GridFunction& f, const GridFunction& g) {
  if (f.size() != g.size()) throw std::invalid_argument("inner: grid size mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f.values[j] * g.values[j];
  return s * f.step();
}

double norm(const GridFunction& f) { return std::sqrt(inner(f, f)); }

GridFunction normalized(const GridFunction& f) {
  const double n = norm(f);
  if (!(n > 0.0) || !std::isfinite(n)) throw std::runtime_error("normalized: zero or non-finite norm");
  GridFunction r = f;
  for (double& v : r.values) v /= n;
  return r;
}

double interior_norm(const GridFunction& f) {
  double s = 0.0;
  for (std::size_t j = 1; j + 1 < f.size(); ++j) s += f.values[j] * f.values[j];
  return std::sqrt(s * f.step());
}

double interior_max_abs(const GridFunction& f) {
  double m = 0.0;
  for (std::size_t j = 1; j + 1 < f.size(); ++j) m = std::max(m, std::abs(f.values[j]));
  return m;
}

GridFunction filtered(const GridFunction& f) {
  GridFunction r = f;
  r.values = project(f.values, f.left, f.right);
  return r;
}

namespace {

// W is singular at the ends, so roundoff in the tiny end samples would be
// amplified; both the input and the product are projected onto the resolved modes.
GridFunction first_order(const Superpotential& w, const GridFunction& f, double sign) {
  const GridFunction g = filtered(f);
  const GridFunction d = derivative(g);
  GridFunction r = d;
  for (std::size_t j = 0; j < r.size(); ++j) r.values[j] = sign * d.values[j] + w(g.x(j)) * g.values[j];
  return filtered(r);
}

}  // namespace

GridFunction apply_lowering(const Superpotential& w, const GridFunction& f) { return first_order(w, f, 1.0); }

GridFunction apply_raising(const Superpotential& w, const GridFunction& f) { return first_order(w, f, -1.0); }

GridFunction apply_hamiltonian(const std::function<double(double)>& v, const GridFunction& f) {
  const GridFunction g = filtered(f);
  const GridFunction d2 = derivative(derivative(g));
  std::vector<double> vg(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) vg[j] = v(g.x(j)) * g.values[j];
  return filtered(combine(g, d2.values, -1.0, vg, 1.0));
}

double differentiation_residual(double x_min, double x_max, std::size_t n) {
  const double L = x_max - x_min;
  const double k = std::numbers::pi / L;
  auto f = [&](double x) { return std::sin(k * (x - x_min)) * std::exp(std::cos(k * (x - x_min))); };
  auto df = [&](double x) {
    const double t = k * (x - x_min);
    return k * std::exp(std::cos(t)) * (std::cos(t) - std::sin(t) * std::sin(t));
  };
  // exp(cos t) sin t is odd about both ends.
  const GridFunction g = sample(x_min, x_max, n, f);
  const GridFunction d = derivative(g);
  double err = 0.0;
  for (std::size_t j = 0; j < n; ++j) err = std::max(err, std::abs(d.values[j] - df(g.x(j))));
  return err / (k * std::exp(1.0));
}

GridFunction build_eigenfunction(const ShapeInvariantModel& model, std::size_t n, std::size_t grid_points) {
  GridFunction psi = normalized(model.ground_state(n + 1, grid_points));
  for (std::size_t k = n; k >= 1; --k) {
    double partial = 0.0;
    for (std::size_t s = k; s <= n; ++s) partial += model.chain.remainder(s);
    auto w = [&](double x) { return model.superpotential(k, x); };
    psi = apply_raising(w, psi);
    for (double& v : psi.values) v /= std::sqrt(partial);
    psi = normalized(psi);
  }
  return psi;
}

bool PartnerReport::ok(double riccati_tol, double op_tol) const {
  if (riccati_residual > riccati_tol || annihilation_residual > riccati_tol) return false;
  for (double g : isospectral_gap)
    if (g > 1e-10 * std::max(1.0, std::abs(g))) return false;
  for (double r : hamiltonian_residual)
    if (r > op_tol) return false;
  for (double r : intertwining_residual)
    if (r > op_tol) return false;
  for (double r : norm_ratio)
    if (std::abs(r - 1.0) > op_tol) return false;
  return max_overlap <= op_tol;
}

PartnerReport verify_partner_relations(const ShapeInvariantModel& model, std::size_t n_max,
                                       std::size_t grid_points, double riccati_tol) {
  PartnerReport rep;
  std::size_t n = grid_points;
  for (int attempt = 0;; ++attempt) {
    rep = PartnerReport{};
    rep.grid_points = n;
    const double h = (model.x_max - model.x_min) / static_cast<double>(n + 1);
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const double x = model.x_min + static_cast<double>(j + 1) * h;
      const double w = model.superpotential(1, x);
      const double r = model.potential(1, x) - (w * w - model.superpotential_derivative(1, x));
      rep.riccati_residual = std::max(rep.riccati_residual, std::abs(r));
    }
    const GridFunction g0 = normalized(model.ground_state(1, n));
    auto w1 = [&](double x) { return model.superpotential(1, x); };
    rep.annihilation_residual = interior_norm(apply_lowering(w1, g0)) / interior_norm(g0);
    if ((rep.riccati_residual <= riccati_tol && rep.annihilation_residual <= riccati_tol) || attempt == 2) break;
    n *= 2;
  }

  const auto e1 = spectrum(model.chain, n_max).energies;
  ParameterChain shifted = model.chain;
  shifted.a1 = model.chain.param(2);
  const auto e_shift = spectrum(shifted, n_max).energies;
  const double r1 = model.chain.remainder(1);
  for (std::size_t k = 0; k < n_max; ++k) rep.isospectral_gap.push_back(std::abs(r1 + e_shift[k] - e1[k + 1]));

  std::vector<GridFunction> psi;
  for (std::size_t k = 0; k <= n_max; ++k) psi.push_back(build_eigenfunction(model, k, n));

  auto v1 = [&](double x) { return model.potential(1, x); };
  auto v2 = [&](double x) { return model.potential(2, x) + r1; };
  auto w1 = [&](double x) { return model.superpotential(1, x); };
  for (std::size_t k = 0; k <= n_max; ++k) {
    GridFunction hpsi = apply_hamiltonian(v1, psi[k]);
    for (std::size_t j = 0; j < hpsi.size(); ++j) hpsi.values[j] -= e1[k] * psi[k].values[j];
    rep.hamiltonian_residual.push_back(interior_norm(hpsi) / interior_norm(psi[k]));
    for (std::size_t i = 0; i < k; ++i) rep.max_overlap = std::max(rep.max_overlap, std::abs(inner(psi[i], psi[k])));
    if (k == 0) continue;

    // A psi_k is an eigenfunction of H_2 with the energy of psi_k.
    const GridFunction phi = apply_lowering(w1, psi[k]);
    GridFunction h2 = apply_hamiltonian(v2, phi);
    for (std::size_t j = 0; j < h2.size(); ++j) h2.values[j] -= e1[k] * phi.values[j];
    rep.intertwining_residual.push_back(interior_norm(h2) / interior_norm(phi));
    rep.norm_ratio.push_back(inner(phi, phi) / e1[k]);
  }
  return rep;
}

}  // namespace pasi::susy
