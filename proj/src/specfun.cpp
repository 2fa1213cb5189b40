#include "pasi/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pasi/contour_kernel.hpp"

namespace pasi::specfun {
namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw SpecfunError(kind, msg); }

bool near_nonpositive_integer(double x) {
  if (x > 0.5) return false;
  const double r = std::round(x);
  return std::abs(x - r) <= 1e-14 * std::max(1.0, std::abs(x));
}

// log Gamma on Re(z) >= 1/2, continuous branch.
cd lanczos_log(cd z) {
  const cd w = z - 1.0;
  cd acc = kLanczos[0];
  for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (w + static_cast<double>(i));
  const cd t = w + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (w + 0.5) * std::log(t) - t + std::log(acc);
}

// log sin(w), stable for large |Im w|; any branch.
cd log_sin(cd w) {
  const cd i(0.0, 1.0);
  if (w.imag() > 20.0) return -i * w + std::log((std::exp(2.0 * i * w) - 1.0) / (2.0 * i));
  if (w.imag() < -20.0) return i * w + std::log((1.0 - std::exp(-2.0 * i * w)) / (2.0 * i));
  return std::log(std::sin(w));
}

cd log_gamma_any_branch(cd s) {
  if (s.real() < 0.5) return std::log(kPi) - log_sin(kPi * s) - lanczos_log(1.0 - s);
  return lanczos_log(s);
}

double wrap_phase(double p) {
  double r = std::remainder(p, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

template <class T>
double magnitude(const T& v) {
  return std::abs(v);
}

template <class T>
T pfq_series(const std::vector<double>& a, const std::vector<double>& b, T x,
             const SeriesControl& ctl) {
  ctl.validate();
  for (double bj : b)
    if (near_nonpositive_integer(bj)) fail(ErrorKind::domain, "pFq: lower parameter is a nonpositive integer");

  bool terminating = false;
  for (double ai : a)
    if (near_nonpositive_integer(ai)) terminating = true;

  const std::size_t p = a.size(), q = b.size();
  const double ax = magnitude(x);
  if (!terminating && ax != 0.0) {
    if (p == q + 1 && ax >= 1.0) fail(ErrorKind::domain, "pFq: |x| >= 1 for p = q + 1");
    if (p > q + 1) fail(ErrorKind::domain, "pFq: divergent series class p > q + 1");
  }

  T sum = T(1.0);
  T term = T(1.0);
  double prev_ratio = std::numeric_limits<double>::infinity();
  const double limit_ratio = (p == q + 1) ? ax : 0.0;
  for (std::size_t k = 0; k < ctl.max_terms; ++k) {
    const double kk = static_cast<double>(k);
    double factor = 1.0 / (kk + 1.0);
    for (double ai : a) factor *= (ai + kk);
    for (double bj : b) factor /= (bj + kk);
    const T next = term * factor * x;
    sum += next;
    if (next == T(0.0)) return sum;
    const double ratio = std::abs(factor) * ax;
    const double bound = std::max(ratio, limit_ratio);
    if (ratio <= prev_ratio && bound < 1.0) {
      const double tail = magnitude(next) * bound / (1.0 - bound);
      if (tail <= ctl.rel_tol * magnitude(sum)) return sum;
    }
    prev_ratio = ratio;
    term = next;
  }
  fail(ErrorKind::non_convergence, "pFq: no convergence within max_terms");
}

// Vertical line Re(s) = c, for n = 0 shapes with exponential decay along the line.
double contour_vertical(const MeijerGSpec& spec, double x, const SeriesControl& ctl) {
  const std::size_t m = spec.m_idx;
  // Numerator Gamma(b_j + s) for j < m; denominators Gamma(a_j + s) and, for
  // j >= m, Gamma(1 - b_j - s). The second kind has poles on the right.
  std::vector<double> num(spec.b_list.begin(), spec.b_list.begin() + static_cast<long>(m));
  std::vector<double> den(spec.a_list.begin(), spec.a_list.end());
  std::vector<double> right_shift;
  for (std::size_t j = m; j < spec.q(); ++j) right_shift.push_back(1.0 - spec.b_list[j]);

  double left = -std::numeric_limits<double>::infinity();
  for (double b : num) left = std::max(left, -b);
  double right = std::numeric_limits<double>::infinity();
  for (double r : right_shift) right = std::min(right, r);
  double c0 = left + ctl.contour_offset;
  if (!(c0 < right)) fail(ErrorKind::contour_placement, "meijer_g: no offset separates the poles");

  const double L = std::log(x);
  auto log_f_real = [&](double c) {
    double v = -c * L;
    for (double b : num) v += log_gamma(b + c);
    for (double a : den) v -= log_gamma(a + c);
    for (double r : right_shift) v -= log_gamma(r - c);
    return v;
  };

  // Slide the line toward the saddle of |F(c) x^{-c}| to limit cancellation.
  double c = c0;
  if (right_shift.empty()) {
    double best = log_f_real(c0);
    for (int k = 1; k <= 400; ++k) {
      const double cc = c0 + 0.25 * k;
      const double v = log_f_real(cc);
      if (v < best) {
        best = v;
        c = cc;
      } else if (cc > c + 2.0) {
        break;
      }
    }
  } else {
    c = std::min(c0, 0.5 * (left + right));
  }

  auto eval_points = [&](std::span<const double> tau) -> kernel::LineSum {
    if (!right_shift.empty()) {
      // Fold Gamma(r - s) into the reference loop: 1/Gamma(r - s) terms.
      kernel::LineSum out;
      for (double t : tau) {
        const cd s(c, t);
        cd acc = -s * L;
        for (double b : num) acc += log_gamma_any_branch(b + s);
        for (double a : den) acc -= log_gamma_any_branch(a + s);
        for (double r : right_shift) acc -= log_gamma_any_branch(r - s);
        const double mag = std::exp(acc.real());
        out.sum_re += mag * std::cos(acc.imag());
        out.sum_abs += mag;
        out.peak = std::max(out.peak, mag);
      }
      return out;
    }
    const kernel::LineTerms terms{num, den, c, L};
    const bool eligible = kernel::simd_eligible(terms);
    if (ctl.kernel == KernelPath::simd && !eligible)
      fail(ErrorKind::invalid_argument, "meijer_g: simd path requires Re(arguments) >= 1/2");
    if (ctl.kernel == KernelPath::scalar || !eligible) {
      if (eligible) return kernel::line_sum_scalar(terms, tau);
      kernel::LineSum out;
      for (double t : tau) {
        const cd s(c, t);
        cd acc = -s * L;
        for (double b : num) acc += log_gamma_any_branch(b + s);
        for (double a : den) acc -= log_gamma_any_branch(a + s);
        const double mag = std::exp(acc.real());
        out.sum_re += mag * std::cos(acc.imag());
        out.sum_abs += mag;
        out.peak = std::max(out.peak, mag);
      }
      return out;
    }
    return kernel::line_sum_simd(terms, tau);
  };

  const double f0_log = log_f_real(c);
  const double f0 = std::exp(f0_log);
  double half = ctl.contour_halfwidth;
  double h = 2.0 * half / static_cast<double>(ctl.contour_points - 1);

  // Grow the half-width until the endpoint integrand is negligible.
  for (int grow = 0;; ++grow) {
    const double t_end[1] = {half};
    const auto end = eval_points(t_end);
    if (end.peak <= ctl.rel_tol * 1e-3 * f0) break;
    if (grow >= 12) fail(ErrorKind::non_convergence, "meijer_g: contour tail does not decay");
    half *= 2.0;
  }

  // Trapezoid with Hermitian symmetry: f(-t) = conj f(t).
  std::vector<double> tau;
  for (std::size_t k = 1; static_cast<double>(k) * h <= half + 0.5 * h; ++k)
    tau.push_back(static_cast<double>(k) * h);
  auto sum = eval_points(tau);
  double total_re = f0 + 2.0 * sum.sum_re;
  double total_abs = f0 + 2.0 * sum.sum_abs;
  double value = h * total_re / (2.0 * kPi);

  for (int refine = 0; refine < 8; ++refine) {
    tau.clear();
    for (double t = 0.5 * h; t <= half + 0.25 * h; t += h) tau.push_back(t);
    const auto mid = eval_points(tau);
    total_re += 2.0 * mid.sum_re;
    total_abs += 2.0 * mid.sum_abs;
    h /= 2.0;
    const double next = h * total_re / (2.0 * kPi);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * h * total_abs / (2.0 * kPi);
    if (std::abs(next - value) <= std::max(ctl.rel_tol * std::abs(next), floor)) return next;
    value = next;
  }
  fail(ErrorKind::non_convergence, "meijer_g: trapezoidal refinement did not converge");
}

// Loop contour from -inf around the left poles, for p = q = m and 0 < x < 1.
// With t = -ln x the integral is an inverse Laplace transform evaluated on a
// fixed Talbot contour s(theta) = r theta (cot theta + i).
double contour_talbot_once(const MeijerGSpec& spec, double x, double c, int nodes, double* abs_sum) {
  const double t = -std::log(x);
  const double r = std::max(2.0 * nodes / (5.0 * t), c);
  double acc_re = 0.0, acc_abs = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double th = -kPi + (k + 0.5) * 2.0 * kPi / nodes;
    const double cot = std::cos(th) / std::sin(th);
    const cd s(r * th * cot, r * th);
    const cd ds(r * (cot - th / (std::sin(th) * std::sin(th))), r);
    cd lf = s * t;
    for (double b : spec.b_list) lf += log_gamma_any_branch(b + s);
    for (double a : spec.a_list) lf -= log_gamma_any_branch(a + s);
    const cd term = std::exp(lf) * ds;
    // (1 / 2 pi i) * (2 pi / nodes) * term
    acc_re += term.imag();
    acc_abs += std::abs(term);
  }
  if (abs_sum) *abs_sum = acc_abs / nodes;
  return acc_re / nodes;
}

double contour_talbot(const MeijerGSpec& spec, double x, const SeriesControl& ctl) {
  double left = -std::numeric_limits<double>::infinity();
  for (double b : spec.b_list) left = std::max(left, -b);
  const double c = left + ctl.contour_offset;
  constexpr int kNodes = 40;
  constexpr int kCheck = 32;
  double abs_sum = 0.0;
  const double v = contour_talbot_once(spec, x, c, kNodes, &abs_sum);
  const double w = contour_talbot_once(spec, x, c, kCheck, nullptr);
  const double err = std::abs(v - w);
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * abs_sum;
  if (err > std::max(std::sqrt(ctl.rel_tol) * std::abs(v), floor))
    fail(ErrorKind::non_convergence, "meijer_g: loop contour did not converge");
  return v;
}

}  // namespace

void SeriesControl::validate() const {
  if (!(rel_tol > 0.0)) throw SpecfunError(ErrorKind::invalid_argument, "SeriesControl: rel_tol must be > 0");
  if (max_terms < 1) throw SpecfunError(ErrorKind::invalid_argument, "SeriesControl: max_terms must be >= 1");
  if (contour_points < 3 || contour_points % 2 == 0)
    throw SpecfunError(ErrorKind::invalid_argument, "SeriesControl: contour_points must be odd and >= 3");
  if (!(contour_halfwidth > 0.0))
    throw SpecfunError(ErrorKind::invalid_argument, "SeriesControl: contour_halfwidth must be > 0");
  if (!(contour_offset > 0.0))
    throw SpecfunError(ErrorKind::pole_on_contour, "SeriesControl: contour_offset must be > 0");
}

bool MeijerGSpec::upper_reducible() const {
  return m_idx == 1 && !b_list.empty() && b_list[0] == 0.0;
}

bool MeijerGSpec::lower_only() const { return n_idx == 0; }

void MeijerGSpec::validate() const {
  if (m_idx > q() || n_idx > p())
    throw SpecfunError(ErrorKind::invalid_argument, "MeijerGSpec: requires m <= q and n <= p");
  if (!upper_reducible() && !lower_only())
    throw SpecfunError(ErrorKind::unsupported_shape, "MeijerGSpec: only upper-reducible or lower-only shapes");
}

cd log_gamma(cd s) {
  if (std::abs(s.imag()) <= 1e-14 * std::max(1.0, std::abs(s.real())) &&
      near_nonpositive_integer(s.real())) {
    std::ostringstream os;
    os << "log_gamma: pole at s = " << s.real();
    fail(ErrorKind::pole, os.str());
  }
  cd v = log_gamma_any_branch(s);
  if (s.imag() == 0.0 && s.real() > 0.0) return {v.real(), 0.0};
  return {v.real(), wrap_phase(v.imag())};
}

double log_gamma(double x) {
  if (near_nonpositive_integer(x)) {
    std::ostringstream os;
    os << "log_gamma: pole at x = " << x;
    fail(ErrorKind::pole, os.str());
  }
  return std::lgamma(x);
}

int gamma_sign(double x) {
  if (x > 0.0) return 1;
  if (near_nonpositive_integer(x)) fail(ErrorKind::pole, "gamma_sign: pole");
  const long f = static_cast<long>(std::floor(x));
  return (f % 2 == 0) ? 1 : -1;
}

double pochhammer(double a, std::size_t n) {
  double v = 1.0;
  for (std::size_t k = 0; k < n; ++k) v *= a + static_cast<double>(k);
  return v;
}

double hypergeometric_pfq(const std::vector<double>& a, const std::vector<double>& b, double x,
                          const SeriesControl& ctl) {
  return pfq_series<double>(a, b, x, ctl);
}

cd hypergeometric_pfq(const std::vector<double>& a, const std::vector<double>& b, cd x,
                      const SeriesControl& ctl) {
  return pfq_series<cd>(a, b, x, ctl);
}

double mellin_log_abs(const MeijerGSpec& spec, double s, int* sign) {
  double v = 0.0;
  int sg = 1;
  auto add = [&](double arg, int dir) {
    v += dir * log_gamma(arg);
    sg *= gamma_sign(arg);
  };
  for (std::size_t j = 0; j < spec.m_idx; ++j) add(spec.b_list[j] + s, 1);
  for (std::size_t j = 0; j < spec.n_idx; ++j) add(1.0 - spec.a_list[j] - s, 1);
  for (std::size_t j = spec.m_idx; j < spec.q(); ++j) add(1.0 - spec.b_list[j] - s, -1);
  for (std::size_t j = spec.n_idx; j < spec.p(); ++j) add(spec.a_list[j] + s, -1);
  if (sign) *sign = sg;
  return v;
}

double meijer_g(const MeijerGSpec& spec, double x, const SeriesControl& ctl) {
  spec.validate();
  ctl.validate();

  if (spec.upper_reducible()) {
    // Residues of Gamma(s) at s = -k give a pFq in (-1)^{p-n+1} x.
    double log_pref = 0.0;
    int sign = 1;
    for (std::size_t j = 0; j < spec.n_idx; ++j) {
      log_pref += log_gamma(1.0 - spec.a_list[j]);
      sign *= gamma_sign(1.0 - spec.a_list[j]);
    }
    for (std::size_t j = spec.n_idx; j < spec.p(); ++j) {
      log_pref -= log_gamma(spec.a_list[j]);
      sign *= gamma_sign(spec.a_list[j]);
    }
    for (std::size_t j = 1; j < spec.q(); ++j) {
      log_pref -= log_gamma(1.0 - spec.b_list[j]);
      sign *= gamma_sign(1.0 - spec.b_list[j]);
    }
    std::vector<double> up, lo;
    for (double a : spec.a_list) up.push_back(1.0 - a);
    for (std::size_t j = 1; j < spec.q(); ++j) lo.push_back(1.0 - spec.b_list[j]);
    const double arg = ((spec.p() - spec.n_idx + 1) % 2 == 0) ? x : -x;
    SeriesControl sc = ctl;
    sc.rel_tol = std::min(ctl.rel_tol, 1e-10);
    return sign * std::exp(log_pref) * hypergeometric_pfq(up, lo, arg, sc);
  }

  if (!(x > 0.0)) fail(ErrorKind::domain, "meijer_g: lower-only shape requires x > 0");
  const std::size_t p = spec.p(), q = spec.q(), m = spec.m_idx;
  if (p + q < 2 * m) return contour_vertical(spec, x, ctl);
  if (p == q && m == q) {
    if (x > 1.0) return 0.0;
    if (x == 1.0) fail(ErrorKind::domain, "meijer_g: x = 1 is a branch point for p = q");
    return contour_talbot(spec, x, ctl);
  }
  fail(ErrorKind::unsupported_shape, "meijer_g: lower-only shape without a convergent contour");
}

}  // namespace pasi::specfun
