#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pasi::specfun {

enum class ErrorKind {
  pole,
  domain,
  non_convergence,
  contour_placement,
  pole_on_contour,
  unsupported_shape,
  invalid_argument,
};

class SpecfunError : public std::runtime_error {
 public:
  SpecfunError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Which implementation evaluates the Mellin-Barnes line sums.
enum class KernelPath { automatic, scalar, simd };

struct SeriesControl {
  double rel_tol = 1e-10;
  std::size_t max_terms = 100000;
  double contour_offset = 0.5;      // distance right of the rightmost left pole
  double contour_halfwidth = 10.0;  // initial half-length of the vertical line
  std::size_t contour_points = 201; // initial node count on [-h, h], odd
  KernelPath kernel = KernelPath::automatic;

  void validate() const;

  static SeriesControl series() { return SeriesControl{}; }
  static SeriesControl contour() {
    SeriesControl c;
    c.rel_tol = 1e-6;
    return c;
  }
};

struct MeijerGSpec {
  std::size_t m_idx = 0;
  std::size_t n_idx = 0;
  std::vector<double> a_list;
  std::vector<double> b_list;

  std::size_t p() const { return a_list.size(); }
  std::size_t q() const { return b_list.size(); }

  bool upper_reducible() const;
  bool lower_only() const;
  void validate() const;
};

// Principal-branch log Gamma; the imaginary part lies in (-pi, pi].
std::complex<double> log_gamma(std::complex<double> s);

// ln|Gamma(x)| for real x; throws at the poles.
double log_gamma(double x);

// Sign of Gamma(x) for real non-pole x.
int gamma_sign(double x);

double pochhammer(double a, std::size_t n);

double hypergeometric_pfq(const std::vector<double>& a, const std::vector<double>& b, double x,
                          const SeriesControl& ctl = SeriesControl::series());

std::complex<double> hypergeometric_pfq(const std::vector<double>& a,
                                        const std::vector<double>& b, std::complex<double> x,
                                        const SeriesControl& ctl = SeriesControl::series());

// Log of the Mellin transform of G at real s (product of Gamma ratios), with
// its sign. Used for moment targets.
double mellin_log_abs(const MeijerGSpec& spec, double s, int* sign = nullptr);

double meijer_g(const MeijerGSpec& spec, double x,
                const SeriesControl& ctl = SeriesControl::contour());

}  // namespace pasi::specfun
