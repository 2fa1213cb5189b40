#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "pasi/coherent_states.hpp"
#include "pasi/measure.hpp"

namespace pasi::thermal {

struct ThermalConfig {
  double beta = 1.0;
  std::size_t m = 0;
  std::size_t truncation = 0;  // 0 picks the Boltzmann tail rule

  void validate() const;
};

// Smallest T with e^{-beta E_n} < 1e-16 for every n > T.
std::size_t boltzmann_truncation(const PTParams& p, double beta);

// Z = sum_n e^{-beta E_n}.
double partition_function(const PTParams& p, const ThermalConfig& cfg);

struct ThermalReport {
  double partition = 0.0;
  double mean_N = 0.0;
  double mean_N2 = 0.0;
  double g2 = 0.0;
  double mandel_q = 0.0;
  std::size_t truncation = 0;

  double variance() const { return mean_N2 - mean_N * mean_N; }
};

// <N> = sum e^{-beta E_n} E_{n+m} / Z and the E^2 analogue; g2 and Q as defined
// from them.
ThermalReport thermal_report(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg);

// <z, m| rho |z, m> = N_m^2 / Z * sum_n |z|^{2n} e^{-beta E_n} / |K_n^m|^2.
double husimi(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg, std::complex<double> z);

// A = beta lambda^2 and nbar_A = 1 / (e^A - 1).
double occupation_a(const PTParams& p, double beta);

// P(x) = (1 / nbar_A) W_m(k x) / W_m(x) with k = (nbar_A + 1) / nbar_A.
double p_function(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg, double x);

// int pi omega_m(x) P(x) dx, which is 1 when P is normalized.
double p_normalization(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg,
                       const measure::QuadratureControl& q = {});

// <n+m| rho_P |n+m> reconstructed from P by quadrature, and the geometric
// target e^{-A n} (1 - e^{-A}).
struct DiagonalCheck {
  std::size_t n = 0;
  double value = 0.0;
  double target = 0.0;
  double rel_err = 0.0;
};
DiagonalCheck p_diagonal(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg, std::size_t n,
                         const measure::QuadratureControl& q = {});

// int x P(x) pi omega_m(x) dx, the mean radial position under P.
double p_mean_x(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg,
                const measure::QuadratureControl& q = {});

// Tr rho = int pi omega_m(x) <z|rho|z> dx.
double trace_check(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg,
                   const measure::QuadratureControl& q = {});

struct CsExpectation {
  double mean_N = 0.0;
  double mean_N2 = 0.0;
};

// N_m^2 sum E_{n+m} |z|^{2n} / |K_n^m|^2 and the E^2 analogue.
CsExpectation cs_expectations(const PTParams& p, const cs::ZChoice& choice, std::complex<double> z, std::size_t m);

struct CrosscheckEntry {
  std::string quantity;
  double direct = 0.0;
  double printed = 0.0;       // nbar = 1 / (e^{-beta} - 1)
  double deviation = 0.0;     // (printed - direct) / |direct|
  double substituted = 0.0;   // nbar = 1 / (e^{beta} - 1)
  double deviation_sub = 0.0;
};

struct CrosscheckReport {
  std::vector<CrosscheckEntry> entries;  // mean_N, mean_N2, g2, mandel_q
  double truncation_delta = 0.0;         // largest relative change of the direct values on doubling T
};

// Evaluates the printed closed forms next to the direct sums; never asserts equality.
CrosscheckReport closed_form_crosscheck(const PTParams& p, const cs::ZChoice& choice, const ThermalConfig& cfg);

}  // namespace pasi::thermal
