#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fd_oracle.hpp"
#include "pasi/coherent_states.hpp"
#include "pasi/measure.hpp"
#include "pasi/poschl_teller.hpp"
#include "pasi/susy_core.hpp"
#include "pasi/thermal.hpp"

using namespace pasi;
using cs::cplx;
using cs::ZChoice;

namespace {

// Pinned tolerances.
constexpr double kSpectrumTol = 1e-12;
constexpr double kSpectrumSeconds = 1.0;
constexpr double kCoeffTol = 1e-10;
constexpr double kCoeffSeconds = 5.0;
constexpr double kReductionTol = 1e-8;
constexpr double kMomentGammaTol = 1e-6;
constexpr double kMomentPhaseTol = 1e-4;
constexpr double kMomentSeconds = 120.0;
constexpr double kRiccatiTol = 1e-8;
constexpr double kHamiltonianTol = 1e-6;
constexpr double kOverlapFloor = 1.0 - 1e-6;
constexpr double kEnergyTol = 1e-6;
constexpr double kSusySeconds = 30.0;
constexpr std::size_t kSusyGrid = 2048;
constexpr double kPositivityFloor = -1e-10;
constexpr double kTailRatioTol = 0.10;
constexpr double kLoweringTol = 1e-8;
constexpr double kTraceTol = 1e-6;
constexpr double kMandelTol = 1e-12;
constexpr double kColdTol = 1e-8;
constexpr double kStableTol = 1e-10;
constexpr double kOverlapTol = 1e-8;

const PTParams kSym{2.0, 2.0, 1.0};

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome spectrum_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const PTParams sets[] = {{2, 2, 1}, {2, 3, 1}, {1.5, 4.5, 0.5}, {3.2, 1.7, 2.0}, {5, 5, 0.25}};
  double worst = 0.0;
  for (const auto& p : sets) {
    const auto e = susy::spectrum(parameter_chain(p), 50).energies;
    for (std::size_t n = 1; n <= 50; ++n) worst = std::max(worst, std::abs(e[n] - energy(p, n)) / energy(p, n));
  }
  const double s = seconds_since(t0);
  return {worst <= kSpectrumTol && s < kSpectrumSeconds,
          fmt("worst rel %.2e (tol %.0e), %.3f s (limit %.0f s)", worst, kSpectrumTol, s, kSpectrumSeconds)};
}

Outcome coefficient_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const PTParams& p : {PTParams{2, 2, 1}, PTParams{2.5, 3.5, 0.7}}) {
    for (const ZChoice& c : {ZChoice::phase_only(0.3), ZChoice::gamma_weighted(p.lambda(), 0.3)}) {
      for (std::size_t m = 0; m <= 6; ++m) {
        for (std::size_t n = 0; n <= 20; ++n) {
          const auto raw = cs::coefficient_raw(c, p, m, n);
          const auto closed = cs::coefficient_closed(c, p, m, n);
          worst = std::max(worst, std::abs(raw.mod2() / closed.mod2() - 1.0));
          worst = std::max(worst, std::abs(raw.phase - closed.phase) / std::max(1.0, std::abs(closed.phase)));
        }
      }
    }
  }
  const double k11 = cs::coefficient_raw(ZChoice::phase_only(), kSym, 1, 1).mod2();
  const double k11_err = std::abs(k11 - 7.0 / 12.0) / (7.0 / 12.0);
  const double s = seconds_since(t0);
  return {worst <= kCoeffTol && k11_err <= kCoeffTol && s < kCoeffSeconds,
          fmt("worst rel %.2e, |K_1^1|^2 = %.15g (7/12), %.3f s (limit %.0f s)", worst, k11, s, kCoeffSeconds)};
}

Outcome m0_reductions() {
  const double nu = kSym.nu(), rho = kSym.rho();
  double worst_1f2 = 0.0, worst_beta = 0.0, worst_n0 = 0.0, worst_w0 = 0.0;
  for (int j = 1; j <= 100; ++j) {
    // 1F2 normalization on x in (0, 20].
    const double x = 0.2 * j;
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < 500; ++n) {
      term *= (2 * rho + n) / ((rho + n) * (rho + 0.5 + n)) * (x / 4.0) / (n + 1);
      sum += term;
    }
    worst_1f2 = std::max(worst_1f2,
                         std::abs(cs::normalization(ZChoice::phase_only(), kSym, 0, x) * std::sqrt(sum) - 1.0));
    // Beta ratio h_n = n! Gamma(nu + 1) / Gamma(n + nu + 1) for n = 0..99.
    const double nn = j - 1.0;
    const double h = std::exp(std::lgamma(nn + 1) + std::lgamma(nu + 1) - std::lgamma(nn + nu + 1));
    worst_beta = std::max(
        worst_beta, std::abs(cs::coefficient_closed(ZChoice::gamma_weighted(1.0), kSym, 0, j - 1).mod2() / h - 1.0));
    // N_0 and omega_0 on x in (0, 0.95].
    const double y = 0.0095 * j;
    worst_n0 = std::max(worst_n0, std::abs(cs::normalization(ZChoice::gamma_weighted(1.0), kSym, 0, y) /
                                               std::pow(1.0 - y, 0.5 * (nu + 1.0)) -
                                           1.0));
    const measure::WeightSpec spec{ZChoice::gamma_weighted(1.0), kSym, 0};
    worst_w0 = std::max(worst_w0, std::abs(measure::weight_function(spec, y) / measure::weight_m0_gamma(nu, y) - 1.0));
  }
  const double worst = std::max({worst_1f2, worst_beta, worst_n0, worst_w0});
  return {worst <= kReductionTol,
          fmt("1F2 %.1e, Beta ratio %.1e, N_0 %.1e, omega_0 %.1e (tol 1e-8)", worst_1f2, worst_beta, worst_n0, worst_w0)};
}

Outcome stieltjes_moments() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_gamma = 0.0, worst_phase = 0.0;
  for (std::size_t m = 0; m <= 3; ++m)
    worst_gamma = std::max(
        worst_gamma,
        measure::identity_resolution_report({ZChoice::gamma_weighted(1.0), kSym, m}, 10).max_rel_err);
  const auto quarter = measure::moment_check({ZChoice::gamma_weighted(1.0), kSym, 0}, 1);
  const double quarter_err = std::abs(quarter.integral - 0.25) / 0.25;
  for (std::size_t m = 0; m <= 2; ++m)
    worst_phase = std::max(worst_phase,
                           measure::identity_resolution_report({ZChoice::phase_only(), kSym, m}, 6).max_rel_err);
  const double s = seconds_since(t0);
  return {worst_gamma <= kMomentGammaTol && quarter_err <= kMomentGammaTol && worst_phase <= kMomentPhaseTol &&
              s < kMomentSeconds,
          fmt("gamma %.1e (1/4 case %.1e), phase %.1e, %.1f s", worst_gamma, quarter_err, worst_phase, s)};
}

Outcome susy_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  double riccati = 0.0, annihilation = 0.0, ham = 0.0, energy_err = 0.0, min_overlap = 1.0;
  for (const PTParams& p : {PTParams{2, 2, 1}, PTParams{2, 3, 1}}) {
    const auto model = shape_invariant_model(p);
    const auto rep = susy::verify_partner_relations(model, 5, kSusyGrid, kRiccatiTol);
    riccati = std::max(riccati, rep.riccati_residual);
    annihilation = std::max(annihilation, rep.annihilation_residual);
    for (double h : rep.hamiltonian_residual) ham = std::max(ham, h);
    auto v = [&](double x) { return potential_value(p, x); };
    const auto energies = testing::richardson_energies(v, 0.0, p.width(), kSusyGrid + 1, 6);
    const auto fd = testing::fd_eigenpairs(v, 0.0, p.width(), kSusyGrid, 6);
    for (std::size_t n = 0; n <= 5; ++n) {
      energy_err = std::max(energy_err, std::abs(energies[n] - energy(p, n)) / std::max(1.0, energy(p, n)));
      const auto psi = susy::build_eigenfunction(model, n, kSusyGrid);
      min_overlap = std::min(min_overlap, testing::cosine(psi.values, fd.vectors[n]));
    }
  }
  const double s = seconds_since(t0);
  const bool ok = riccati <= kRiccatiTol && annihilation <= kRiccatiTol && ham <= kHamiltonianTol &&
                  energy_err <= kEnergyTol && min_overlap >= kOverlapFloor && s < kSusySeconds;
  return {ok, fmt("Riccati %.1e, |A psi_0| %.1e, H residual %.1e, ", riccati, annihilation, ham) +
                  fmt("FD energy %.1e, 1 - overlap %.1e, %.1f s", energy_err, 1.0 - min_overlap, s)};
}

Outcome weight_curves() {
  Outcome out;
  std::vector<double> xs;
  for (int j = 1; j <= 1000; ++j) xs.push_back(0.01 * j);
  double lowest = std::numeric_limits<double>::infinity();
  bool shape_ok = true;
  double w0_tail = 0.0;
  std::string ratios;
  for (std::size_t m = 0; m <= 4; ++m) {
    const measure::WeightSpec spec{ZChoice::phase_only(), kSym, m};
    for (double x : xs) lowest = std::min(lowest, measure::weight_function(spec, x));
    // Origin: finite for m = 0, growing for m >= 1. Tail: decreasing.
    const double w8 = measure::weight_function(spec, 1e-8), w6 = measure::weight_function(spec, 1e-6);
    const double w3 = measure::weight_function(spec, 1e-3);
    if (m == 0 ? std::abs(w8 - w6) > 1e-4 * w6 : !(w8 > w6 && w6 > w3)) shape_ok = false;
    const double w5 = measure::weight_function(spec, 5.0), w10 = measure::weight_function(spec, 10.0);
    if (!(w10 < w5)) shape_ok = false;
    if (m == 0) {
      w0_tail = w10;
    } else {
      const double r = w10 / w0_tail;
      ratios += fmt(" m%.0f:%.3f", static_cast<double>(m), r);
      if (std::abs(r - 1.0) > kTailRatioTol) out.pass = false;
    }
  }
  if (lowest < kPositivityFloor || !shape_ok) out.pass = false;
  out.detail = fmt("min omega %.3e, origin/tail shape ", lowest) + (shape_ok ? "ok" : "bad") +
               ", tail ratios at x=10" + ratios + " (tol 10%)";
  return out;
}

Outcome lowering_property() {
  double worst = 0.0;
  for (int variant = 0; variant < 2; ++variant) {
    const ZChoice c = variant == 0 ? ZChoice::phase_only(0.4) : ZChoice::gamma_weighted(1.0, 0.4);
    const double rmax = variant == 0 ? 3.0 : 0.9;
    for (int k = 0; k < 10; ++k) {
      const cplx z = std::polar(rmax * (k + 1) / 10.0, 0.6 * k - 2.5);
      worst = std::max(worst, cs::lowering_eigenvalue_check(c, kSym, z));
    }
  }
  return {worst <= kLoweringTol, fmt("worst residual %.2e over 20 labels (tol %.0e)", worst, kLoweringTol)};
}

Outcome thermal_suite() {
  double trace = 0.0, mandel = 0.0, cold = 0.0, stable = 0.0;
  for (std::size_t m = 0; m <= 2; ++m) {
    for (const ZChoice& c : {ZChoice::phase_only(), ZChoice::gamma_weighted(1.0)})
      trace = std::max(trace, std::abs(thermal::trace_check(kSym, c, {1.0, m, 0}) - 1.0));
  }
  for (std::size_t m = 0; m <= 3; ++m) {
    for (double beta : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      const auto r = thermal::thermal_report(kSym, ZChoice::phase_only(), {beta, m, 0});
      mandel = std::max(mandel, std::abs(r.mandel_q - (r.variance() / r.mean_N - 1.0)) /
                                    std::max(1.0, std::abs(r.mandel_q)));
    }
  }
  for (std::size_t m = 1; m <= 3; ++m) {
    const auto r = thermal::thermal_report(kSym, ZChoice::phase_only(), {50.0, m, 0});
    cold = std::max({cold, std::abs(r.mean_N - energy(kSym, m)), std::abs(r.mandel_q + 1.0)});
  }
  std::size_t entries = 0;
  for (std::size_t m = 1; m <= 2; ++m) {
    for (const ZChoice& c : {ZChoice::phase_only(), ZChoice::gamma_weighted(1.0)}) {
      const thermal::ThermalConfig cfg{1.0, m, 0};
      const auto a = thermal::closed_form_crosscheck(kSym, c, cfg);
      thermal::ThermalConfig wide = cfg;
      wide.truncation = 2 * thermal::boltzmann_truncation(kSym, 1.0);
      const auto b = thermal::closed_form_crosscheck(kSym, c, wide);
      stable = std::max(stable, a.truncation_delta);
      for (std::size_t i = 0; i < a.entries.size(); ++i) {
        ++entries;
        stable = std::max(stable, std::abs(a.entries[i].deviation - b.entries[i].deviation) /
                                      std::max(1.0, std::abs(a.entries[i].deviation)));
      }
    }
  }
  const bool ok = trace <= kTraceTol && mandel <= kMandelTol && cold <= kColdTol && stable <= kStableTol &&
                  entries == 16;
  return {ok, fmt("|Tr rho - 1| %.1e, Q identity %.1e, beta=50 limits %.1e, ", trace, mandel, cold) +
                  fmt("crosscheck drift %.1e over %.0f entries", stable, static_cast<double>(entries))};
}

Outcome overlap_equivalence() {
  testing::Gen gen(2024);
  double worst = 0.0;
  for (int variant = 0; variant < 2; ++variant) {
    for (int i = 0; i < 20; ++i) {
      const bool with_phase = i % 2 == 1;
      const double alpha = with_phase ? gen.real(-1.0, 1.0) : 0.0;
      const ZChoice c = variant == 0 ? ZChoice::phase_only(alpha) : ZChoice::gamma_weighted(1.0, alpha);
      const double rmax = variant == 0 ? 3.0 : 0.9;
      const cplx z1 = std::polar(gen.real(0.0, rmax), gen.real(-3.14, 3.14));
      const cplx z2 = std::polar(gen.real(0.0, rmax), gen.real(-3.14, 3.14));
      const std::size_t m1 = gen.count(0, 3);
      const std::size_t m2 = with_phase ? m1 : gen.count(0, 3);
      worst = std::max(worst, std::abs(cs::overlap(c, kSym, z1, m1, z2, m2) - cs::overlap_closed(c, kSym, z1, m1, z2, m2)));
    }
  }
  return {worst <= kOverlapTol, fmt("worst |direct - closed| %.2e over 40 pairs (tol %.0e)", worst, kOverlapTol)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  const std::vector<Criterion> criteria = {
      {"spectrum equivalence", spectrum_equivalence},
      {"coefficient equivalence", coefficient_equivalence},
      {"m = 0 reductions", m0_reductions},
      {"Stieltjes moments", stieltjes_moments},
      {"SUSY grid suite", susy_suite},
      {"weight curves", weight_curves},
      {"lowering eigenvalue", lowering_property},
      {"thermal suite", thermal_suite},
      {"overlap equivalence", overlap_equivalence},
  };
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "--only must be in 1..%zu\n", criteria.size());
    return 2;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
