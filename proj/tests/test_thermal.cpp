#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pasi/thermal.hpp"

using namespace pasi;
using namespace pasi::thermal;

namespace {

const PTParams kSym{2.0, 2.0, 1.0};  // E_n = n (n + 4)

struct Direct {
  double z, n1, n2;
};

// Boltzmann sums written out independently of the library.
Direct direct_sums(double beta, std::size_t m) {
  Direct d{0, 0, 0};
  for (int n = 0; n < 200; ++n) {
    const double w = std::exp(-beta * n * (n + 4.0));
    const double e = (n + static_cast<double>(m)) * (n + static_cast<double>(m) + 4.0);
    d.z += w;
    d.n1 += w * e;
    d.n2 += w * e * e;
  }
  d.n1 /= d.z;
  d.n2 /= d.z;
  return d;
}

}  // namespace

TEST_CASE("partition function") {
  const Direct d = direct_sums(1.0, 0);
  const double z = partition_function(kSym, {1.0, 0, 0});
  CHECK(std::abs(z - d.z) < 1e-14);
  CHECK(std::abs(z - 1.0067439) < 1e-6);
  CHECK(std::abs(partition_function(kSym, {50.0, 0, 0}) - 1.0) < 1e-15);
  double prev = partition_function(kSym, {0.1, 0, 0});
  for (double beta : {0.2, 0.5, 1.0, 3.0}) {
    const double zb = partition_function(kSym, {beta, 0, 0});
    CHECK(zb < prev);
    prev = zb;
  }
  CHECK(boltzmann_truncation(kSym, 1.0) >= 5);
  CHECK_THROWS_AS(ThermalConfig({0.0, 0, 0}).validate(), std::invalid_argument);
}

TEST_CASE("thermal report against direct sums") {
  for (std::size_t m = 0; m <= 3; ++m) {
    for (double beta : {0.3, 1.0, 4.0}) {
      const Direct d = direct_sums(beta, m);
      const auto r = thermal_report(kSym, cs::ZChoice::phase_only(), {beta, m, 0});
      CHECK(std::abs(r.mean_N - d.n1) <= 1e-13 * d.n1);
      CHECK(std::abs(r.mean_N2 - d.n2) <= 1e-13 * d.n2);
      CHECK(r.variance() >= -1e-12 * r.mean_N2);
      CHECK(std::abs(r.mandel_q - (r.variance() / r.mean_N - 1.0)) <= 1e-12 * std::max(1.0, std::abs(r.mandel_q)));
      CHECK(std::abs(r.g2 - (r.mean_N2 - r.mean_N) / (r.mean_N * r.mean_N)) <= 1e-12 * std::abs(r.g2));
    }
  }
  const auto r0 = thermal_report(kSym, cs::ZChoice::phase_only(), {1.0, 0, 0});
  CHECK(std::abs(r0.mean_N - 0.0335373028) < 1e-10);
}

TEST_CASE("cold limit") {
  for (std::size_t m = 1; m <= 3; ++m) {
    const auto r = thermal_report(kSym, cs::ZChoice::phase_only(), {50.0, m, 0});
    CHECK(std::abs(r.mean_N - energy(kSym, m)) <= 1e-8);
    CHECK(std::abs(r.mandel_q + 1.0) <= 1e-8);
  }
  // m = 0: the mean vanishes and the ratio tends to E_1 - 1.
  const auto r0 = thermal_report(kSym, cs::ZChoice::phase_only(), {50.0, 0, 0});
  CHECK(r0.mean_N < 1e-100);
  CHECK(std::abs(r0.mandel_q - (energy(kSym, 1) - 1.0)) <= 1e-8);
}

TEST_CASE("mean energy does not increase with beta") {
  double prev = std::numeric_limits<double>::infinity();
  for (double beta : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double n = thermal_report(kSym, cs::ZChoice::phase_only(), {beta, 1, 0}).mean_N;
    CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("Husimi function") {
  const ThermalConfig cfg{1.0, 0, 0};
  const double z = partition_function(kSym, cfg);
  CHECK(std::abs(husimi(kSym, cs::ZChoice::phase_only(), cfg, {0.0, 0.0}) - 1.0 / z) < 1e-14);
  const double q = husimi(kSym, cs::ZChoice::gamma_weighted(1.0), {2.0, 1, 0}, {0.3, 0.2});
  CHECK(q > 0.0);
  CHECK(q <= 1.0);
  // beta -> infinity keeps only |m>: Q -> N_m^2 / |K_0^m|^2.
  const auto c = cs::ZChoice::phase_only();
  const double x = 0.8;
  const double n2 = std::pow(cs::normalization(c, kSym, 2, x), 2.0);
  const double k0 = cs::coefficient_closed(c, kSym, 2, 0).mod2();
  CHECK(std::abs(husimi(kSym, c, {50.0, 2, 0}, {std::sqrt(x), 0.0}) - n2 / k0) < 1e-12);
}

TEST_CASE("trace of rho through the coherent-state measure") {
  for (std::size_t m = 0; m <= 2; ++m) {
    CHECK(std::abs(trace_check(kSym, cs::ZChoice::gamma_weighted(1.0), {1.0, m, 0}) - 1.0) <= 1e-6);
    CHECK(std::abs(trace_check(kSym, cs::ZChoice::phase_only(), {1.0, m, 0}) - 1.0) <= 1e-4);
  }
}

TEST_CASE("P-function normalization and diagonal") {
  const ThermalConfig cfg{1.0, 1, 0};
  CHECK(std::abs(occupation_a(kSym, 1.0) - 1.0 / std::expm1(1.0)) < 1e-15);
  for (const auto& c : {cs::ZChoice::phase_only(), cs::ZChoice::gamma_weighted(1.0)}) {
    for (std::size_t m = 0; m <= 2; ++m) CHECK(std::abs(p_normalization(kSym, c, {1.0, m, 0}) - 1.0) <= 1e-4);
    for (std::size_t n = 0; n <= 2; ++n) {
      const auto d = p_diagonal(kSym, c, cfg, n);
      CHECK(std::abs(d.target - std::exp(-1.0 * n) * (1.0 - std::exp(-1.0))) < 1e-15);
      CHECK(d.rel_err <= 1e-4);
    }
  }
  double prev = std::numeric_limits<double>::infinity();
  for (double beta : {0.5, 1.0, 2.0, 4.0}) {
    const double mx = p_mean_x(kSym, cs::ZChoice::phase_only(), {beta, 1, 0});
    CHECK(mx < prev);
    prev = mx;
  }
}

TEST_CASE("coherent-state expectations") {
  const auto c = cs::ZChoice::gamma_weighted(1.0);
  const auto e0 = cs_expectations(kSym, c, {0.0, 0.0}, 2);
  CHECK(std::abs(e0.mean_N - energy(kSym, 2)) < 1e-12);
  CHECK(cs_expectations(kSym, c, {0.0, 0.0}, 0).mean_N == 0.0);

  const double x = 0.04;
  double s = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t n = 0; n < 60; ++n) {
    const double t = std::pow(x, static_cast<double>(n)) / cs::coefficient_closed(c, kSym, 1, n).mod2();
    const double e = energy(kSym, n + 1);
    s += t;
    s1 += t * e;
    s2 += t * e * e;
  }
  const auto e = cs_expectations(kSym, c, {0.2, 0.0}, 1);
  CHECK(std::abs(e.mean_N - s1 / s) < 1e-12 * s1 / s);
  CHECK(std::abs(e.mean_N2 - s2 / s) < 1e-12 * s2 / s);
}

TEST_CASE("closed-form crosscheck report") {
  for (std::size_t m = 1; m <= 2; ++m) {
    const ThermalConfig cfg{1.0, m, 0};
    const auto rep = closed_form_crosscheck(kSym, cs::ZChoice::phase_only(), cfg);
    REQUIRE(rep.entries.size() == 4);
    CHECK(rep.entries[0].quantity == "mean_N");
    CHECK(rep.truncation_delta <= 1e-10);
    const auto r = thermal_report(kSym, cs::ZChoice::phase_only(), cfg);
    CHECK(rep.entries[0].direct == r.mean_N);
    for (const auto& e : rep.entries) {
      CHECK(std::isfinite(e.printed));
      CHECK(std::isfinite(e.substituted));
    }
    // Deviations do not move when the truncation is doubled.
    ThermalConfig wide = cfg;
    wide.truncation = 2 * r.truncation;
    const auto rep2 = closed_form_crosscheck(kSym, cs::ZChoice::phase_only(), wide);
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(std::abs(rep2.entries[i].deviation - rep.entries[i].deviation) <=
            1e-10 * std::max(1.0, std::abs(rep.entries[i].deviation)));
  }
}
