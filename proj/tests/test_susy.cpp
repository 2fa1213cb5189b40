#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fd_oracle.hpp"
#include "pasi/poschl_teller.hpp"
#include "pasi/susy_core.hpp"

using namespace pasi;
using namespace pasi::susy;
using pasi::testing::Gen;

namespace {

constexpr std::size_t kGrid = 2048;

double max_abs_diff(const GridFunction& f, const std::function<double(double)>& g) {
  double d = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) d = std::max(d, std::abs(f.values[j] - g(f.x(j))));
  return d;
}

}  // namespace

TEST_CASE("remainder sequence and spectrum") {
  const auto chain = parameter_chain(PTParams::symmetric(2.0, 1.0));
  const auto r = remainder_sequence(chain, 3);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == 5.0);
  CHECK(r[1] == 7.0);
  CHECK(r[2] == 9.0);
  CHECK(remainder_sequence(chain, 1) == std::vector<double>{5.0});
  const auto e = spectrum(chain, 3).energies;
  CHECK(e == std::vector<double>{0.0, 5.0, 12.0, 21.0});
  CHECK(spectrum(chain, 0).energies == std::vector<double>{0.0});
}

TEST_CASE("grid sampling and spectral derivatives") {
  CHECK_THROWS_AS(sample(0.0, 1.0, 2, [](double) { return 0.0; }), std::invalid_argument);
  const double L = 2.0;
  const double k = std::numbers::pi / L;
  CHECK(differentiation_residual(0.0, L, 256) < 1e-10);

  // Odd at both ends: sin(3 k x), derivative even at both ends.
  auto f = sample(0.0, L, 255, [&](double x) { return std::sin(3 * k * x); });
  auto df = derivative(f);
  CHECK(df.left == Parity::even);
  CHECK(df.right == Parity::even);
  CHECK(max_abs_diff(df, [&](double x) { return 3 * k * std::cos(3 * k * x); }) < 1e-10);

  // Odd at the left end, even at the right, zero at both: sin(k x / 2) sin^2(k x).
  auto g = sample(0.0, L, 255, [&](double x) { return std::sin(0.5 * k * x) * std::pow(std::sin(k * x), 2); },
                  Parity::odd, Parity::even);
  CHECK(max_abs_diff(derivative(g), [&](double x) {
          return 0.5 * k * std::cos(0.5 * k * x) * std::pow(std::sin(k * x), 2) +
                 std::sin(0.5 * k * x) * k * std::sin(2 * k * x);
        }) < 1e-10);

  // Even at both ends: sin^2(2 k x).
  auto h = sample(0.0, L, 255, [&](double x) { return std::pow(std::sin(2 * k * x), 2); }, Parity::even, Parity::even);
  CHECK(max_abs_diff(derivative(h), [&](double x) { return 2 * k * std::sin(4 * k * x); }) < 1e-10);
}

TEST_CASE("property: filtering is idempotent and inner products are symmetric") {
  Gen gen(51);
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = gen.count(16, 300);
    const double c1 = gen.real(-1, 1), c2 = gen.real(-1, 1);
    auto f = sample(0.0, 1.0, n, [&](double x) { return c1 * std::sin(std::numbers::pi * x) + c2 * x * x * (1 - x); });
    auto g = sample(0.0, 1.0, n, [&](double x) { return std::sin(2 * std::numbers::pi * x) * std::exp(x); });
    const auto ff = filtered(f);
    const auto fff = filtered(ff);
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(ff.values[j] - fff.values[j]));
    CHECK(d < 1e-13);
    CHECK(std::abs(inner(f, g) - inner(g, f)) < 1e-15);
    CHECK(std::abs(norm(normalized(g)) - 1.0) < 1e-14);
  }
}

TEST_CASE("eigenfunctions against a finite-difference eigensolver") {
  for (const PTParams& p : {PTParams{2, 2, 1}, PTParams{2, 3, 1}, PTParams{3, 2, 0.7}}) {
    const auto model = shape_invariant_model(p);
    auto v = [&](double x) { return potential_value(p, x); };
    const auto energies = testing::richardson_energies(v, 0.0, p.width(), kGrid + 1, 6);
    const auto fd = testing::fd_eigenpairs(v, 0.0, p.width(), kGrid, 6);
    for (std::size_t n = 0; n <= 5; ++n) {
      const auto psi = build_eigenfunction(model, n, kGrid);
      CHECK(std::abs(energies[n] - energy(p, n)) <= 1e-6 * std::max(1.0, energy(p, n)));
      CHECK(testing::cosine(psi.values, fd.vectors[n]) >= 1.0 - 1e-6);
    }
  }
}

TEST_CASE("raising then lowering scales by the next energy") {
  const PTParams p{2, 2, 1};
  const auto upper = shape_invariant_model(p.shifted(2));
  auto w1 = [&](double x) { return superpotential_value(p, x); };
  for (std::size_t n = 0; n <= 3; ++n) {
    const auto psi = build_eigenfunction(upper, n, kGrid);
    const auto back = apply_lowering(w1, apply_raising(w1, psi));
    GridFunction r = back;
    for (std::size_t j = 0; j < r.size(); ++j) r.values[j] -= energy(p, n + 1) * psi.values[j];
    CHECK(interior_norm(r) / interior_norm(back) <= 1e-8);
  }
}

TEST_CASE("partner relations on integer wells") {
  for (const PTParams& p : {PTParams{2, 2, 1}, PTParams{2, 3, 1}, PTParams{4, 2, 1.5}}) {
    const auto rep = verify_partner_relations(shape_invariant_model(p), 5, kGrid);
    CHECK(rep.riccati_residual <= 1e-8);
    CHECK(rep.annihilation_residual <= 1e-8);
    REQUIRE(rep.isospectral_gap.size() == 5);
    REQUIRE(rep.hamiltonian_residual.size() == 6);
    for (double g : rep.isospectral_gap) CHECK(g <= 1e-12);
    for (double h : rep.hamiltonian_residual) CHECK(h <= 1e-6);
    for (double t : rep.intertwining_residual) CHECK(t <= 1e-6);
    for (double nr : rep.norm_ratio) CHECK(std::abs(nr - 1.0) <= 1e-8);
    CHECK(rep.max_overlap <= 1e-8);
    CHECK(rep.ok(1e-8, 1e-6));
  }
}

TEST_CASE("n_max = 0 only checks the Riccati relation and the ground state") {
  const auto rep = verify_partner_relations(shape_invariant_model(PTParams{2, 2, 1}), 0, 512);
  CHECK(rep.isospectral_gap.empty());
  CHECK(rep.intertwining_residual.empty());
  CHECK(rep.hamiltonian_residual.size() == 1);
  CHECK(rep.annihilation_residual <= 1e-8);
}

TEST_CASE("property: Riccati and annihilation residuals on random integer wells") {
  Gen gen(52);
  for (int i = 0; i < 6; ++i) {
    const PTParams p{static_cast<double>(gen.count(2, 4)), static_cast<double>(gen.count(2, 4)), gen.real(0.5, 2.0)};
    const auto rep = verify_partner_relations(shape_invariant_model(p), 1, kGrid);
    CHECK(rep.riccati_residual <= 1e-8);
    CHECK(rep.annihilation_residual <= 1e-8);
    CHECK(rep.isospectral_gap.front() <= 1e-12);
  }
}
