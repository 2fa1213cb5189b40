#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace pasi::susy {

// a_k = a1 + (k - 1) * shift, with remainder R(a) evaluated on the parameter.
struct ParameterChain {
  double a1 = 0.0;
  double shift = 1.0;
  std::function<double(double)> remainder_of;

  double param(std::size_t k) const { return a1 + static_cast<double>(k - 1) * shift; }
  double remainder(std::size_t k) const { return remainder_of(param(k)); }
};

struct SpectrumTable {
  std::vector<double> energies;
};

std::vector<double> remainder_sequence(const ParameterChain& chain, std::size_t count);

// E_n = sum_{k=1}^n R(a_k).
SpectrumTable spectrum(const ParameterChain& chain, std::size_t n_max);

// Behaviour of a grid function under reflection at an endpoint.
enum class Parity { odd, even };

inline Parity flip(Parity p) { return p == Parity::odd ? Parity::even : Parity::odd; }

// Samples on the open grid x_j = x_min + j (x_max - x_min) / (N + 1), j = 1..N.
// Endpoint values are zero; the parities say how the function continues past
// each end and select the trigonometric basis used for derivatives.
struct GridFunction {
  double x_min = 0.0;
  double x_max = 1.0;
  std::vector<double> values;
  Parity left = Parity::odd;
  Parity right = Parity::odd;

  std::size_t size() const { return values.size(); }
  double step() const { return (x_max - x_min) / static_cast<double>(values.size() + 1); }
  double x(std::size_t j) const { return x_min + static_cast<double>(j + 1) * step(); }
};

GridFunction sample(double x_min, double x_max, std::size_t n, const std::function<double(double)>& f,
                    Parity left = Parity::odd, Parity right = Parity::odd);

// Projection onto the trigonometric modes above the roundoff floor.
GridFunction filtered(const GridFunction& f);

// Spectral first derivative; the result has both parities flipped.
GridFunction derivative(const GridFunction& f);

double inner(const GridFunction& f, const GridFunction& g);
double norm(const GridFunction& f);
GridFunction normalized(const GridFunction& f);

// Discrete L2 norm skipping the first and last interior points.
double interior_norm(const GridFunction& f);
double interior_max_abs(const GridFunction& f);

using Superpotential = std::function<double(double)>;

// A f = f' + W f
GridFunction apply_lowering(const Superpotential& w, const GridFunction& f);
// A^dagger f = -f' + W f
GridFunction apply_raising(const Superpotential& w, const GridFunction& f);

// -f'' + V f
GridFunction apply_hamiltonian(const std::function<double(double)>& v, const GridFunction& f);

// Largest relative error of the derivative of a smooth odd test profile;
// values above ~1e-10 mean the grid is too coarse for the requested work.
double differentiation_residual(double x_min, double x_max, std::size_t n);

// A shape-invariant family on a fixed interval. Index k refers to parameter a_k.
struct ShapeInvariantModel {
  ParameterChain chain;
  double x_min = 0.0;
  double x_max = 1.0;
  std::function<double(std::size_t k, double x)> superpotential;
  std::function<double(std::size_t k, double x)> superpotential_derivative;
  std::function<double(std::size_t k, double x)> potential;  // V_1(x; a_k), E_0 = 0
  std::function<GridFunction(std::size_t k, std::size_t n)> ground_state;  // on an n-point grid
};

// A^dagger(a_1) ... A^dagger(a_n) psi_0(a_{n+1}), normalized.
GridFunction build_eigenfunction(const ShapeInvariantModel& model, std::size_t n, std::size_t grid_points);

struct PartnerReport {
  std::size_t grid_points = 0;
  double riccati_residual = 0.0;       // max |V - (W^2 - W')| over the interior
  double annihilation_residual = 0.0;  // ||A psi_0|| / ||psi_0||
  std::vector<double> isospectral_gap;       // |E^(2)_n - E^(1)_{n+1}|, n < n_max
  std::vector<double> hamiltonian_residual;  // ||(H - E_n) psi_n|| / ||psi_n||, n <= n_max
  std::vector<double> intertwining_residual; // ||(H_2 - E_{n+1}) A psi_{n+1}|| / ||A psi_{n+1}||, n < n_max
  std::vector<double> norm_ratio;            // ||A psi_{n+1}||^2 / E_{n+1}, n < n_max
  double max_overlap = 0.0;                  // largest |<psi_i|psi_j>|, i != j
  bool ok(double riccati_tol, double op_tol) const;
};

// Builds psi_0..psi_{n_max} and checks the partner relations among them; the grid is doubled (up to twice) while the
// Riccati or annihilation residual exceeds riccati_tol.
PartnerReport verify_partner_relations(const ShapeInvariantModel& model, std::size_t n_max,
                                       std::size_t grid_points = 2048, double riccati_tol = 1e-8);

}  // namespace pasi::susy
