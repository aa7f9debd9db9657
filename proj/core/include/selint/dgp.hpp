#pragma once

#include <cstdint>
#include <string>

#include "selint/dataset.hpp"

namespace selint {

enum class DgpFamily { Dgp1, Dgp2 };

std::string to_string(DgpFamily family);
DgpFamily parse_dgp_family(const std::string& text);

struct DgpSpec {
  DgpFamily family = DgpFamily::Dgp1;
  std::size_t n = 100;
  double rho = 0.0;
  double alpha = 2.0;
  std::size_t l = 7;
  std::size_t k = 4;
  double theta0 = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  // Identifies the design cell independently of n-invariant settings like seed.
  std::string cell_label() const;
};

/// A simulated sample together with the latent draws that produced it.
struct LatentDraw {
  Dataset dataset;
  Vector u;
  Vector v;
  Vector index;
};

/// DGP1: Z and V independent standard normal, gamma0 = sqrt(alpha / l) * 1.
/// DGP2: Z iid standard Cauchy, V Pareto(alpha) on [1, inf), gamma0 = e_l.
/// Both: U = rho V + E with E ~ N(0, 1 - rho^2), X = first k columns of Z,
/// beta0 = 1, d = 1{Z'gamma0 >= V}, y = d (theta0 + X'beta0 + U).
LatentDraw simulate(const DgpSpec& spec);

Vector true_gamma(const DgpSpec& spec);
Vector true_beta(const DgpSpec& spec);
double true_intercept(const DgpSpec& spec) noexcept;

/// Density of F0(V) at q: g_V(F0^{-1}(q)) / f0(F0^{-1}(q)), with F0 the
/// index distribution of the family.
double identification_ratio(DgpFamily family, double alpha, double q);

}  // namespace selint
