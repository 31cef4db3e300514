#pragma once

#include <cstddef>
#include <string>

namespace surfpde {

/// C(n, k) for small arguments.
std::size_t binomial(int n, int k);

/// Parameters of a PHS + polynomial RBF-FD discretization with normal
/// extension at the reference node.
struct PhsPolyConfig {
  int m = 5;              // PHS exponent, phi(r) = r^m, odd
  int l = 2;              // total degree of the augmenting polynomials
  int dim = 3;            // embedding dimension
  std::size_t n_s = 20;   // surface stencil size
  std::size_t n_perp = 4; // off-surface points along the reference normal
  double eps_normal = 0.1;

  /// Size of the polynomial basis, C(l + dim, dim).
  std::size_t poly_size() const { return binomial(l + dim, dim); }

  /// Empty when valid, otherwise the first violated rule.
  std::string violation() const;
  /// Throws InputError naming the violated rule.
  void validate() const;

  /// Default stencil: n_s = 2 C(l+d, l), smallest even admissible n_perp.
  static PhsPolyConfig with_defaults(int l, int dim = 3, int m = 5, double eps_normal = 0.1);
};

/// True when n_perp satisfies the off-surface layout rule: even, and
/// n_perp >= l+1 for odd l, n_perp > l+1 for even l.
bool admissible_n_perp(std::size_t n_perp, int l);
std::size_t default_n_perp(int l);

}  // namespace surfpde
