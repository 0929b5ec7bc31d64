#pragma once

#include "halfspace/types.hpp"

namespace halfspace {

/// One-dimensional Gaussian rule.
///
/// `weight` integrates against the rule's weight function; `folded` has that
/// weight function divided out, so sum(folded * f(x)) approximates the plain
/// integral of f.
struct GaussRule {
  Vec x;
  Vec weight;
  Vec folded;
};

/// Gauss-Hermite rule for exp(-x^2). Nodes are ascending and exactly
/// antisymmetric (x[k] == -x[n-1-k]).
GaussRule gauss_hermite(int n);

/// Generalized Gauss-Laguerre rule for x^alpha exp(-x) on [0, inf), alpha > -1.
GaussRule gauss_laguerre(int n, double alpha);

/// Gauss-Legendre rule on [-1, 1]; `folded` equals `weight`.
GaussRule gauss_legendre(int n);

}  // namespace halfspace
