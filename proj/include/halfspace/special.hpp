#pragma once

namespace halfspace {

/// Dirichlet eta function by accelerated alternating series (Cohen, Rodriguez
/// Villegas, Zagier), valid for s >= 0.
double dirichlet_eta(double s);

/// Radial integral J_s for quantum statistics in temperature-normalized form.
/// sign = -1 (fermions): 2/Gamma(s/2+1) * int_0^inf r^{s+1} e^{r^2}/(e^{r^2}+1)^2 dr.
/// sign = +1 (bosons):  same with (e^{r^2}-1)^2 and lower limit lambda.
/// Evaluated by adaptive Gauss-Kronrod quadrature to relative tolerance `tol`.
/// Fermion values are checked against the eta series.
double quantum_J(double s, int sign, double lambda, double tol = 1e-10);

}  // namespace halfspace
