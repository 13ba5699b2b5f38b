#pragma once

#include <string>

#include "freeprob/brown.hpp"
#include "freeprob/cumulants.hpp"

namespace freeprob {

// Families are built from their cumulant tables and materialized up to
// `degree` by the moment-cumulant formula.

// free circular elements, κ_2(x_i, x_i*) = κ_2(x_i*, x_i) = c
MomentFunctional build_circular_family(int count, const Rational& variance, int degree,
                                       const std::string& alphabet = "x");
// free standard semicircular elements (x_i = x_i*), κ_2 = 1 on every star pattern
MomentFunctional build_semicircular_family(int count, int degree, const std::string& alphabet = "x");
// free Haar unitaries: alternating cumulants (-1)^{r-1} C_{r-1}
MomentFunctional build_haar_unitary_family(int count, int degree, const std::string& alphabet = "x");
// (u_{11}, ..., u_{n1}) under h_n
MomentFunctional build_freely_uniform(int n, int degree, const std::string& alphabet = "x");
// symmetric Bernoulli self-adjoint letter: φ(s^k) = 1 for even k
MomentFunctional build_bernoulli(int degree, const std::string& alphabet = "s");

// (y_1, ..., y_m) with y_i = u_i s computed in the free product of phi_u and
// phi_single; phi_single must be a single self-adjoint letter. Output
// letters use `alphabet` with the indices of phi_u.
MomentFunctional build_product_family(const MomentFunctional& phi_u, const MomentFunctional& phi_single, int degree,
                                      const std::string& alphabet = "y");

// Replace κ(w) and κ(w*) by `value` and regenerate the moments.
MomentFunctional perturb_cumulant(const MomentFunctional& phi, const Word& w, const Rational& value);

// Relabel every letter to `alphabet`, keeping indices and stars.
MomentFunctional rename_alphabet(const MomentFunctional& phi, const std::string& alphabet);

}  // namespace freeprob
