#pragma once

#include <utility>
#include <vector>

namespace vpb::detail {

// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

// Gauss-Hermite nodes for weight e^{-z^2}, with weights already multiplied by
// e^{z^2}, so sum(w f(z)) approximates the plain integral of f.
std::pair<std::vector<double>, std::vector<double>> gauss_hermite_scaled(int n);

}  // namespace vpb::detail
