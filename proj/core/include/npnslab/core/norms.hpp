#pragma once

#include "npnslab/core/field.hpp"

#include <vector>

namespace npnslab::core {

struct Norms {
    double l2 = 0.0;
    double h1_semi = 0.0;
    double h2 = 0.0;  // full H2 norm (L2 + H1 semi + second derivatives)
    double linf = 0.0;
};

/// Trapezoid rule in y, uniform weights in x'.
double integrate(const ScalarField& f);
double inner(const ScalarField& f, const ScalarField& g);
double l2_norm(const ScalarField& f);
double l2_norm(const VelocityField& u);
/// ||grad f||^2 with the module stencils.
double grad_sq(const ScalarField& f);
double grad_sq(const VelocityField& u);

Norms norms(const ScalarField& f);
Norms norms(const VelocityField& u);

/// sup over samples.
double linf_time(const std::vector<double>& values);
/// sqrt of the trapezoid integral of values^2 over times.
double l2_time(const std::vector<double>& times, const std::vector<double>& values);

} // namespace npnslab::core
