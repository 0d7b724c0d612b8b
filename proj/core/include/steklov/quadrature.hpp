#pragma once

#include <functional>

namespace steklov {

// Adaptive Gauss-Kronrod (G7,K15) quadrature on [a,b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-13, int max_depth = 40);

// Composite trapezoid rule over n uniform panels (grid-order reference rule).
double trapezoid(const std::function<double(double)>& f, double a, double b, int n);

}  // namespace steklov
