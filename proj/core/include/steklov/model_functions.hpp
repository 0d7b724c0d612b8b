#pragma once

namespace steklov {

// One-dimensional model functions of the thin-part expansion, on v in [0,1].
//   f  (v) = sin(pi v)
//   f1 (v) = (1-v) cos(pi v) - sin(pi v)/(2 pi)      solves -f1'' - pi^2 f1 = -2 pi f,
//                                                    f1(0)=1, f1(1)=0, <f,f1> = 0
//   f2 (v) = (-v^2/2 + v - 1/2 - 3/(8 pi^2)) sin(pi v)
//                                                    solves -f2'' - pi^2 f2 = -2 pi f1,
//                                                    f2(0)=f2(1)=0, <f,f2> = -<f1,f1>/2
namespace model {

double f(double v);
double f_prime(double v);
double f1(double v);
double f1_prime(double v);
double f2(double v);
double f2_prime(double v);

}  // namespace model

// Closed form of I(r) = int_0^1 r^{v/2} sin(pi v) dv for 0 < r < 1:
// I (1 + 4 pi^2/ln(r)^2) = 4 pi (1 + sqrt(r)) / ln(r)^2.
double integral_I(double r);

}  // namespace steklov
