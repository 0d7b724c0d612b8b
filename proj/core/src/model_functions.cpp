#include "steklov/model_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "steklov/errors.hpp"
#include "steklov/quadrature.hpp"

namespace steklov {

namespace model {

namespace {
constexpr double kPi = std::numbers::pi;
}

double f(double v) { return std::sin(kPi * v); }
double f_prime(double v) { return kPi * std::cos(kPi * v); }

double f1(double v) { return (1.0 - v) * std::cos(kPi * v) - std::sin(kPi * v) / (2.0 * kPi); }
double f1_prime(double v) {
    return -1.5 * std::cos(kPi * v) - (1.0 - v) * kPi * std::sin(kPi * v);
}

double f2(double v) {
    const double q = -0.5 * v * v + v - (0.5 + 3.0 / (8.0 * kPi * kPi));
    return q * std::sin(kPi * v);
}
double f2_prime(double v) {
    const double q = -0.5 * v * v + v - (0.5 + 3.0 / (8.0 * kPi * kPi));
    return (1.0 - v) * std::sin(kPi * v) + q * kPi * std::cos(kPi * v);
}

}  // namespace model

double integral_I(double r) {
    if (!(r > 0.0) || !(r < 1.0)) throw Error("integral_I: need 0 < r < 1");
    const double lr = std::log(r);
    constexpr double kPi = std::numbers::pi;
    return 4.0 * kPi * (1.0 + std::sqrt(r)) / (lr * lr + 4.0 * kPi * kPi);
}

namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1] (symmetric half listed).
constexpr std::array<double, 8> kKronrodX = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr std::array<double, 4> kGaussW = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelResult {
    double kronrod;
    double err;
};

PanelResult panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double kron = 0.0, gauss = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double x = kKronrodX[static_cast<std::size_t>(i)];
        const double fv = (i == 7) ? f(c) : f(c - h * x) + f(c + h * x);
        kron += kKronrodW[static_cast<std::size_t>(i)] * fv;
        if (i % 2 == 1) gauss += kGaussW[static_cast<std::size_t>(i / 2)] * fv;
    }
    return {kron * h, std::abs(kron - gauss) * h};
}

double adaptive(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
    const PanelResult p = panel(f, a, b);
    if (p.err <= tol || depth <= 0) return p.kronrod;
    const double c = 0.5 * (a + b);
    return adaptive(f, a, c, tol / 2, depth - 1) + adaptive(f, c, b, tol / 2, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 int max_depth) {
    if (a == b) return 0.0;
    return adaptive(f, a, b, abs_tol, max_depth);
}

double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
    if (n < 1) throw QuadratureUnderflow("trapezoid: need at least one panel");
    const double h = (b - a) / n;
    double sum = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) sum += f(a + i * h);
    return sum * h;
}

}  // namespace steklov
