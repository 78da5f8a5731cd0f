#include "cansys/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cansys {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1,
                  const OdeOptions& opt) {
    double norm = 0.0;
    for (Index j = 0; j < err.cols(); ++j)
        for (Index i = 0; i < err.rows(); ++i) {
            double scale =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y0(i, j)), std::abs(y1(i, j)));
            norm = std::max(norm, std::abs(err(i, j)) / scale);
        }
    return norm;
}

}  // namespace

std::vector<Matrix> integrate_rk45(const MatrixRhs& f, double t0, double t1,
                                   const Matrix& y0, const std::vector<double>& nodes,
                                   const OdeOptions& opt, OdeStats* stats) {
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    const double lo = std::min(t0, t1), hi = std::max(t0, t1);
    std::vector<Matrix> out;
    out.reserve(nodes.size());

    Matrix y = y0;
    double t = t0;
    Matrix k1 = f(t, y);
    double span = std::abs(t1 - t0);
    double h = (opt.initial_step > 0.0) ? opt.initial_step : std::max(span / 100.0, 1e-8);
    long steps = 0;
    OdeStats local;

    for (double target : nodes) {
        double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
        if (target < lo - slack || target > hi + slack)
            throw InputError("integrate_rk45: node outside the integration interval");
        if (dir * (target - t) < -slack)
            throw InputError("integrate_rk45: nodes must be sorted along the direction");
        while (dir * (target - t) > 1e-14 * std::max(1.0, std::abs(target))) {
            if (++steps > opt.max_steps)
                throw ToleranceError("integrate_rk45: step budget exhausted at t = " +
                                     std::to_string(t));
            double hstep = std::min(h, std::abs(target - t));
            if (hstep < 16.0 * std::numeric_limits<double>::epsilon() *
                            std::max(1.0, std::abs(t)))
                throw ToleranceError("integrate_rk45: step size underflow at t = " +
                                     std::to_string(t));
            double hd = dir * hstep;

            Matrix k2 = f(t + c2 * hd, Matrix(y + hd * (a21 * k1)));
            Matrix k3 = f(t + c3 * hd, Matrix(y + hd * (a31 * k1 + a32 * k2)));
            Matrix k4 = f(t + c4 * hd, Matrix(y + hd * (a41 * k1 + a42 * k2 + a43 * k3)));
            Matrix k5 = f(t + c5 * hd,
                          Matrix(y + hd * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
            Matrix k6 = f(t + hd, Matrix(y + hd * (a61 * k1 + a62 * k2 + a63 * k3 +
                                                   a64 * k4 + a65 * k5)));
            Matrix ynew = y + hd * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            Matrix k7 = f(t + hd, ynew);
            Matrix err = hd * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            double en = error_norm(err, y, ynew, opt);
            if (en <= 1.0) {
                t += hd;
                y = ynew;
                k1 = k7;  // first-same-as-last
                ++local.accepted;
                local.max_error_estimate = std::max(local.max_error_estimate, en);
            } else {
                ++local.rejected;
            }
            double factor = (en > 0.0) ? 0.9 * std::pow(en, -0.2) : 5.0;
            h = hstep * std::clamp(factor, 0.2, 5.0);
        }
        t = target;
        out.push_back(y);
    }
    if (stats) *stats = local;
    return out;
}

const std::vector<double>& gauss_legendre_nodes() {
    static const std::vector<double> nodes = {
        -0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
        -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
        0.4333953941292472,  0.6794095682990244,  0.8650633666889845,
        0.9739065285171717};
    return nodes;
}

const std::vector<double>& gauss_legendre_weights() {
    static const std::vector<double> weights = {
        0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
        0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
        0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
        0.0666713443086881};
    return weights;
}

std::vector<double> composite_gl_nodes(double t0, double t1, int segments) {
    const auto& xs = gauss_legendre_nodes();
    std::vector<double> nodes;
    nodes.reserve(static_cast<size_t>(segments) * xs.size());
    double w = (t1 - t0) / segments;
    for (int s = 0; s < segments; ++s) {
        double lo = t0 + s * w;
        for (double x : xs) nodes.push_back(lo + 0.5 * w * (x + 1.0));
    }
    return nodes;
}

Complex composite_gl_sum(const std::vector<Complex>& values, double t0, double t1,
                         int segments) {
    const auto& ws = gauss_legendre_weights();
    if (values.size() != static_cast<size_t>(segments) * ws.size())
        throw InputError("composite_gl_sum: value count mismatch");
    double w = (t1 - t0) / segments;
    Complex total = 0.0;
    size_t idx = 0;
    for (int s = 0; s < segments; ++s)
        for (double wt : ws) total += 0.5 * w * wt * values[idx++];
    return total;
}

}  // namespace cansys
