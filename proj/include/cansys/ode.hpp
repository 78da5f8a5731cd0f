#pragma once

#include "cansys/matrix.hpp"

#include <functional>
#include <vector>

namespace cansys {

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0: chosen from the interval length
    long max_steps = 4000000;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
    double max_error_estimate = 0.0;
};

using MatrixRhs = std::function<Matrix(double, const Matrix&)>;

/// Adaptive Dormand-Prince 5(4) integration of the matrix-valued ODE
/// y' = f(t, y) from t0 to t1 (either direction). Every entry of `nodes`
/// (sorted along the direction of integration, within [t0, t1]) is hit
/// exactly; the returned samples are the states at those nodes.
/// Throws ToleranceError when the step size underflows.
std::vector<Matrix> integrate_rk45(const MatrixRhs& f, double t0, double t1,
                                   const Matrix& y0, const std::vector<double>& nodes,
                                   const OdeOptions& opt, OdeStats* stats = nullptr);

/// Nodes and weights of 10-point Gauss-Legendre quadrature on [-1, 1].
const std::vector<double>& gauss_legendre_nodes();
const std::vector<double>& gauss_legendre_weights();

/// Composite Gauss-Legendre quadrature nodes covering [t0, t1] with the
/// interval split into `segments` equal parts; returned sorted ascending.
std::vector<double> composite_gl_nodes(double t0, double t1, int segments);

/// Integrates values sampled at composite_gl_nodes(t0, t1, segments).
Complex composite_gl_sum(const std::vector<Complex>& values, double t0, double t1,
                         int segments);

}  // namespace cansys
