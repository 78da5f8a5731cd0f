#include "cansys/canonical_system.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace cansys {

Matrix MatrixPolynomial::eval(double t) const {
    if (coeffs.empty()) throw InputError("MatrixPolynomial: empty coefficient list");
    Matrix m = coeffs.back();
    for (Index k = static_cast<Index>(coeffs.size()) - 2; k >= 0; --k)
        m = m * t + coeffs[static_cast<size_t>(k)];
    return m;
}

Matrix CanonicalSystem::coeff_b(double t) const {
    for (const Piece& p : pieces)
        if (t <= p.t1 || &p == &pieces.back()) return p.b.eval(t);
    return pieces.back().b.eval(t);
}

Matrix CanonicalSystem::coeff_delta(double t) const {
    for (const Piece& p : pieces)
        if (t <= p.t1 || &p == &pieces.back()) return p.delta.eval(t);
    return pieces.back().delta.eval(t);
}

Matrix CanonicalSystem::system_matrix(double t, Complex lambda) const {
    return j_inverse() * (coeff_b(t) + lambda * coeff_delta(t));
}

ValidationReport validate_system(const CanonicalSystem& s) {
    ValidationReport r;
    if (s.n <= 0) {
        r.failure = "state dimension must be positive";
        return r;
    }
    if (s.J.rows() != s.n || s.J.cols() != s.n) {
        r.failure = "J has the wrong shape";
        return r;
    }
    r.j_skew_defect = (s.J + s.J.adjoint()).norm();
    r.j_unitary_defect = (s.J * s.J.adjoint() - Matrix::Identity(s.n, s.n)).norm();
    double jscale = std::max(1.0, s.J.norm());
    if (r.j_skew_defect > 1e-12 * jscale) {
        r.failure = "J is not skew-Hermitian (J^* = -J fails)";
        return r;
    }
    if (r.j_unitary_defect > 1e-12 * jscale) {
        r.failure = "J is not a signature operator (J^* = J^{-1} fails)";
        return r;
    }

    if (s.pieces.empty()) {
        r.failure = "no coefficient pieces";
        return r;
    }
    r.pieces_tile = true;
    double cursor = s.a;
    for (const Piece& p : s.pieces) {
        if (std::abs(p.t0 - cursor) > 1e-12 * std::max(1.0, std::abs(cursor)) ||
            p.t1 <= p.t0)
            r.pieces_tile = false;
        cursor = p.t1;
        if (p.b.rows() != s.n || p.b.cols() != s.n || p.delta.rows() != s.n ||
            p.delta.cols() != s.n) {
            r.failure = "coefficient matrices have the wrong shape";
            return r;
        }
    }
    if (std::abs(cursor - s.b) > 1e-12 * std::max(1.0, std::abs(s.b))) r.pieces_tile = false;
    if (!r.pieces_tile) {
        r.failure = "pieces do not tile [a, b]";
        return r;
    }

    int grid = std::max(64, s.tol.validation_grid);
    r.delta_min_eigenvalue = 0.0;
    for (const Piece& p : s.pieces) {
        for (int k = 0; k <= grid; ++k) {
            double t = p.t0 + (p.t1 - p.t0) * k / grid;
            Matrix bm = p.b.eval(t);
            Matrix dm = p.delta.eval(t);
            if (!all_finite(bm) || !all_finite(dm)) {
                r.failure = "coefficients are not finite on the validation grid";
                return r;
            }
            r.b_hermiticity = std::max(r.b_hermiticity, hermiticity_defect(bm));
            double dmin = min_eigenvalue_hermitian(dm);
            r.delta_min_eigenvalue = std::min(r.delta_min_eigenvalue, dmin);
            if (hermiticity_defect(dm) > 1e-10) {
                r.failure = "Delta(t) is not Hermitian on the validation grid";
                return r;
            }
        }
    }
    if (r.b_hermiticity > 1e-10) {
        r.failure = "B(t) is not Hermitian on the validation grid";
        return r;
    }
    if (r.delta_min_eigenvalue < -1e-10) {
        r.failure = "Delta(t) has a negative eigenvalue on the validation grid";
        return r;
    }
    if (s.b_kind == EndpointKind::TruncatedSingular)
        r.notes.push_back(
            "endpoint b is a truncation; endpoint quantities approximate limits at " +
            (s.true_b_infinite ? std::string("infinity") : std::to_string(s.true_b)));
    r.valid = true;
    return r;
}

void require_valid(const CanonicalSystem& s) {
    ValidationReport r = validate_system(s);
    if (!r.valid) throw InputError("invalid canonical system: " + r.failure);
}

Matrix SignatureData::normal_form() const {
    Index n = 2 * dim_h + dim_h_hat;
    Matrix jn = Matrix::Zero(n, n);
    jn.block(0, dim_h + dim_h_hat, dim_h, dim_h) = -Matrix::Identity(dim_h, dim_h);
    jn.block(dim_h, dim_h, dim_h_hat, dim_h_hat) =
        Complex(0, 1) * static_cast<double>(delta) * Matrix::Identity(dim_h_hat, dim_h_hat);
    jn.block(dim_h + dim_h_hat, 0, dim_h, dim_h) = Matrix::Identity(dim_h, dim_h);
    return jn;
}

SignatureData signature_of(const Matrix& j) {
    const Index n = j.rows();
    Matrix ij = Complex(0, 1) * j;
    if (hermiticity_defect(ij) > 1e-10)
        throw InputError("signature_of: iJ is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (ij + ij.adjoint())));
    SignatureData sig;
    std::vector<Index> plus, minus;
    for (Index k = 0; k < n; ++k) {
        double ev = es.eigenvalues()(k);
        if (std::abs(ev - 1.0) < 1e-8)
            plus.push_back(k);
        else if (std::abs(ev + 1.0) < 1e-8)
            minus.push_back(k);
        else
            throw InputError("signature_of: eigenvalue of iJ away from +-1");
    }
    sig.nu_plus = static_cast<int>(plus.size());
    sig.nu_minus = static_cast<int>(minus.size());
    int diff = sig.nu_minus - sig.nu_plus;
    sig.delta = (diff > 0) - (diff < 0);
    sig.dim_h = std::min(sig.nu_plus, sig.nu_minus);
    sig.dim_h_hat = std::abs(diff);
    sig.hamiltonian = (sig.dim_h_hat == 0);

    const double isq = 1.0 / std::sqrt(2.0);
    Matrix u(n, n);
    for (Index k = 0; k < sig.dim_h; ++k) {
        Vector p = es.eigenvectors().col(plus[k]);
        Vector m = es.eigenvectors().col(minus[k]);
        u.col(k) = isq * (p + m);
        u.col(sig.dim_h + sig.dim_h_hat + k) = Complex(0, -1) * isq * (p - m);
    }
    for (Index k = 0; k < sig.dim_h_hat; ++k) {
        // The middle block carries the excess eigenvectors: J v = i delta v.
        Vector v = (sig.delta > 0) ? es.eigenvectors().col(minus[sig.dim_h + k])
                                   : es.eigenvectors().col(plus[sig.dim_h + k]);
        u.col(sig.dim_h + k) = v;
    }
    sig.U = u;
    sig.normal_form_residual = (u.adjoint() * j * u - sig.normal_form()).norm();
    if (sig.normal_form_residual > 1e-10)
        throw InternalError("signature_of: normal form residual too large");
    return sig;
}

SignatureData signature_decompose(const CanonicalSystem& s) {
    require_valid(s);
    return signature_of(s.J);
}

std::vector<double> dense_grid(const CanonicalSystem& s, int per_piece) {
    std::vector<double> ts;
    for (const Piece& p : s.pieces) {
        for (int k = 0; k < per_piece; ++k)
            ts.push_back(p.t0 + (p.t1 - p.t0) * k / per_piece);
    }
    ts.push_back(s.b);
    return ts;
}

std::vector<Matrix> solve_at(const CanonicalSystem& s, Complex lambda,
                             const std::vector<double>& sample_ts) {
    // Integration nodes: piece boundaries plus the requested samples.
    std::vector<double> nodes = sample_ts;
    for (const Piece& p : s.pieces) {
        nodes.push_back(p.t0);
        nodes.push_back(p.t1);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    OdeOptions opt;
    opt.rel_tol = s.tol.ode_rel;
    opt.abs_tol = s.tol.ode_abs;
    auto rhs = [&s, lambda](double t, const Matrix& y) -> Matrix {
        return s.system_matrix(t, lambda) * y;
    };
    std::vector<Matrix> at_nodes = integrate_rk45(
        rhs, s.a, s.b, Matrix::Identity(s.n, s.n), nodes, opt);

    // Pick out the requested samples from the node list.
    std::vector<Matrix> out;
    out.reserve(sample_ts.size());
    for (double t : sample_ts) {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), t);
        out.push_back(at_nodes[static_cast<size_t>(it - nodes.begin())]);
    }
    return out;
}

FundamentalSolution fundamental_solution(const CanonicalSystem& s, Complex lambda,
                                         std::vector<double> sample_ts) {
    require_valid(s);
    if (sample_ts.empty()) sample_ts = dense_grid(s, 8);
    std::sort(sample_ts.begin(), sample_ts.end());
    FundamentalSolution f;
    f.lambda = lambda;
    f.grid = sample_ts;

    std::vector<double> nodes = sample_ts;
    for (const Piece& p : s.pieces) {
        nodes.push_back(p.t0);
        nodes.push_back(p.t1);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    OdeOptions opt;
    opt.rel_tol = s.tol.ode_rel;
    opt.abs_tol = s.tol.ode_abs;
    auto rhs = [&s, lambda](double t, const Matrix& y) -> Matrix {
        return s.system_matrix(t, lambda) * y;
    };
    std::vector<Matrix> at_nodes =
        integrate_rk45(rhs, s.a, s.b, Matrix::Identity(s.n, s.n), nodes, opt, &f.stats);
    f.values.reserve(sample_ts.size());
    for (double t : f.grid) {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), t);
        f.values.push_back(at_nodes[static_cast<size_t>(it - nodes.begin())]);
    }
    return f;
}

Matrix solution_at_b(const CanonicalSystem& s, Complex lambda) {
    return solve_at(s, lambda, {s.b}).front();
}

double j_invariance_residual(const CanonicalSystem& s, Complex lambda,
                             int samples_per_piece) {
    std::vector<double> ts = dense_grid(s, samples_per_piece);
    // Joint solve keeps both parameters on one adaptive grid.
    const Index n = s.n;
    OdeOptions opt;
    opt.rel_tol = s.tol.ode_rel;
    opt.abs_tol = s.tol.ode_abs;
    auto rhs = [&s, lambda, n](double t, const Matrix& y) -> Matrix {
        Matrix out(n, 2 * n);
        out.leftCols(n) = s.system_matrix(t, lambda) * y.leftCols(n);
        out.rightCols(n) = s.system_matrix(t, std::conj(lambda)) * y.rightCols(n);
        return out;
    };
    Matrix y0(n, 2 * n);
    y0.leftCols(n) = Matrix::Identity(n, n);
    y0.rightCols(n) = Matrix::Identity(n, n);
    std::vector<double> nodes = ts;
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::vector<Matrix> vals = integrate_rk45(rhs, s.a, s.b, y0, nodes, opt);
    double worst = 0.0;
    for (const Matrix& v : vals) {
        Matrix yl = v.leftCols(n);
        Matrix yc = v.rightCols(n);
        worst = std::max(worst, (yc.adjoint() * s.J * yl - s.J).norm());
    }
    return worst;
}

}  // namespace cansys
