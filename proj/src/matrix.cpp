#include "cansys/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace cansys {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

bool all_finite(const Matrix& m) {
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) {
            const Complex& z = m(i, j);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        }
    return true;
}

void require_finite(const Matrix& m, const char* what) {
    if (!all_finite(m)) throw InputError(std::string(what) + ": non-finite entries");
}

double hermiticity_defect(const Matrix& m) {
    double scale = m.norm();
    if (scale == 0.0) return 0.0;
    return (m - m.adjoint()).norm() / scale;
}

double default_rank_tol(Index rows, Index cols, double sigma_max) {
    return kEps * static_cast<double>(std::max(rows, cols)) * sigma_max;
}

Subspace Subspace::zero(Index ambient) {
    Subspace s;
    s.ambient_dim = ambient;
    s.basis = Matrix::Zero(ambient, 0);
    return s;
}

Subspace Subspace::full(Index ambient) {
    Subspace s;
    s.ambient_dim = ambient;
    s.basis = Matrix::Identity(ambient, ambient);
    return s;
}

Subspace Subspace::span_of(const Matrix& m, double tol) { return column_space(m, tol); }

Matrix Subspace::projector() const { return basis * basis.adjoint(); }

double Subspace::distance(const Vector& v) const {
    double nv = v.norm();
    if (nv == 0.0) return 0.0;
    if (dim() == 0) return 1.0;
    Vector r = v - basis * (basis.adjoint() * v);
    return r.norm() / nv;
}

bool Subspace::contains(const Vector& v, double tol) const { return distance(v) <= tol; }

bool Subspace::contains(const Subspace& other, double tol) const {
    for (Index j = 0; j < other.dim(); ++j)
        if (!contains(Vector(other.basis.col(j)), tol)) return false;
    return true;
}

Subspace Subspace::orthogonal_complement() const {
    if (dim() == 0) return Subspace::full(ambient_dim);
    return null_space(basis.adjoint());
}

Subspace column_space(const Matrix& m, double tol) {
    require_finite(m, "column_space");
    if (tol < 0.0) throw InputError("column_space: negative tolerance");
    Subspace s;
    s.ambient_dim = m.rows();
    if (m.cols() == 0 || m.rows() == 0) {
        s.basis = Matrix::Zero(m.rows(), 0);
        return s;
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    double thr = (tol == 0.0) ? default_rank_tol(m.rows(), m.cols(), smax) : tol;
    Index r = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > thr) ++r;
    s.basis = svd.matrixU().leftCols(r);
    s.rank_tol = thr;
    return s;
}

Subspace null_space(const Matrix& m, double tol) {
    require_finite(m, "null_space");
    if (tol < 0.0) throw InputError("null_space: negative tolerance");
    Subspace s;
    s.ambient_dim = m.cols();
    if (m.cols() == 0) {
        s.basis = Matrix::Zero(0, 0);
        return s;
    }
    if (m.rows() == 0) {
        s.basis = Matrix::Identity(m.cols(), m.cols());
        return s;
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    double thr = (tol == 0.0) ? default_rank_tol(m.rows(), m.cols(), smax) : tol;
    Index r = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > thr) ++r;
    s.basis = svd.matrixV().rightCols(m.cols() - r);
    s.rank_tol = thr;
    return s;
}

Subspace intersect(const Subspace& s1, const Subspace& s2) {
    if (s1.ambient_dim != s2.ambient_dim)
        throw InputError("intersect: ambient dimension mismatch");
    const Index n = s1.ambient_dim;
    if (s1.dim() == 0 || s2.dim() == 0) return Subspace::zero(n);
    Matrix stacked(2 * n, n);
    stacked.topRows(n) = Matrix::Identity(n, n) - s1.projector();
    stacked.bottomRows(n) = Matrix::Identity(n, n) - s2.projector();
    return null_space(stacked);
}

Subspace join(const Subspace& s1, const Subspace& s2) {
    if (s1.ambient_dim != s2.ambient_dim)
        throw InputError("join: ambient dimension mismatch");
    Matrix both(s1.ambient_dim, s1.dim() + s2.dim());
    both.leftCols(s1.dim()) = s1.basis;
    both.rightCols(s2.dim()) = s2.basis;
    return column_space(both);
}

double largest_principal_angle(const Subspace& s1, const Subspace& s2) {
    if (s1.ambient_dim != s2.ambient_dim)
        throw InputError("principal angle: ambient dimension mismatch");
    if (s1.dim() != s2.dim()) return M_PI / 2.0;
    if (s1.dim() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(Matrix(s1.basis.adjoint() * s2.basis));
    double c = svd.singularValues().minCoeff();
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

bool subspace_equal(const Subspace& s1, const Subspace& s2, double angle_tol) {
    if (s1.ambient_dim != s2.ambient_dim) return false;
    if (s1.dim() != s2.dim()) return false;
    return largest_principal_angle(s1, s2) <= angle_tol;
}

Inertia hermitian_inertia(const Matrix& m, double tol) {
    require_finite(m, "hermitian_inertia");
    if (m.rows() != m.cols()) throw InputError("hermitian_inertia: matrix not square");
    if (hermiticity_defect(m) > 1e-10)
        throw InputError("hermitian_inertia: matrix not Hermitian to tolerance");
    Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    const RealVector& ev = es.eigenvalues();
    double emax = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
    double thr = (tol == 0.0) ? default_rank_tol(m.rows(), m.cols(), emax) : tol;
    Inertia in;
    in.tol = thr;
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > thr)
            ++in.n_plus;
        else if (ev(i) < -thr)
            ++in.n_minus;
        else
            ++in.n_zero;
    }
    return in;
}

bool is_invertible(const Matrix& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    if (m.rows() == 0) return true;
    Eigen::JacobiSVD<Matrix> svd(m);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    return smax > 0.0 && smin > rel_tol * smax;
}

double condition_number(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 1.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

Matrix imaginary_part(const Matrix& m) {
    return (m - m.adjoint()) / Complex(0.0, 2.0);
}

double min_eigenvalue_hermitian(const Matrix& m) {
    if (m.rows() == 0) return 0.0;
    Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace cansys
