#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace cansys {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thrown when an argument violates a documented precondition.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an internal consistency check fails (a bug, not bad input).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Thrown when an iterative computation cannot reach the requested tolerance.
class ToleranceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a verification or classification requirement fails on
/// otherwise well-formed input.
class VerificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool all_finite(const Matrix& m);
void require_finite(const Matrix& m, const char* what);

inline Matrix adjoint(const Matrix& m) { return m.adjoint(); }

/// Frobenius-scaled relative deviation of m from Hermitian symmetry.
double hermiticity_defect(const Matrix& m);

/// An orthonormal-basis representation of a subspace of C^ambient_dim.
/// basis has orthonormal columns; a zero-dimensional subspace has 0 columns.
struct Subspace {
    Index ambient_dim = 0;
    Matrix basis;       // ambient_dim x dim, orthonormal columns
    double rank_tol = 0.0;

    Index dim() const { return basis.cols(); }

    static Subspace zero(Index ambient);
    static Subspace full(Index ambient);
    /// Subspace spanned by the columns of m (orthonormalized).
    static Subspace span_of(const Matrix& m, double tol = 0.0);

    /// Orthogonal projector basis*basis^H.
    Matrix projector() const;
    /// Distance of v from the subspace, relative to |v|.
    double distance(const Vector& v) const;
    bool contains(const Vector& v, double tol = 1e-10) const;
    bool contains(const Subspace& other, double tol = 1e-10) const;

    Subspace orthogonal_complement() const;
};

/// Numerical-rank tolerance: eps * max(rows, cols) * sigma_max when tol == 0.
double default_rank_tol(Index rows, Index cols, double sigma_max);

/// Orthonormal basis of the column space of m; rank decided against tol
/// (0 means the automatic rule above).
Subspace column_space(const Matrix& m, double tol = 0.0);

/// Orthonormal basis of the kernel of m.
Subspace null_space(const Matrix& m, double tol = 0.0);

/// Intersection of two subspaces of the same ambient space, computed from
/// the joint kernel of the two complementary orthoprojectors.
Subspace intersect(const Subspace& s1, const Subspace& s2);

/// Span of the union of both bases.
Subspace join(const Subspace& s1, const Subspace& s2);

/// Largest principal angle between subspaces of equal dimension; returns
/// pi/2 if dimensions differ, 0 for two zero-dimensional subspaces.
double largest_principal_angle(const Subspace& s1, const Subspace& s2);

bool subspace_equal(const Subspace& s1, const Subspace& s2, double angle_tol = 1e-8);

/// Eigenvalue sign counts of a Hermitian matrix.
struct Inertia {
    int n_plus = 0;
    int n_minus = 0;
    int n_zero = 0;
    double tol = 0.0;
};

/// Inertia of a (numerically) Hermitian matrix. The input must satisfy
/// |m - m^H| <= 1e-10 |m|; it is symmetrized before the eigensolve.
Inertia hermitian_inertia(const Matrix& m, double tol = 0.0);

/// Square and sigma_min > rel_tol * sigma_max.
bool is_invertible(const Matrix& m, double rel_tol = 1e-10);

/// sigma_max / sigma_min (infinity when singular to working precision).
double condition_number(const Matrix& m);

/// Hermitian part of (m - m^H)/(2i).
Matrix imaginary_part(const Matrix& m);

/// Smallest eigenvalue of the Hermitian part of m (input symmetrized).
double min_eigenvalue_hermitian(const Matrix& m);

}  // namespace cansys
