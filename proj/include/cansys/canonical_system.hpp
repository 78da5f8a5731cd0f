#pragma once

#include "cansys/matrix.hpp"
#include "cansys/ode.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cansys {

/// Matrix-valued polynomial in t: sum_k coeffs[k] t^k.
struct MatrixPolynomial {
    std::vector<Matrix> coeffs;

    Index rows() const { return coeffs.empty() ? 0 : coeffs.front().rows(); }
    Index cols() const { return coeffs.empty() ? 0 : coeffs.front().cols(); }
    Matrix eval(double t) const;

    static MatrixPolynomial constant(Matrix m) { return MatrixPolynomial{{std::move(m)}}; }
    static MatrixPolynomial zero(Index n) {
        return MatrixPolynomial{{Matrix::Zero(n, n)}};
    }
};

struct Piece {
    double t0 = 0.0;
    double t1 = 0.0;
    MatrixPolynomial b;
    MatrixPolynomial delta;
};

enum class EndpointKind { Regular, TruncatedSingular };

struct Tolerances {
    double ode_rel = 1e-10;
    double ode_abs = 1e-12;
    double rank_tol = 0.0;        // 0: automatic numerical-rank rule
    double green_tol = 1e-10;
    double invariance_tol = 1e-8;
    int validation_grid = 64;     // points per piece
};

/// First-order system J y' - B(t) y = Delta(t) f on [a, b] with a regular
/// left endpoint. The right endpoint is either genuinely regular or a
/// user-chosen truncation of a singular problem; in the latter case every
/// quantity computed at b approximates a limit and is reported as such.
struct CanonicalSystem {
    Index n = 0;
    double a = 0.0;
    double b = 0.0;
    EndpointKind b_kind = EndpointKind::Regular;
    bool true_b_infinite = false;
    double true_b = 0.0;  // meaningful when truncated and not infinite
    Matrix J;
    std::vector<Piece> pieces;
    Tolerances tol;

    Matrix coeff_b(double t) const;
    Matrix coeff_delta(double t) const;
    Matrix j_inverse() const { return -J; }
    /// Right-hand side of the homogeneous system at spectral parameter lambda.
    Matrix system_matrix(double t, Complex lambda) const;
};

struct ValidationReport {
    bool valid = false;
    double j_skew_defect = 0.0;      // |J + J^H|
    double j_unitary_defect = 0.0;   // |J J^H - I|
    double b_hermiticity = 0.0;      // worst relative defect over the grid
    double delta_min_eigenvalue = 0.0;
    bool pieces_tile = false;
    std::string failure;
    std::vector<std::string> notes;
};

ValidationReport validate_system(const CanonicalSystem& s);

/// Requires validate_system to pass; throws InputError otherwise.
void require_valid(const CanonicalSystem& s);

/// Signature normal form of J: a unitary U with U^H J U equal to the block
/// matrix [[0, 0, -I_H], [0, i delta I_Hhat, 0], [I_H, 0, 0]].
struct SignatureData {
    int nu_plus = 0;       // dim ker(iJ - I)
    int nu_minus = 0;      // dim ker(iJ + I)
    int delta = 0;         // sign(nu_minus - nu_plus)
    Index dim_h = 0;       // min(nu_plus, nu_minus)
    Index dim_h_hat = 0;   // |nu_minus - nu_plus|
    bool hamiltonian = false;
    Matrix U;
    double normal_form_residual = 0.0;

    Matrix normal_form() const;
};

SignatureData signature_decompose(const CanonicalSystem& s);
/// Same computation on a bare signature operator (J^* = J^{-1} = -J).
SignatureData signature_of(const Matrix& j);

struct FundamentalSolution {
    Complex lambda;
    std::vector<double> grid;
    std::vector<Matrix> values;  // Y(grid[k], lambda), Y(a) = I
    OdeStats stats;

    const Matrix& at_b() const { return values.back(); }
};

/// Fundamental matrix solution of J Y' - B Y = lambda Delta Y with Y(a) = I,
/// sampled on the given grid (default: piece boundaries plus a uniform
/// refinement). Piece boundaries are always integration nodes.
FundamentalSolution fundamental_solution(const CanonicalSystem& s, Complex lambda,
                                         std::vector<double> sample_ts = {});

/// Y(t_k, lambda) at the requested (ascending) sample points.
std::vector<Matrix> solve_at(const CanonicalSystem& s, Complex lambda,
                             const std::vector<double>& sample_ts);

/// Y(b, lambda).
Matrix solution_at_b(const CanonicalSystem& s, Complex lambda);

/// Worst |Y(t, conj lambda)^H J Y(t, lambda) - J| over a shared sample grid.
double j_invariance_residual(const CanonicalSystem& s, Complex lambda,
                             int samples_per_piece = 16);

/// Default dense sample grid: piece boundaries plus `per_piece` interior
/// points per piece, ascending.
std::vector<double> dense_grid(const CanonicalSystem& s, int per_piece);

}  // namespace cansys
