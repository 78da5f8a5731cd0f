#pragma once

#include "cansys/canonical_system.hpp"
#include "cansys/spectral.hpp"

#include "generators.hpp"

#include <cmath>

namespace cansys::testing {

inline Matrix dirac_j() {
    Matrix j(2, 2);
    j << 0, -1, 1, 0;
    return j;
}

/// J = [[0,-1],[1,0]], B = 0, Delta = I on [0, length].
inline CanonicalSystem free_dirac(double length = M_PI) {
    CanonicalSystem s;
    s.n = 2;
    s.a = 0.0;
    s.b = length;
    s.J = dirac_j();
    Piece p;
    p.t0 = 0.0;
    p.t1 = length;
    p.b = MatrixPolynomial::zero(2);
    p.delta = MatrixPolynomial::constant(Matrix::Identity(2, 2));
    s.pieces.push_back(p);
    return s;
}

/// Free Dirac truncated at T as a stand-in for [0, infinity).
inline CanonicalSystem free_dirac_truncated(double T = 40.0) {
    CanonicalSystem s = free_dirac(T);
    s.b_kind = EndpointKind::TruncatedSingular;
    s.true_b_infinite = true;
    return s;
}

/// Degenerate-weight system: Delta = diag(1, 0), B = 0 on [0, length].
inline CanonicalSystem degenerate_weight_system(double length = 10.0) {
    CanonicalSystem s = free_dirac(length);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1;
    s.pieces[0].delta = MatrixPolynomial::constant(d);
    return s;
}

/// 3x3 system with signature indices nu+ = 1, nu- = 2 and identity weight.
inline CanonicalSystem mixed_signature_system() {
    CanonicalSystem s;
    s.n = 3;
    s.a = 0.0;
    s.b = 1.0;
    Matrix j = Matrix::Zero(3, 3);
    j(0, 2) = -1;
    j(2, 0) = 1;
    j(1, 1) = Complex(0, 1);
    s.J = j;
    Piece p;
    p.t0 = 0.0;
    p.t1 = 1.0;
    Matrix b0 = Matrix::Zero(3, 3);
    b0(0, 0) = 1;
    b0(1, 1) = -0.5;
    Matrix b1 = Matrix::Zero(3, 3);
    b1(0, 2) = Complex(0.3, 0.1);
    b1(2, 0) = Complex(0.3, -0.1);
    p.b = MatrixPolynomial{{b0, b1}};
    p.delta = MatrixPolynomial::constant(Matrix::Identity(3, 3));
    s.pieces.push_back(p);
    return s;
}

/// Random regular definite system of even dimension n on [0, len]:
/// J unitarily congruent to the standard skew form, random Hermitian
/// polynomial B, weight L L^H with invertible constant term.
inline CanonicalSystem random_definite_system(Index n, double len, Rng& rng) {
    CanonicalSystem s;
    s.n = n;
    s.a = 0.0;
    s.b = len;
    Matrix j = Matrix::Zero(n, n);
    Index h = n / 2;
    j.topRightCorner(h, h) = -Matrix::Identity(h, h);
    j.bottomLeftCorner(h, h) = Matrix::Identity(h, h);
    if (n % 2 == 1) j(n - 1 - h, n - 1 - h) = Complex(0, 1);
    Matrix u = random_unitary(n, rng);
    s.J = u * j * u.adjoint();
    s.J = 0.5 * (s.J - s.J.adjoint());  // keep skew-Hermitian exactly

    Piece p;
    p.t0 = 0.0;
    p.t1 = len;
    Matrix b0 = random_hermitian(n, rng);
    Matrix b1 = random_hermitian(n, rng);
    p.b = MatrixPolynomial{{b0, 0.3 * b1}};
    Matrix l0 = random_matrix(n, n, rng) + 2.0 * Matrix::Identity(n, n);
    Matrix l1 = 0.2 * random_matrix(n, n, rng);
    // Delta(t) = (l0 + t l1)(l0 + t l1)^H expanded by degree
    Matrix d0 = l0 * l0.adjoint();
    Matrix d1 = l0 * l1.adjoint() + l1 * l0.adjoint();
    Matrix d2 = l1 * l1.adjoint();
    p.delta = MatrixPolynomial{{d0, d1, d2}};
    s.pieces.push_back(p);
    return s;
}

/// Random boundary condition over a Hamiltonian system, optionally built
/// from a twisted pair of known class. kind: 0 random, 1 self-adjoint,
/// 2 dissipative, 3 accumulative.
inline BoundaryCondition random_condition(const CanonicalSystem& s, int kind, Rng& rng) {
    const Index n = s.n;
    BoundaryCondition bc;
    if (kind == 0) {
        bc.Ca = random_matrix(n, n, rng);
        bc.Cb = random_matrix(n, n, rng);
        return bc;
    }
    Matrix x = random_matrix(n, n, rng);
    Matrix h = random_hermitian(n, rng);
    Matrix k = random_psd(n, rng);
    Matrix c0, c1;
    switch (kind) {
        case 1: c0 = x * h; break;
        case 2: c0 = x * (h + Complex(0, 1) * k); break;
        default: c0 = x * (h - Complex(0, 1) * k); break;
    }
    c1 = -x;
    SignatureData sig = signature_of(s.J);
    if (sig.dim_h_hat != 0) throw InputError("random_condition: Hamiltonian systems only");
    Index dh = sig.dim_h;
    Matrix ca_blocks(n, n), cb_blocks(n, n);
    ca_blocks.leftCols(dh) = c0.leftCols(dh);
    ca_blocks.rightCols(dh) = c1.leftCols(dh);
    cb_blocks.leftCols(dh) = c0.rightCols(dh);
    cb_blocks.rightCols(dh) = -c1.rightCols(dh);
    bc.Ca = ca_blocks * sig.U.adjoint();
    bc.Cb = cb_blocks * sig.U.adjoint();
    return bc;
}

/// Closed-form fundamental matrix of the free Dirac system.
inline Matrix dirac_closed_form(double t, Complex lambda) {
    Matrix y(2, 2);
    Complex c = std::cos(lambda * t), s = std::sin(lambda * t);
    y << c, s, -s, c;
    return y;
}

/// Closed-form Weyl function of the free Dirac system on [0, pi].
inline Matrix dirac_weyl_closed_form(Complex lambda) {
    Complex sp = std::sin(lambda * M_PI), cp = std::cos(lambda * M_PI);
    Matrix m(2, 2);
    m << -cp, 1, 1, -cp;
    return m / sp;
}

}  // namespace cansys::testing
