#pragma once

#include "cansys/boundary_triplet.hpp"
#include "cansys/linear_relation.hpp"

#include <random>

namespace cansys::testing {

using Rng = std::mt19937_64;

inline Matrix random_matrix(Index rows, Index cols, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

inline Matrix random_unitary(Index n, Rng& rng) {
    Matrix m = random_matrix(n, n, rng);
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
        Complex d = r(j, j);
        q.col(j) *= (d == Complex(0, 0)) ? Complex(1, 0) : d / std::abs(d);
    }
    return q;
}

inline Matrix random_hermitian(Index n, Rng& rng) {
    Matrix m = random_matrix(n, n, rng);
    return 0.5 * (m + m.adjoint());
}

inline Matrix random_psd(Index n, Rng& rng) {
    Matrix m = random_matrix(n, n, rng);
    return m * m.adjoint();
}

/// Random symmetric relation in C^d spanned by (X ; X Hm + Xperp R) columns
/// plus an optional multivalued part orthogonal to the domain.
inline LinearRelation random_symmetric_relation(Index d, Index dom_dim, Index mul_dim,
                                                Rng& rng) {
    if (dom_dim + mul_dim > d) throw InputError("random symmetric relation: dims too large");
    Matrix u = random_unitary(d, rng);
    Matrix x = u.leftCols(dom_dim);
    Matrix xperp = u.rightCols(d - dom_dim);
    Matrix hm = random_hermitian(dom_dim, rng);
    Matrix r = random_matrix(d - dom_dim, dom_dim, rng);
    Matrix vectors = Matrix::Zero(2 * d, dom_dim + mul_dim);
    vectors.block(0, 0, d, dom_dim) = x;
    vectors.block(d, 0, d, dom_dim) = x * hm + xperp * r;
    // multivalued part sits in ran(x)^perp
    vectors.block(d, dom_dim, d, mul_dim) = xperp.leftCols(mul_dim);
    return LinearRelation::from_span(d, d, vectors);
}

/// Square boundary triplet for the adjoint of a symmetric relation, built
/// from orthonormal defect bases at +-i and a random unitary pairing.
inline BoundaryTriplet von_neumann_triplet(const LinearRelation& a, Rng& rng,
                                           bool randomize = true) {
    const Index d = a.dim_source;
    Subspace np = defect(a, Complex(0, 1));
    Subspace nm = defect(a, Complex(0, -1));
    if (np.dim() != nm.dim())
        throw InternalError("von_neumann_triplet: unequal defect dimensions");
    const Index m = np.dim();
    Matrix phi = np.basis;
    Matrix psi = nm.basis;
    if (randomize && m > 0) psi = psi * random_unitary(m, rng);

    Matrix phi_hat(2 * d, m), psi_hat(2 * d, m);
    phi_hat.topRows(d) = phi;
    phi_hat.bottomRows(d) = Complex(0, 1) * phi;
    psi_hat.topRows(d) = psi;
    psi_hat.bottomRows(d) = Complex(0, -1) * psi;

    LinearRelation astar = adjoint(a);
    Matrix basis = astar.graph.basis;
    const Index ma = basis.cols();

    // Decompose each adjoint-basis column along A + defect(+i) + defect(-i).
    Matrix pieces(2 * d, a.dim() + 2 * m);
    pieces.leftCols(a.dim()) = a.graph.basis;
    pieces.middleCols(a.dim(), m) = phi_hat;
    pieces.rightCols(m) = psi_hat;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(pieces);
    Matrix coeff = cod.solve(basis);
    if ((pieces * coeff - basis).norm() > 1e-9 * std::max(1.0, basis.norm()))
        throw InternalError("von_neumann_triplet: Neumann decomposition failed");
    Matrix av = coeff.middleRows(a.dim(), m);  // defect(+i) coordinates
    Matrix bv = coeff.bottomRows(m);           // defect(-i) coordinates

    Matrix g0 = av + bv;
    Matrix g1 = Complex(0, 1) * (av - bv);
    return make_triplet(a, basis, BoundarySpacePair{m, m}, g0, g1);
}

}  // namespace cansys::testing
