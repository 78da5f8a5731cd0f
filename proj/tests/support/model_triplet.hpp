#pragma once

#include "cansys/boundary_triplet.hpp"

namespace cansys::testing {

/// A = span{((1,0),(0,1))} in C^2; A* = {((g1,g2),(g2,g3))}.
inline LinearRelation model_base() {
    Matrix v = Matrix::Zero(4, 1);
    v(0, 0) = 1;
    v(3, 0) = 1;
    return LinearRelation::from_span(2, 2, v);
}

/// The triplet with Gamma0 f = f2 and Gamma1 f = f3 - f1 in the ambient
/// coordinates (f1, f2, f2, f3) of A*; its Weyl function is lambda - 1/lambda.
inline BoundaryTriplet model_triplet() {
    LinearRelation a = model_base();
    Matrix basis = adjoint(a).graph.basis;  // 4 x 3
    Matrix g0 = basis.row(1);
    Matrix g1 = basis.row(3) - basis.row(0);
    return make_triplet(a, basis, BoundarySpacePair{1, 1}, g0, g1);
}

}  // namespace cansys::testing
