#pragma once

#include "cansys/linear_relation.hpp"
#include "cansys/operator_pair.hpp"

#include <string>

namespace cansys {

/// Boundary maps (G0, G1) for the adjoint of a symmetric relation, given in
/// the coordinates of one fixed orthonormal basis of the adjoint's graph.
struct BoundaryTriplet {
    LinearRelation base;    // the symmetric relation A, in C^d
    Matrix adjoint_basis;   // 2d x m, orthonormal columns spanning A*
    BoundarySpacePair spaces;
    Matrix G0;              // h0 x m
    Matrix G1;              // h1 x m

    Index model_dim() const { return base.dim_source; }
    Index adjoint_dim() const { return adjoint_basis.cols(); }
};

/// Builds the triplet, checking shape consistency and that adjoint_basis
/// spans the adjoint of base.
BoundaryTriplet make_triplet(LinearRelation base, Matrix adjoint_basis,
                             BoundarySpacePair spaces, Matrix G0, Matrix G1);

struct TripletReport {
    bool valid = false;
    double green_residual = 0.0;
    Index gamma_rank = 0;
    bool surjective = false;
    bool kernel_is_base = false;
    bool dims_ok = false;
    std::string failure;  // first failed clause, empty when valid
};

/// Checks the Green identity on all adjoint-basis pairs, surjectivity of
/// (G0 ; G1), ker G0 ∩ ker G1 = A, and the dimension identities
/// h1 = n-(A) <= n+(A) = h0.
TripletReport verify_triplet(const BoundaryTriplet& t);

/// The restriction of A* by the abstract boundary condition
/// C0 G0 f + C1 G1 f = 0. The result sits between A and A*; its relation
/// class is cross-checked against the class of the pair.
LinearRelation extension_from_pair(const BoundaryTriplet& t, const OperatorPair& p);

struct WeylSample {
    Complex lambda;
    Matrix m;      // h1 x h0 for Im lambda > 0, h0 x h1 for Im lambda < 0
    Matrix gamma;  // d x h0 (upper half-plane) or d x h1 (lower)
};

/// Weyl function and gamma-field sample at nonreal lambda. In the upper
/// half-plane M solves M (G0 on the defect basis) = (G1 on the defect
/// basis); in the lower half-plane the P1/P2-twisted variant is used, so
/// the conjugation symmetry M(conj lambda) = M(lambda)^* stays a genuine
/// cross-check rather than a definition.
WeylSample weyl(const BoundaryTriplet& t, Complex lambda);

/// Coordinates (in adjoint_basis) of the defect elements {(f, lambda f)}:
/// returns the d x r defect basis and the m x r coordinate matrix.
struct DefectCoordinates {
    Matrix defect_basis;  // d x r
    Matrix coords;        // m x r
};
DefectCoordinates defect_in_adjoint_coordinates(const BoundaryTriplet& t, Complex lambda);

}  // namespace cansys
