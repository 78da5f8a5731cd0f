#pragma once

#include "cansys/boundary_triplet.hpp"

namespace cansys {

/// A possibly multivalued boundary map from pairs (f, f') in the model
/// space to boundary values (h0, h1), stored as a linear relation whose
/// graph lives in C^(2d) (+) C^(h0+h1).
struct BoundaryRelation {
    LinearRelation base;   // symmetric relation A in C^d
    LinearRelation gamma;  // relation from C^(2d) to C^(h0+h1)
    BoundarySpacePair spaces;

    Index model_dim() const { return base.dim_source; }
};

BoundaryRelation make_boundary_relation(LinearRelation base, LinearRelation gamma,
                                        BoundarySpacePair spaces);

struct BoundaryRelationReport {
    bool valid = false;
    bool domain_is_adjoint = false;
    bool kernel_is_base = false;
    double green_residual = 0.0;
    bool dimension_identity = false;
    std::string failure;
};

/// Sufficient verification: dom Gamma = A*, ker Gamma = A, the Green
/// identity on graph basis pairs, and h0 + h1 = n+ + n- + 2 dim(mul Gamma).
BoundaryRelationReport verify_boundary_relation(const BoundaryRelation& br);

struct MulStructure {
    LinearRelation mul;  // from H0 to H1
    Subspace Kp;         // P1 dom(mul Gamma), inside C^h1
    Subspace Kpp;        // mul(mul Gamma), inside C^h1
    int n_gamma = 0;
};

MulStructure multivalued_structure(const BoundaryRelation& br);

/// Structural decomposition of a valid boundary relation: the orthogonal
/// pieces K1, K' and K'' of H1, the coupling operators (F2, F1, F') in the
/// chosen orthonormal bases, and the inner boundary triplet on K0 (+) K1.
struct GammaDecomposition {
    Subspace K1;
    Subspace Kp;
    Subspace Kpp;
    Matrix K0_basis;  // h0 x (h2 + dim K1), orthonormal
    Matrix F2;        // h2 x dim K'
    Matrix F1;        // dim K1 x dim K'
    Matrix Fp;        // dim K' x dim K'
    BoundaryTriplet triplet;
};

GammaDecomposition decompose(const BoundaryRelation& br);

/// Builds the boundary relation generated by a triplet and coupling data.
/// Coordinates: H1 = [K1 | K' | K''] (K1 = the triplet's H1 coordinates),
/// H0 = [H2 | H1]. Preconditions: t valid and
/// Fp - Fp^H + i F2^H F2 = 0 to 1e-10.
BoundaryRelation assemble(const BoundaryTriplet& t, const Matrix& F2, const Matrix& F1,
                          const Matrix& Fp, Index dim_kpp);

/// Reassembles a decomposition in the original H0/H1 coordinates; used for
/// the round-trip identity assemble(decompose(br)) = br.
BoundaryRelation reassemble(const LinearRelation& base, const GammaDecomposition& dec,
                            const BoundarySpacePair& spaces);

struct WeylFamilySample {
    Complex lambda;
    Matrix m_direct;       // operator part in original coordinates
    Matrix m_block;        // same map through the decomposition route
    double route_residual = 0.0;
    Subspace mul_part;     // multivalued summand of the family (= K'')
    Matrix n_block;        // H2-column block (upper) or H2-row block (lower)
    Matrix m_square;       // the H1 x H1 Nevanlinna part
    Matrix calM;           // h0 x h0 extension of the family
    Matrix gamma_plus;     // d x h0; only filled when K'' = 0 and Im lambda > 0
};

/// Weyl family at nonreal lambda, computed directly from the graph and
/// independently through the decomposition block formula; both must agree
/// to 1e-9. When mul(mul Gamma) is nontrivial the family is a relation and
/// the multivalued summand is recorded rather than projected away silently.
WeylFamilySample weyl_family(const BoundaryRelation& br, Complex lambda);

}  // namespace cansys
