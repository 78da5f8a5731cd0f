#pragma once

#include "cansys/matrix.hpp"

namespace cansys {

/// A (possibly multivalued) linear map from C^dim_source to C^dim_target,
/// stored as the subspace of source (+) target spanned by its graph.
/// A closed operator is the special case with trivial multivalued part.
struct LinearRelation {
    Index dim_source = 0;
    Index dim_target = 0;
    Subspace graph;  // ambient dim_source + dim_target

    Index dim() const { return graph.dim(); }

    /// Rows of the graph basis belonging to the source / target components.
    Matrix source_block() const { return graph.basis.topRows(dim_source); }
    Matrix target_block() const { return graph.basis.bottomRows(dim_target); }

    /// Relation spanned by the columns of `vectors` in C^(d0+d1).
    static LinearRelation from_span(Index d0, Index d1, const Matrix& vectors,
                                    double tol = 0.0);
    /// Graph of the everywhere-defined operator f -> op f.
    static LinearRelation graph_of(const Matrix& op);
    /// The zero relation {(0,0)}.
    static LinearRelation zero(Index d0, Index d1);
};

bool relations_equal(const LinearRelation& a, const LinearRelation& b,
                     double angle_tol = 1e-8);

struct RelationParts {
    Subspace dom;  // in the source space
    Subspace ran;  // in the target space
    Subspace ker;  // in the source space
    Subspace mul;  // in the target space
};

RelationParts parts(const LinearRelation& t);

/// Adjoint relation: all (g, g') with (f', g) = (f, g') for every (f, f') in t.
/// Requires dim_source == dim_target.
LinearRelation adjoint(const LinearRelation& t);

/// Largest residual of the symmetry pairing (f',g) - (f,g') over graph basis
/// pairs; a relation is symmetric when this is ~0.
double symmetry_defect(const LinearRelation& t);
bool is_symmetric(const LinearRelation& t, double tol = 1e-10);

/// Defect subspace {f : (f, lambda f) in t*}. Cross-checked internally
/// against the orthogonal complement of ran(t - conj(lambda)).
Subspace defect(const LinearRelation& t, Complex lambda);

struct DeficiencyData {
    int n_plus = 0;
    int n_minus = 0;
    Subspace defect_basis_plus;
    Subspace defect_basis_minus;
};

/// Deficiency indices of a symmetric relation (defect dimensions at +-i).
/// Also checks dim t* - dim t = n+ + n-.
DeficiencyData deficiency_indices(const LinearRelation& t);

enum class RelationClass {
    Symmetric,
    SelfAdjoint,
    MaximalDissipative,
    MaximalAccumulative,
    MaximalSymmetric,
    None,
};

const char* to_string(RelationClass c);

/// Strongest applicable class. Dissipativity is decided by the inertia of
/// the Hermitian form Im(f', f) assembled on the graph basis; maximality of
/// dissipative/accumulative relations by dim t = d; self-adjointness by
/// subspace equality t = t*.
RelationClass classify(const LinearRelation& t, double rel_tol = 1e-10);

}  // namespace cansys
