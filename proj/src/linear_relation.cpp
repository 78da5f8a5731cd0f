#include "cansys/linear_relation.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace cansys {

LinearRelation LinearRelation::from_span(Index d0, Index d1, const Matrix& vectors,
                                         double tol) {
    if (vectors.rows() != d0 + d1)
        throw InputError("LinearRelation::from_span: vector length != d0 + d1");
    LinearRelation t;
    t.dim_source = d0;
    t.dim_target = d1;
    t.graph = column_space(vectors, tol);
    return t;
}

LinearRelation LinearRelation::graph_of(const Matrix& op) {
    Matrix v(op.cols() + op.rows(), op.cols());
    v.topRows(op.cols()) = Matrix::Identity(op.cols(), op.cols());
    v.bottomRows(op.rows()) = op;
    return from_span(op.cols(), op.rows(), v);
}

LinearRelation LinearRelation::zero(Index d0, Index d1) {
    LinearRelation t;
    t.dim_source = d0;
    t.dim_target = d1;
    t.graph = Subspace::zero(d0 + d1);
    return t;
}

bool relations_equal(const LinearRelation& a, const LinearRelation& b, double angle_tol) {
    if (a.dim_source != b.dim_source || a.dim_target != b.dim_target) return false;
    return subspace_equal(a.graph, b.graph, angle_tol);
}

RelationParts parts(const LinearRelation& t) {
    RelationParts p;
    p.dom = column_space(t.source_block());
    p.ran = column_space(t.target_block());

    // ker: graph vectors with vanishing target component, projected to source.
    Subspace src_axis = Subspace::zero(t.dim_source + t.dim_target);
    {
        Matrix e = Matrix::Zero(t.dim_source + t.dim_target, t.dim_source);
        e.topRows(t.dim_source) = Matrix::Identity(t.dim_source, t.dim_source);
        src_axis = Subspace::span_of(e);
    }
    Subspace in_src = intersect(t.graph, src_axis);
    p.ker = column_space(in_src.basis.topRows(t.dim_source));

    Matrix e2 = Matrix::Zero(t.dim_source + t.dim_target, t.dim_target);
    e2.bottomRows(t.dim_target) = Matrix::Identity(t.dim_target, t.dim_target);
    Subspace in_tgt = intersect(t.graph, Subspace::span_of(e2));
    p.mul = column_space(in_tgt.basis.bottomRows(t.dim_target));
    return p;
}

LinearRelation adjoint(const LinearRelation& t) {
    if (t.dim_source != t.dim_target)
        throw InputError("adjoint: relation must live in one space");
    const Index d = t.dim_source;
    const Index m = t.dim();
    // (g,g') belongs to t* iff for every graph column (a;b):  b^H g - a^H g' = 0.
    Matrix pairing(m, 2 * d);
    pairing.leftCols(d) = t.target_block().adjoint();
    pairing.rightCols(d) = -t.source_block().adjoint();
    LinearRelation r;
    r.dim_source = d;
    r.dim_target = d;
    r.graph = null_space(pairing);
    return r;
}

double symmetry_defect(const LinearRelation& t) {
    Matrix a = t.source_block();
    Matrix b = t.target_block();
    Matrix form = a.adjoint() * b - b.adjoint() * a;
    return form.cwiseAbs().maxCoeff();
}

bool is_symmetric(const LinearRelation& t, double tol) {
    if (t.dim_source != t.dim_target) return false;
    if (t.dim() == 0) return true;
    return symmetry_defect(t) <= tol;
}

Subspace defect(const LinearRelation& t, Complex lambda) {
    if (t.dim_source != t.dim_target)
        throw InputError("defect: relation must live in one space");
    const Index d = t.dim_source;

    // Route 1: membership condition for t*, i.e. (B - conj(lambda) A)^H f = 0.
    Matrix a = t.source_block();
    Matrix b = t.target_block();
    Matrix m1 = (b - std::conj(lambda) * a).adjoint();
    Subspace s1 = (t.dim() == 0) ? Subspace::full(d) : null_space(m1);

    // Route 2: orthogonal complement of ran(t - conj(lambda)).
    Subspace ran_shift =
        (t.dim() == 0) ? Subspace::zero(d) : column_space(Matrix(b - std::conj(lambda) * a));
    Subspace s2 = ran_shift.orthogonal_complement();

    if (!subspace_equal(s1, s2, 1e-8))
        throw InternalError("defect: the two defect computations disagree");
    return s1;
}

DeficiencyData deficiency_indices(const LinearRelation& t) {
    if (!is_symmetric(t))
        throw InputError("deficiency_indices: relation is not symmetric (pairing residual " +
                         std::to_string(symmetry_defect(t)) + ")");
    DeficiencyData d;
    d.defect_basis_plus = defect(t, Complex(0.0, 1.0));
    d.defect_basis_minus = defect(t, Complex(0.0, -1.0));
    d.n_plus = static_cast<int>(d.defect_basis_plus.dim());
    d.n_minus = static_cast<int>(d.defect_basis_minus.dim());
    LinearRelation tstar = adjoint(t);
    if (tstar.dim() - t.dim() != d.n_plus + d.n_minus)
        throw InternalError("deficiency_indices: defect dimensions violate dim t* - dim t");
    return d;
}

const char* to_string(RelationClass c) {
    switch (c) {
        case RelationClass::Symmetric: return "symmetric";
        case RelationClass::SelfAdjoint: return "self-adjoint";
        case RelationClass::MaximalDissipative: return "maximal-dissipative";
        case RelationClass::MaximalAccumulative: return "maximal-accumulative";
        case RelationClass::MaximalSymmetric: return "maximal-symmetric";
        case RelationClass::None: return "none";
    }
    return "none";
}

RelationClass classify(const LinearRelation& t, double rel_tol) {
    if (t.dim_source != t.dim_target)
        throw InputError("classify: relation must live in one space");
    const Index d = t.dim_source;

    // Hermitian form Im(f', f) in the orthonormal graph parametrization.
    Matrix a = t.source_block();
    Matrix b = t.target_block();
    Matrix form = imaginary_part(Matrix(a.adjoint() * b));
    double thr = rel_tol * form.norm();

    bool dissip = t.dim() == 0 || min_eigenvalue_hermitian(form) >= -thr;
    bool accum = t.dim() == 0 || min_eigenvalue_hermitian(Matrix(-form)) >= -thr;
    bool symmetric = dissip && accum;
    bool maximal = (t.dim() == d);

    if (symmetric || maximal) {
        LinearRelation tstar = adjoint(t);
        if (relations_equal(t, tstar)) return RelationClass::SelfAdjoint;
        if (symmetric && maximal) return RelationClass::MaximalSymmetric;
    }
    if (maximal && dissip) return RelationClass::MaximalDissipative;
    if (maximal && accum) return RelationClass::MaximalAccumulative;
    if (symmetric) return RelationClass::Symmetric;
    return RelationClass::None;
}

}  // namespace cansys
