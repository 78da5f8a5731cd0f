#include "cansys/boundary_triplet.hpp"

#include <Eigen/LU>

#include <cmath>

namespace cansys {

BoundaryTriplet make_triplet(LinearRelation base, Matrix adjoint_basis,
                             BoundarySpacePair spaces, Matrix G0, Matrix G1) {
    const Index d = base.dim_source;
    if (base.dim_target != d) throw InputError("make_triplet: base must live in one space");
    if (adjoint_basis.rows() != 2 * d)
        throw InputError("make_triplet: adjoint basis has wrong ambient dimension");
    LinearRelation astar = adjoint(base);
    Subspace given = Subspace::span_of(adjoint_basis);
    if (!subspace_equal(given, astar.graph))
        throw InputError("make_triplet: adjoint_basis does not span the adjoint of base");
    if (G0.cols() != adjoint_basis.cols() || G1.cols() != adjoint_basis.cols())
        throw InputError("make_triplet: boundary maps must act on adjoint coordinates");
    if (G0.rows() != spaces.h0 || G1.rows() != spaces.h1)
        throw InputError("make_triplet: boundary map shapes do not match the spaces");
    BoundaryTriplet t;
    t.base = std::move(base);
    t.adjoint_basis = std::move(adjoint_basis);
    t.spaces = spaces;
    t.G0 = std::move(G0);
    t.G1 = std::move(G1);
    return t;
}

// Green pairing (f',g) - (f,g') between adjoint-basis columns j and k.
static Matrix green_lhs(const BoundaryTriplet& t) {
    const Index d = t.model_dim();
    Matrix f = t.adjoint_basis.topRows(d);
    Matrix fp = t.adjoint_basis.bottomRows(d);
    return f.adjoint() * fp - fp.adjoint() * f;  // entry (k,j) pairs column j with column k
}

static Matrix green_rhs(const BoundaryTriplet& t) {
    const auto& s = t.spaces;
    Matrix p1g0 = t.G0.bottomRows(s.h1);
    Matrix p2g0 = t.G0.topRows(s.h2());
    // (G1 u_j, G0 u_k) - (G0 u_j, G1 u_k) + i (P2 G0 u_j, P2 G0 u_k)
    return (p1g0.adjoint() * t.G1) - (t.G1.adjoint() * p1g0) +
           Complex(0, 1) * (p2g0.adjoint() * p2g0);
}

TripletReport verify_triplet(const BoundaryTriplet& t) {
    TripletReport r;
    if (!is_symmetric(t.base)) {
        r.failure = "base relation is not symmetric";
        return r;
    }

    r.green_residual = (green_lhs(t) - green_rhs(t)).cwiseAbs().maxCoeff();
    if (r.green_residual > 1e-10) {
        r.failure = "Green identity residual above tolerance";
        return r;
    }

    Matrix stacked(t.spaces.h0 + t.spaces.h1, t.adjoint_dim());
    stacked.topRows(t.spaces.h0) = t.G0;
    stacked.bottomRows(t.spaces.h1) = t.G1;
    r.gamma_rank = column_space(Matrix(stacked.adjoint())).dim();
    r.surjective = (r.gamma_rank == t.spaces.h0 + t.spaces.h1);
    if (!r.surjective) {
        r.failure = "boundary map is not surjective";
        return r;
    }

    Subspace kernel_coords = null_space(stacked);
    Subspace kernel = Subspace::span_of(Matrix(t.adjoint_basis * kernel_coords.basis));
    r.kernel_is_base = subspace_equal(kernel, t.base.graph);
    if (!r.kernel_is_base) {
        r.failure = "ker G0 ∩ ker G1 differs from the base relation";
        return r;
    }

    DeficiencyData dd = deficiency_indices(t.base);
    r.dims_ok = (t.spaces.h1 == dd.n_minus && t.spaces.h0 == dd.n_plus &&
                 dd.n_minus <= dd.n_plus);
    if (!r.dims_ok) {
        r.failure = "boundary space dimensions differ from the deficiency indices";
        return r;
    }

    r.valid = true;
    return r;
}

LinearRelation extension_from_pair(const BoundaryTriplet& t, const OperatorPair& p) {
    if (!(p.spaces == t.spaces))
        throw InputError("extension_from_pair: pair lives on different boundary spaces");
    if (!is_admissible(p)) throw InputError("extension_from_pair: pair is not admissible");
    Matrix cond = p.C0 * t.G0 + p.C1 * t.G1;  // k x m
    Subspace coords = null_space(cond);
    LinearRelation ext = LinearRelation::from_span(
        t.model_dim(), t.model_dim(), Matrix(t.adjoint_basis * coords.basis));
    if (!ext.graph.contains(t.base.graph))
        throw InternalError("extension_from_pair: extension does not contain the base");

    RelationClass rc = classify(ext);
    PairClass pc = classify_pair(p);
    auto matches = [&]() {
        switch (pc) {
            case PairClass::Self: return rc == RelationClass::SelfAdjoint;
            case PairClass::Dis:
                return rc == RelationClass::MaximalDissipative ||
                       rc == RelationClass::SelfAdjoint;
            case PairClass::Ac:
                return rc == RelationClass::MaximalAccumulative ||
                       rc == RelationClass::SelfAdjoint;
            case PairClass::Sym:
                return rc == RelationClass::MaximalSymmetric ||
                       rc == RelationClass::SelfAdjoint;
            case PairClass::None:
                return rc != RelationClass::SelfAdjoint &&
                       rc != RelationClass::MaximalDissipative &&
                       rc != RelationClass::MaximalAccumulative &&
                       rc != RelationClass::MaximalSymmetric;
        }
        return false;
    };
    if (!matches())
        throw InternalError(std::string("extension_from_pair: pair class ") + to_string(pc) +
                            " does not match extension class " + to_string(rc));
    return ext;
}

DefectCoordinates defect_in_adjoint_coordinates(const BoundaryTriplet& t, Complex lambda) {
    const Index d = t.model_dim();
    Subspace nl = defect(t.base, lambda);
    DefectCoordinates dc;
    dc.defect_basis = nl.basis;
    Matrix lifted(2 * d, nl.dim());
    lifted.topRows(d) = nl.basis;
    lifted.bottomRows(d) = lambda * nl.basis;
    dc.coords = t.adjoint_basis.adjoint() * lifted;
    double res = (t.adjoint_basis * dc.coords - lifted).norm();
    if (res > 1e-9 * std::max(1.0, lifted.norm()))
        throw InternalError("defect elements do not lie in the adjoint span");
    return dc;
}

WeylSample weyl(const BoundaryTriplet& t, Complex lambda) {
    if (lambda.imag() == 0.0) throw InputError("weyl: lambda must be nonreal");
    DefectCoordinates dc = defect_in_adjoint_coordinates(t, lambda);
    WeylSample w;
    w.lambda = lambda;
    Matrix g0 = t.G0 * dc.coords;  // h0 x r
    Matrix g1 = t.G1 * dc.coords;  // h1 x r
    if (lambda.imag() > 0.0) {
        if (g0.rows() != g0.cols() || !is_invertible(g0))
            throw InternalError("weyl: boundary map singular on the defect space");
        Matrix inv = g0.inverse();
        w.m = g1 * inv;                    // h1 x h0
        w.gamma = dc.defect_basis * inv;   // d x h0
    } else {
        Matrix p1g0 = g0.bottomRows(t.spaces.h1);
        Matrix p2g0 = g0.topRows(t.spaces.h2());
        if (p1g0.rows() != p1g0.cols() || !is_invertible(p1g0))
            throw InternalError("weyl: boundary map singular on the defect space");
        Matrix inv = p1g0.inverse();
        Matrix g1_in_h0 = embed1_of(t.spaces) * g1;
        Matrix p2_in_h0 = Matrix::Zero(t.spaces.h0, g0.cols());
        p2_in_h0.topRows(t.spaces.h2()) = p2g0;
        w.m = (g1_in_h0 + Complex(0, 1) * p2_in_h0) * inv;  // h0 x h1
        w.gamma = dc.defect_basis * inv;                    // d x h1
    }
    return w;
}

}  // namespace cansys
