#include "cansys/boundary_relation.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>

namespace cansys {

namespace {

struct GraphBlocks {
    Matrix f, fp, h0, h1;
};

GraphBlocks split_graph(const BoundaryRelation& br) {
    const Index d = br.model_dim();
    const Index h0 = br.spaces.h0;
    const Index h1 = br.spaces.h1;
    const Matrix& w = br.gamma.graph.basis;
    GraphBlocks b;
    b.f = w.topRows(d);
    b.fp = w.middleRows(d, d);
    b.h0 = w.middleRows(2 * d, h0);
    b.h1 = w.bottomRows(h1);
    return b;
}

Matrix solve_least_squares(const Matrix& a, const Matrix& rhs, double* residual) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    Matrix x = cod.solve(rhs);
    if (residual) {
        double scale = std::max(1.0, rhs.norm());
        *residual = (a * x - rhs).norm() / scale;
    }
    return x;
}

}  // namespace

BoundaryRelation make_boundary_relation(LinearRelation base, LinearRelation gamma,
                                        BoundarySpacePair spaces) {
    if (base.dim_source != base.dim_target)
        throw InputError("make_boundary_relation: base must live in one space");
    if (gamma.dim_source != 2 * base.dim_source)
        throw InputError("make_boundary_relation: gamma source must be the pair space");
    if (gamma.dim_target != spaces.h0 + spaces.h1)
        throw InputError("make_boundary_relation: gamma target must be H0 (+) H1");
    BoundaryRelation br;
    br.base = std::move(base);
    br.gamma = std::move(gamma);
    br.spaces = spaces;
    return br;
}

BoundaryRelationReport verify_boundary_relation(const BoundaryRelation& br) {
    BoundaryRelationReport r;
    const Index d = br.model_dim();

    if (!is_symmetric(br.base)) {
        r.failure = "base relation is not symmetric";
        return r;
    }

    LinearRelation astar = adjoint(br.base);
    Subspace dom = column_space(br.gamma.source_block());
    r.domain_is_adjoint = subspace_equal(dom, astar.graph);
    if (!r.domain_is_adjoint) {
        r.failure = "dom Gamma differs from the adjoint of the base";
        return r;
    }

    RelationParts gp = parts(br.gamma);
    r.kernel_is_base = subspace_equal(gp.ker, br.base.graph);
    if (!r.kernel_is_base) {
        r.failure = "ker Gamma differs from the base relation";
        return r;
    }

    GraphBlocks b = split_graph(br);
    Matrix lhs = b.f.adjoint() * b.fp - b.fp.adjoint() * b.f;
    Matrix p1h0 = b.h0.bottomRows(br.spaces.h1);
    Matrix p2h0 = b.h0.topRows(br.spaces.h2());
    Matrix rhs = p1h0.adjoint() * b.h1 - b.h1.adjoint() * p1h0 +
                 Complex(0, 1) * (p2h0.adjoint() * p2h0);
    r.green_residual = (br.gamma.dim() == 0) ? 0.0 : (lhs - rhs).cwiseAbs().maxCoeff();
    if (r.green_residual > 1e-10) {
        r.failure = "Green identity residual above tolerance";
        return r;
    }

    DeficiencyData dd = deficiency_indices(br.base);
    Index n_gamma = gp.mul.dim();
    r.dimension_identity =
        (br.spaces.h0 + br.spaces.h1 == dd.n_plus + dd.n_minus + 2 * n_gamma);
    if (!r.dimension_identity) {
        r.failure = "dim(H0 (+) H1) differs from n+ + n- + 2 dim(mul Gamma)";
        return r;
    }

    (void)d;
    r.valid = true;
    return r;
}

MulStructure multivalued_structure(const BoundaryRelation& br) {
    MulStructure m;
    const Index h0 = br.spaces.h0;
    const Index h1 = br.spaces.h1;
    RelationParts gp = parts(br.gamma);
    m.mul = LinearRelation::from_span(h0, h1, gp.mul.basis);
    m.n_gamma = static_cast<int>(gp.mul.dim());

    RelationParts mp = parts(m.mul);
    m.Kp = column_space(Matrix(p1_of(br.spaces) * mp.dom.basis));
    m.Kpp = mp.mul;

    DeficiencyData dd = deficiency_indices(br.base);
    if (h0 != dd.n_plus + m.n_gamma || h1 != dd.n_minus + m.n_gamma)
        throw InternalError("multivalued_structure: boundary space dimension identity fails");
    return m;
}

GammaDecomposition decompose(const BoundaryRelation& br) {
    BoundaryRelationReport rep = verify_boundary_relation(br);
    if (!rep.valid) throw InputError("decompose: invalid boundary relation: " + rep.failure);

    const Index d = br.model_dim();
    const Index h0 = br.spaces.h0;
    const Index h1 = br.spaces.h1;
    const Index h2 = br.spaces.h2();

    GammaDecomposition dec;
    MulStructure ms = multivalued_structure(br);
    dec.Kp = ms.Kp;
    dec.Kpp = ms.Kpp;
    const Index kp = dec.Kp.dim();
    const Index kpp = dec.Kpp.dim();

    if (kp > 0 && kpp > 0) {
        double overlap = (dec.Kp.basis.adjoint() * dec.Kpp.basis).norm();
        if (overlap > 1e-9)
            throw InternalError("decompose: K' and K'' are not orthogonal");
    }

    dec.K1 = join(dec.Kp, dec.Kpp).orthogonal_complement();  // inside C^h1
    const Index k1 = dec.K1.dim();

    Matrix k0b(h0, h2 + k1);
    k0b.setZero();
    k0b.topLeftCorner(h2, h2) = Matrix::Identity(h2, h2);
    k0b.rightCols(k1) = embed1_of(br.spaces) * dec.K1.basis;
    dec.K0_basis = k0b;

    // Coupling operators from the multivalued part: for each K'-basis vector
    // k', the unique mul element whose H0-part is -i h2 + k' with vanishing
    // K''-component of the H1-part yields F2 k' = h2, F1 k' = k1, F' k' = m'.
    Matrix mul_h0 = ms.mul.source_block();  // h0 x q
    Matrix mul_h1 = ms.mul.target_block();  // h1 x q
    const Index q = ms.mul.dim();
    dec.F2 = Matrix::Zero(h2, kp);
    dec.F1 = Matrix::Zero(k1, kp);
    dec.Fp = Matrix::Zero(kp, kp);
    if (kp > 0) {
        Matrix conditions(kp + kpp, q);
        conditions.topRows(kp) = dec.Kp.basis.adjoint() * p1_of(br.spaces) * mul_h0;
        conditions.bottomRows(kpp) = dec.Kpp.basis.adjoint() * mul_h1;
        Matrix targets = Matrix::Zero(kp + kpp, kp);
        targets.topLeftCorner(kp, kp) = Matrix::Identity(kp, kp);
        double res = 0.0;
        Matrix coeff = solve_least_squares(conditions, targets, &res);
        if (res > 1e-8)
            throw InternalError("decompose: coupling system has no unique solution");
        Matrix el_h0 = mul_h0 * coeff;  // h0 x kp
        Matrix el_h1 = mul_h1 * coeff;  // h1 x kp
        dec.F2 = Complex(0, 1) * p2_of(br.spaces) * el_h0;
        dec.F1 = dec.K1.basis.adjoint() * el_h1;
        dec.Fp = dec.Kp.basis.adjoint() * el_h1;
        // Sanity: the K1-component of the H0-part must vanish.
        if (k1 > 0) {
            double leak =
                (dec.K1.basis.adjoint() * p1_of(br.spaces) * el_h0).cwiseAbs().maxCoeff();
            if (leak > 1e-9)
                throw InternalError("decompose: mul element leaks into K1");
        }
    }

    Matrix identity_defect = dec.Fp - dec.Fp.adjoint() +
                             Complex(0, 1) * dec.F2.adjoint() * dec.F2;
    if (kp > 0 && identity_defect.cwiseAbs().maxCoeff() > 1e-9)
        throw InternalError("decompose: recovered couplings violate the compatibility identity");

    // Inner triplet: the sub-relation of Gamma with no K' or K'' components.
    Matrix constraints = Matrix::Zero(kp + 2 * kpp, 2 * d + h0 + h1);
    {
        Matrix p1 = p1_of(br.spaces);
        constraints.block(0, 2 * d, kp, h0) = dec.Kp.basis.adjoint() * p1;
        constraints.block(kp, 2 * d, kpp, h0) = dec.Kpp.basis.adjoint() * p1;
        constraints.block(kp + kpp, 2 * d + h0, kpp, h1) = dec.Kpp.basis.adjoint();
    }
    Subspace t_graph = intersect(br.gamma.graph, null_space(constraints));

    LinearRelation astar = adjoint(br.base);
    Matrix adjoint_basis = astar.graph.basis;
    const Index m = adjoint_basis.cols();
    if (t_graph.dim() != m)
        throw InternalError("decompose: inner operator part has wrong dimension");

    Matrix t_src = t_graph.basis.topRows(2 * d);
    Matrix t_h0 = t_graph.basis.middleRows(2 * d, h0);
    Matrix t_h1 = t_graph.basis.bottomRows(h1);
    double res = 0.0;
    Matrix coords = solve_least_squares(t_src, adjoint_basis, &res);
    if (res > 1e-8) throw InternalError("decompose: inner operator domain is not the adjoint");

    Matrix g0 = dec.K0_basis.adjoint() * (t_h0 * coords);  // (h2+k1) x m
    Matrix g1 = dec.K1.basis.adjoint() * (t_h1 * coords);  // k1 x m

    BoundarySpacePair ts{h2 + k1, k1};
    dec.triplet = make_triplet(br.base, adjoint_basis, ts, g0, g1);
    TripletReport tr = verify_triplet(dec.triplet);
    if (!tr.valid)
        throw InternalError("decompose: inner boundary maps fail triplet verification: " +
                            tr.failure);

    BoundaryRelation round = reassemble(br.base, dec, br.spaces);
    if (!relations_equal(round.gamma, br.gamma))
        throw InternalError("decompose: reassembly does not reproduce the relation");
    return dec;
}

BoundaryRelation assemble(const BoundaryTriplet& t, const Matrix& F2, const Matrix& F1,
                          const Matrix& Fp, Index dim_kpp) {
    TripletReport tr = verify_triplet(t);
    if (!tr.valid) throw InputError("assemble: invalid triplet: " + tr.failure);
    const Index h2 = t.spaces.h2();
    const Index k1 = t.spaces.h1;
    const Index kp = F2.cols();
    if (F1.cols() != kp || Fp.cols() != kp || Fp.rows() != kp)
        throw InputError("assemble: coupling operator shapes disagree");
    if (F2.rows() != h2 || F1.rows() != k1)
        throw InputError("assemble: coupling operators do not match the triplet spaces");
    Matrix defect = Fp - Fp.adjoint() + Complex(0, 1) * F2.adjoint() * F2;
    if (kp > 0 && defect.cwiseAbs().maxCoeff() > 1e-10)
        throw InputError("assemble: couplings violate the compatibility identity "
                         "Fp - Fp^H + i F2^H F2 = 0");

    const Index d = t.model_dim();
    const Index m = t.adjoint_dim();
    const Index k0 = h2 + k1;
    const Index h1 = k1 + kp + dim_kpp;
    const Index h0 = h2 + h1;

    Matrix f0(k0, kp);
    f0.topRows(h2) = F2;
    f0.bottomRows(k1) = F1;

    Matrix cols = Matrix::Zero(2 * d + h0 + h1, m + kp + dim_kpp);
    // Layout of H0: [H2 | K1 | K' | K'']; of H1: [K1 | K' | K''].
    for (Index j = 0; j < m; ++j) {
        cols.col(j).topRows(2 * d) = t.adjoint_basis.col(j);
        cols.col(j).segment(2 * d, k0) = t.G0.col(j);
        cols.col(j).segment(2 * d + h0, k1) = t.G1.col(j);
        cols.col(j).segment(2 * d + h0 + k1, kp) = f0.adjoint() * t.G0.col(j);
    }
    for (Index i = 0; i < kp; ++i) {
        Index c = m + i;
        cols.col(c).segment(2 * d, h2) = Complex(0, -1) * F2.col(i);
        cols.col(c)(2 * d + k0 + i) = Complex(1, 0);
        cols.col(c).segment(2 * d + h0, k1) = F1.col(i);
        cols.col(c).segment(2 * d + h0 + k1, kp) = Fp.col(i);
    }
    for (Index i = 0; i < dim_kpp; ++i) {
        Index c = m + kp + i;
        cols.col(c)(2 * d + h0 + k1 + kp + i) = Complex(1, 0);
    }

    BoundarySpacePair spaces{h0, h1};
    LinearRelation gamma = LinearRelation::from_span(2 * d, h0 + h1, cols);
    return make_boundary_relation(t.base, std::move(gamma), spaces);
}

BoundaryRelation reassemble(const LinearRelation& base, const GammaDecomposition& dec,
                            const BoundarySpacePair& spaces) {
    BoundaryRelation aligned = assemble(dec.triplet, dec.F2, dec.F1, dec.Fp, dec.Kpp.dim());
    // Rotate the coordinate-aligned assembly back into the original H0/H1.
    const Index h1 = spaces.h1;
    const Index h2 = spaces.h2();
    const Index d = base.dim_source;
    Matrix w1(h1, h1);
    w1.leftCols(dec.K1.dim()) = dec.K1.basis;
    w1.middleCols(dec.K1.dim(), dec.Kp.dim()) = dec.Kp.basis;
    w1.rightCols(dec.Kpp.dim()) = dec.Kpp.basis;
    Matrix w0 = Matrix::Zero(spaces.h0, spaces.h0);
    w0.topLeftCorner(h2, h2) = Matrix::Identity(h2, h2);
    w0.bottomRightCorner(h1, h1) = w1;

    Matrix rot = Matrix::Identity(2 * d + spaces.h0 + h1, 2 * d + spaces.h0 + h1);
    rot.block(2 * d, 2 * d, spaces.h0, spaces.h0) = w0;
    rot.block(2 * d + spaces.h0, 2 * d + spaces.h0, h1, h1) = w1;

    LinearRelation gamma = LinearRelation::from_span(
        2 * d, spaces.h0 + h1, Matrix(rot * aligned.gamma.graph.basis));
    return make_boundary_relation(base, std::move(gamma), spaces);
}

WeylFamilySample weyl_family(const BoundaryRelation& br, Complex lambda) {
    if (lambda.imag() == 0.0) throw InputError("weyl_family: lambda must be nonreal");
    const Index d = br.model_dim();
    const Index h0 = br.spaces.h0;
    const Index h1 = br.spaces.h1;
    const bool upper = lambda.imag() > 0.0;

    // Elements of Gamma whose model part is an eigen-pair (f, lambda f).
    Matrix eig_constraint = Matrix::Zero(d, 2 * d + h0 + h1);
    eig_constraint.leftCols(d) = -lambda * Matrix::Identity(d, d);
    eig_constraint.middleCols(d, d) = Matrix::Identity(d, d);
    Subspace s = intersect(br.gamma.graph, null_space(eig_constraint));

    Matrix sf = s.basis.topRows(d);
    Matrix sh0 = s.basis.middleRows(2 * d, h0);
    Matrix sh1 = s.basis.bottomRows(h1);

    WeylFamilySample w;
    w.lambda = lambda;

    LinearRelation family;
    if (upper) {
        Matrix pairs(h0 + h1, s.dim());
        pairs.topRows(h0) = sh0;
        pairs.bottomRows(h1) = sh1;
        family = LinearRelation::from_span(h0, h1, pairs);
    } else {
        Matrix p1 = p1_of(br.spaces);
        Matrix p2full = Matrix::Zero(h0, h0);
        p2full.topRows(br.spaces.h2()) = p2_of(br.spaces);
        Matrix pairs(h1 + h0, s.dim());
        pairs.topRows(h1) = p1 * sh0;
        pairs.bottomRows(h0) = embed1_of(br.spaces) * sh1 + Complex(0, 1) * p2full * sh0;
        family = LinearRelation::from_span(h1, h0, pairs);
    }

    RelationParts fp = parts(family);
    w.mul_part = fp.mul;

    // Operator part as a matrix vanishing on the orthogonal complement of dom.
    {
        Matrix dom = fp.dom.basis;
        Matrix mul_proj = Matrix::Identity(family.dim_target, family.dim_target) -
                          fp.mul.projector();
        double res = 0.0;
        Matrix coeff = solve_least_squares(family.source_block(), dom, &res);
        if (res > 1e-8) throw InternalError("weyl_family: domain solve failed");
        Matrix vals = mul_proj * (family.target_block() * coeff);
        w.m_direct = vals * dom.adjoint();
    }

    // Independent route through the decomposition block formula.
    GammaDecomposition dec = decompose(br);
    const Index kp = dec.Kp.dim();
    const Index k0 = dec.K0_basis.cols();
    const Index k1 = dec.K1.dim();
    // Triplet Weyl function at the upper half-plane representative.
    Matrix mpi = weyl(dec.triplet, upper ? lambda : std::conj(lambda)).m;
    Matrix f0(dec.F2.rows() + dec.F1.rows(), kp);
    f0.topRows(dec.F2.rows()) = dec.F2;
    f0.bottomRows(dec.F1.rows()) = dec.F1;
    Matrix block(k1 + kp, k0 + kp);
    block.topLeftCorner(k1, k0) = mpi;
    block.topRightCorner(k1, kp) = dec.F1 + Complex(0, 1) * mpi * dec.F2;
    block.bottomLeftCorner(kp, k0) = f0.adjoint();
    block.bottomRightCorner(kp, kp) = dec.Fp.adjoint();

    Matrix dom_basis(h0, k0 + kp);
    dom_basis.leftCols(k0) = dec.K0_basis;
    dom_basis.rightCols(kp) = embed1_of(br.spaces) * dec.Kp.basis;
    Matrix ran_basis(h1, k1 + kp);
    ran_basis.leftCols(k1) = dec.K1.basis;
    ran_basis.rightCols(kp) = dec.Kp.basis;
    Matrix m_plus_block = ran_basis * block * dom_basis.adjoint();
    w.m_block = upper ? m_plus_block : Matrix(m_plus_block.adjoint());
    w.route_residual = (w.m_direct - w.m_block).cwiseAbs().maxCoeff();
    if (w.route_residual > 1e-9)
        throw InternalError("weyl_family: block formula disagrees with the direct value");

    const Index h2 = br.spaces.h2();
    if (upper) {
        w.n_block = w.m_direct.leftCols(h2);
        w.m_square = w.m_direct.rightCols(h1);
        w.calM = Matrix::Zero(h0, h0);
        w.calM.topLeftCorner(h2, h2) = Complex(0, 0.5) * Matrix::Identity(h2, h2);
        w.calM.bottomLeftCorner(h1, h2) = w.n_block;
        w.calM.bottomRightCorner(h1, h1) = w.m_square;
    } else {
        w.n_block = w.m_direct.topRows(h2);
        w.m_square = w.m_direct.bottomRows(h1);
        w.calM = Matrix::Zero(h0, h0);
        w.calM.topLeftCorner(h2, h2) = Complex(0, -0.5) * Matrix::Identity(h2, h2);
        w.calM.topRightCorner(h2, h1) = w.n_block;
        w.calM.bottomRightCorner(h1, h1) = w.m_square;
    }

    if (upper && dec.Kpp.dim() == 0) {
        if (s.dim() != h0) throw InternalError("weyl_family: eigen-slice has wrong dimension");
        Matrix h0mat = sh0;
        if (!is_invertible(h0mat))
            throw InternalError("weyl_family: boundary values singular on the eigen-slice");
        w.gamma_plus = sf * h0mat.inverse();
    } else {
        w.gamma_plus = Matrix::Zero(d, 0);
    }
    return w;
}

}  // namespace cansys
