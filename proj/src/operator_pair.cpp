#include "cansys/operator_pair.hpp"

#include <Eigen/SVD>

namespace cansys {

Matrix p1_of(const BoundarySpacePair& s) {
    Matrix p = Matrix::Zero(s.h1, s.h0);
    p.rightCols(s.h1) = Matrix::Identity(s.h1, s.h1);
    return p;
}

Matrix p2_of(const BoundarySpacePair& s) {
    Matrix p = Matrix::Zero(s.h2(), s.h0);
    p.leftCols(s.h2()) = Matrix::Identity(s.h2(), s.h2());
    return p;
}

Matrix embed1_of(const BoundarySpacePair& s) {
    Matrix e = Matrix::Zero(s.h0, s.h1);
    e.bottomRows(s.h1) = Matrix::Identity(s.h1, s.h1);
    return e;
}

OperatorPair make_pair(const BoundarySpacePair& s, Matrix C0, Matrix C1) {
    if (s.h1 > s.h0 || s.h0 < 0) throw InputError("make_pair: invalid boundary spaces");
    if (C0.cols() != s.h0 || C1.cols() != s.h1 || C0.rows() != C1.rows())
        throw InputError("make_pair: operator shapes do not match the boundary spaces");
    require_finite(C0, "make_pair C0");
    require_finite(C1, "make_pair C1");
    OperatorPair p;
    p.spaces = s;
    p.k = C0.rows();
    p.C0 = std::move(C0);
    p.C1 = std::move(C1);
    return p;
}

static Matrix joint(const OperatorPair& p) {
    Matrix c(p.k, p.spaces.h0 + p.spaces.h1);
    c.leftCols(p.spaces.h0) = p.C0;
    c.rightCols(p.spaces.h1) = p.C1;
    return c;
}

bool is_admissible(const OperatorPair& p, double) {
    if (p.k == 0) return false;
    return column_space(Matrix(joint(p).adjoint())).dim() == p.k;
}

Matrix s_tilde(const OperatorPair& p) {
    Matrix c01 = p.c01();
    Matrix c02 = p.c02();
    return 2.0 * imaginary_part(Matrix(p.C1 * c01.adjoint())) - c02 * c02.adjoint();
}

const char* to_string(PairClass c) {
    switch (c) {
        case PairClass::Dis: return "Dis";
        case PairClass::Ac: return "Ac";
        case PairClass::Sym: return "Sym";
        case PairClass::Self: return "Self";
        case PairClass::None: return "none";
    }
    return "none";
}

PairClass classify_pair(const OperatorPair& p, double rel_tol) {
    const auto& s = p.spaces;
    Matrix st = s_tilde(p);
    double thr = rel_tol * std::max(1e-300, st.norm());
    bool st_nonneg = st.rows() == 0 || min_eigenvalue_hermitian(st) >= -thr;
    bool st_nonpos = st.rows() == 0 || min_eigenvalue_hermitian(Matrix(-st)) >= -thr;
    bool st_zero = st_nonneg && st_nonpos;

    Matrix dis_map = p.c01() - Complex(0, 1) * p.C1;          // H1 -> K
    Matrix ac_map = p.C0 + Complex(0, 1) * p.C1 * p1_of(s);   // H0 -> K
    bool dis_invertible = (p.k == s.h1) && is_invertible(dis_map, rel_tol);
    bool ac_invertible = (p.k == s.h0) && is_invertible(ac_map, rel_tol);

    bool dis = st_nonneg && dis_invertible;
    bool ac = st_nonpos && ac_invertible;
    bool sym = st_zero && (dis_invertible || ac_invertible);

    PairClass result = PairClass::None;
    if (dis && ac)
        result = PairClass::Self;
    else if (dis)
        result = PairClass::Dis;
    else if (ac)
        result = PairClass::Ac;
    else if (sym)
        result = PairClass::Sym;

    // Square shortcut: for dim K = dim H0 = dim H1 the class is decided by
    // the sign of Im(C1 C0^*) plus one resolvent condition per class.
    if (s.h0 == s.h1 && p.k == s.h0 && is_admissible(p)) {
        Matrix im = imaginary_part(Matrix(p.C1 * p.C0.adjoint()));
        double sthr = rel_tol * std::max(1e-300, im.norm());
        bool im_nonneg = im.rows() == 0 || min_eigenvalue_hermitian(im) >= -sthr;
        bool im_nonpos = im.rows() == 0 || min_eigenvalue_hermitian(Matrix(-im)) >= -sthr;
        PairClass shortcut = PairClass::None;
        if (im_nonneg && im_nonpos)
            shortcut = PairClass::Self;
        else if (im_nonneg)
            shortcut = PairClass::Dis;
        else if (im_nonpos)
            shortcut = PairClass::Ac;
        if (shortcut != result && !(shortcut == PairClass::None && result == PairClass::None))
            throw InternalError(std::string("classify_pair: square shortcut (") +
                                to_string(shortcut) + ") disagrees with the full test (" +
                                to_string(result) + ")");
    }
    return result;
}

DimensionReport dimension_constraints(const OperatorPair& p) {
    DimensionReport r;
    PairClass c = classify_pair(p);
    if ((c == PairClass::Dis || c == PairClass::Self) && p.k != p.spaces.h1) {
        r.ok = false;
        r.violations.push_back("dissipative pair with dim K != dim H1");
    }
    if ((c == PairClass::Ac || c == PairClass::Self) && p.k != p.spaces.h0) {
        r.ok = false;
        r.violations.push_back("accumulative pair with dim K != dim H0");
    }
    if (!r.ok)
        throw InternalError("dimension_constraints: classification contradicts dimensions");
    return r;
}

bool pairs_equivalent(const OperatorPair& p, const OperatorPair& q) {
    if (!(p.spaces == q.spaces)) return false;
    if (p.k != q.k) return false;
    if (!is_admissible(p) || !is_admissible(q)) return false;
    Matrix cp = joint(p);
    Matrix cq = joint(q);
    // Solve X cp = cq in the least-squares sense: X = cq cp^H (cp cp^H)^-1.
    Matrix gram = cp * cp.adjoint();
    Matrix x = gram.ldlt().solve(cp * cq.adjoint()).adjoint();
    double scale = std::max(1.0, cq.norm());
    if ((x * cp - cq).norm() > 1e-9 * scale) return false;
    return is_invertible(x);
}

LinearRelation pair_to_relation(const OperatorPair& p) {
    return LinearRelation::from_span(p.spaces.h0, p.spaces.h1, null_space(joint(p)).basis);
}

}  // namespace cansys
