#pragma once

#include "cansys/linear_relation.hpp"
#include "cansys/matrix.hpp"

#include <string>
#include <vector>

namespace cansys {

/// Boundary-space pair H1 <= H0, realized as C^h0 with the complement H2
/// occupying the first h0-h1 coordinates and H1 the last h1 coordinates.
struct BoundarySpacePair {
    Index h0 = 0;
    Index h1 = 0;
    Index h2() const { return h0 - h1; }
};

inline bool operator==(const BoundarySpacePair& a, const BoundarySpacePair& b) {
    return a.h0 == b.h0 && a.h1 == b.h1;
}

/// Projection of h0-vectors onto the H1 coordinates (last h1 entries).
Matrix p1_of(const BoundarySpacePair& s);
/// Projection onto the H2 coordinates (first h0-h1 entries).
Matrix p2_of(const BoundarySpacePair& s);
/// Embedding of H1 into H0 by zero-padding the H2 slot.
Matrix embed1_of(const BoundarySpacePair& s);

/// A pair of operators C0: H0 -> K, C1: H1 -> K defining the condition
/// C0 h0 + C1 h1 = 0. Admissible when (C0 : C1) has full row rank.
struct OperatorPair {
    BoundarySpacePair spaces;
    Matrix C0;  // k x h0
    Matrix C1;  // k x h1
    Index k = 0;

    Matrix c02() const { return C0.leftCols(spaces.h2()); }
    Matrix c01() const { return C0.rightCols(spaces.h1); }
};

OperatorPair make_pair(const BoundarySpacePair& s, Matrix C0, Matrix C1);

bool is_admissible(const OperatorPair& p, double rel_tol = 1e-10);

/// The Hermitian k x k matrix 2 Im(C1 C01^*) - C02 C02^*.
Matrix s_tilde(const OperatorPair& p);

enum class PairClass { Dis, Ac, Sym, Self, None };

const char* to_string(PairClass c);

/// Class of the pair: Dis / Ac / Sym / Self decided through the sign of
/// s_tilde and invertibility of C01 - i C1 (resp. C0 + i C1 P1); Self is
/// Dis and Ac together. Returns the strongest applicable label, None for
/// pairs in no class (including inadmissible ones). For square pairs with
/// dim K = dim H the sign-of-Im(C1 C0^*) shortcut is evaluated as well and
/// any disagreement with the full test raises an internal error.
PairClass classify_pair(const OperatorPair& p, double rel_tol = 1e-10);

struct DimensionReport {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Checks the dimension constraints dim K = h1 for Dis and dim K = h0 for
/// Ac implied by the classification.
DimensionReport dimension_constraints(const OperatorPair& p);

/// True when q = X p for some isomorphism X, decided by a least-squares
/// solve for X with residual <= 1e-9 and an invertibility check.
bool pairs_equivalent(const OperatorPair& p, const OperatorPair& q);

/// The relation {(h0, h1) : C0 h0 + C1 h1 = 0} in H0 (+) H1.
LinearRelation pair_to_relation(const OperatorPair& p);

}  // namespace cansys
