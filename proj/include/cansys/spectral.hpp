#pragma once

#include "cansys/canonical_system.hpp"
#include "cansys/operator_pair.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cansys {

/// Homogeneous solutions annihilated by the weight. The basis consists of
/// initial vectors y(a); by uniqueness it also represents the solutions.
struct NullManifoldData {
    int k_n = 0;
    Subspace initial_vectors;  // = H_a, attainable values of the null solutions at a
    bool definite = false;
    int n_prime_dim = 0;
    int grid_points_per_piece = 0;  // grid at which the dimension stabilized
};

NullManifoldData null_manifold(const CanonicalSystem& s);

enum class Endpoint { A, B };

/// Attainable boundary values {y(e) : y in the maximal domain}, the range
/// of the inhomogeneous-controllability Gramian together with the span of
/// the homogeneous solutions.
Subspace reachable_set(const CanonicalSystem& s, Endpoint e);

/// Attainable values at e over trajectories pinned to zero at the other
/// endpoint: the range of the Gramian alone.
Subspace reachable_from_zero(const CanonicalSystem& s, Endpoint e);

struct FormalIndices {
    int plus_lo = 0, plus_hi = 0;
    int minus_lo = 0, minus_hi = 0;
    std::string method;  // "exact-regular" or "truncation-heuristic"
    bool exact = false;

    bool conclusive() const { return plus_lo == plus_hi && minus_lo == minus_hi; }
    int n_plus() const { return plus_lo; }
    int n_minus() const { return minus_lo; }
};

/// Dimension of the square-integrable solution space at nonreal lambda.
/// Exact (= n) for a regular right endpoint; for a truncation of an
/// infinite problem, estimated per half-plane by geometric-decay regression
/// of windowed weight-norms of an eigen-adapted solution basis. Ambiguous
/// growth classification widens the reported range instead of guessing.
FormalIndices formal_deficiency_indices(const CanonicalSystem& s);

struct BoundaryFormInertia {
    int nu_b_plus = 0;
    int nu_b_minus = 0;
    int kernel_dim = 0;
};

/// Inertia of the endpoint form Im (J y(b), y(b)) compressed to the
/// attainable boundary values at b.
BoundaryFormInertia boundary_form_inertia(const CanonicalSystem& s);

/// Aggregated index bookkeeping for reports.
struct IndexBookkeeping {
    FormalIndices formal;
    int n_plus = 0, n_minus = 0;  // deficiency indices N - k_N (when formal is exact)
    int k_n = 0;
    int nu_plus = 0, nu_minus = 0;
    BoundaryFormInertia boundary;
    bool sum_rule_signature = false;  // N = nu + nu_b       (regular b)
    bool sum_rule_null = false;       // N = n + k_N         (regular b)
};

IndexBookkeeping index_bookkeeping(const CanonicalSystem& s);

/// Boundary maps on stacked normal-form boundary data (U^H y(a); U^H y(b)).
/// For a definite system this is a boundary triplet; for an indefinite one
/// the same maps define a boundary relation whose multivalued part (the
/// image of the null-manifold boundary data) is recorded explicitly.
struct DecomposingBoundary {
    SignatureData sig;
    bool is_triplet = false;  // definite system
    Index dim_boundary = 0;   // dim H + dim Hhat + dim H
    Matrix G0;                // dim_boundary x 2n
    Matrix G1;                // dim_boundary x 2n
    Subspace mul_gamma;       // in C^(2 dim_boundary); dim = k_N
    double green_residual = 0.0;
    bool b_truncated = false;
};

DecomposingBoundary decomposing_triplet(const CanonicalSystem& s);

struct WeylPoint {
    Complex lambda;
    Matrix m;
    double condition = 0.0;
    bool ill_conditioned = false;
};

/// Weyl function of the decomposing triplet: M(lambda) = (G1 B)(G0 B)^{-1}
/// on the boundary data of a solution basis. Requires a definite system
/// with equal formal indices and nonreal lambda.
WeylPoint weyl_function(const CanonicalSystem& s, Complex lambda);

struct SeparatedBlocks {
    Matrix N0a, Nhat_a, N1a;  // acting on (y0(a), yhat(a), y1(a)) blocks
    Matrix N0b, Nhat_b, N1b;  // acting on the endpoint-b blocks
};

/// Boundary condition C_a y(a) + C_b Gamma_b y = 0 in raw coordinates.
/// For a regular right endpoint Gamma_b y = y(b) and J_b defaults to J.
struct BoundaryCondition {
    Matrix Ca;
    Matrix Cb;
    std::optional<Matrix> Jb;
    std::optional<SeparatedBlocks> separated;
};

enum class ConditionClass { SelfAdjoint, MaximalDissipative, MaximalAccumulative, None };

const char* to_string(ConditionClass c);

struct ConditionReport {
    ConditionClass cls = ConditionClass::None;
    RealVector d_eigenvalues;        // eigenvalues of i(Ca J Ca^* - Cb Jb Cb^*), descending
    ConditionClass sign_route;       // from the sign of D
    ConditionClass pair_route;       // through the decomposing triplet pair
    ConditionClass form_route;       // boundary-form inertia on ker(Ca : Cb)
};

/// Classification of a boundary condition by three independent routes:
/// the endpoint sign test, the operator-pair route through the decomposing
/// triplet, and the inertia of the boundary form on the condition kernel.
/// Disagreement raises an internal error.
ConditionReport classify_boundary_condition(const CanonicalSystem& s,
                                            const BoundaryCondition& bc);

struct SeparatedReport {
    ConditionClass cls = ConditionClass::None;
    Matrix Sa, Sb;
    bool sa_psd = false, sa_nsd = false, sb_psd = false, sb_nsd = false;
    bool resolvent_dissipative = false;
    bool resolvent_accumulative = false;
    Index dim_ka = 0, dim_kb = 0;
    bool dims_dissipative_ok = false;  // dim Ka = nu-, dim Kb = nu_b-
    bool dims_accumulative_ok = false;
    std::optional<bool> hamiltonian_pairs_self_adjoint;  // reduced route, Hamiltonian only
    ConditionClass assembled_class = ConditionClass::None;
};

/// Classification of separated boundary conditions by the endpoint-block
/// sign operators S_a, S_b and the associated invertibility conditions,
/// cross-checked against the assembled (C_a, C_b) classification. With
/// require_self_adjoint set, systems with unequal signature indices are
/// rejected outright (no self-adjoint separated conditions exist there).
SeparatedReport classify_separated(const CanonicalSystem& s, const BoundaryCondition& bc,
                                   bool require_self_adjoint = false);

/// Assembled (C_a, C_b) matrices of a separated condition, in raw coordinates.
BoundaryCondition assemble_separated(const CanonicalSystem& s, const SeparatedBlocks& blocks);

struct EigenvalueHit {
    double lambda = 0.0;
    int multiplicity = 0;
    double residual = 0.0;
};

struct SpectrumReport {
    std::vector<EigenvalueHit> values;
    bool truncated = false;
    int grid_points = 0;
};

/// Real eigenvalues of the self-adjoint extension defined by bc, located by
/// scanning the smallest singular value of C_a + C_b Y(b, lambda) over a
/// uniform grid, bracketing dips and refining by golden-section search.
SpectrumReport eigenvalues(const CanonicalSystem& s, const BoundaryCondition& bc,
                           double lambda_lo, double lambda_hi, int max_count = 256,
                           int grid_points = 1000);

/// A pair (y, f): y solves J y' - B y = Delta f with y(a) = y0 and
/// f(t) = Y(t, mu) coeff (a combination of homogeneous solutions, so all
/// inner products are computable by quadrature).
struct SolutionPair {
    Vector y0;
    Complex mu;
    Vector coeff;
};

/// |(f1, y2)_Delta - (y1, f2)_Delta - ([y1, y2]_b - [y1, y2]_a)|, the
/// defect of the integration-by-parts identity; inner products by adaptive
/// composite Gauss quadrature.
double lagrange_residual(const CanonicalSystem& s, const SolutionPair& p1,
                         const SolutionPair& p2);

}  // namespace cansys
