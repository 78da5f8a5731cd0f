#include "cansys/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cansys {

namespace {

std::vector<double> window_boundaries(const CanonicalSystem& s, int windows) {
    std::vector<double> w(windows + 1);
    for (int k = 0; k <= windows; ++k) w[k] = s.a + (s.b - s.a) * k / windows;
    return w;
}

double smallest_singular_value(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

ConditionClass class_from_inertia(const Inertia& in) {
    if (in.n_plus == 0 && in.n_minus == 0) return ConditionClass::SelfAdjoint;
    if (in.n_minus == 0) return ConditionClass::MaximalDissipative;
    if (in.n_plus == 0) return ConditionClass::MaximalAccumulative;
    return ConditionClass::None;
}

ConditionClass condition_class_of_pair(PairClass pc) {
    switch (pc) {
        case PairClass::Self: return ConditionClass::SelfAdjoint;
        case PairClass::Dis: return ConditionClass::MaximalDissipative;
        case PairClass::Ac: return ConditionClass::MaximalAccumulative;
        default: return ConditionClass::None;
    }
}

}  // namespace

const char* to_string(ConditionClass c) {
    switch (c) {
        case ConditionClass::SelfAdjoint: return "self-adjoint";
        case ConditionClass::MaximalDissipative: return "maximal-dissipative";
        case ConditionClass::MaximalAccumulative: return "maximal-accumulative";
        case ConditionClass::None: return "none";
    }
    return "none";
}

NullManifoldData null_manifold(const CanonicalSystem& s) {
    require_valid(s);
    NullManifoldData out;
    int per_piece = 16;
    const int cap = 4096;
    int stable_runs = 0;
    Index last_dim = -1;
    Subspace kernel = Subspace::full(s.n);
    while (per_piece <= cap) {
        std::vector<double> ts = dense_grid(s, per_piece);
        std::vector<Matrix> ys = solve_at(s, Complex(0, 0), ts);
        Matrix stacked(s.n * static_cast<Index>(ts.size()), s.n);
        for (size_t k = 0; k < ts.size(); ++k)
            stacked.middleRows(s.n * static_cast<Index>(k), s.n) =
                s.coeff_delta(ts[k]) * ys[k];
        kernel = null_space(stacked, s.tol.rank_tol);
        if (kernel.dim() == last_dim) {
            ++stable_runs;
            if (stable_runs >= 2) break;
        } else {
            stable_runs = 0;
            last_dim = kernel.dim();
        }
        per_piece *= 2;
    }
    if (stable_runs < 2)
        throw ToleranceError("null_manifold: dimension did not stabilize under refinement");
    out.k_n = static_cast<int>(kernel.dim());
    out.initial_vectors = kernel;
    out.definite = (out.k_n == 0);
    out.grid_points_per_piece = per_piece;

    if (out.k_n > 0) {
        Subspace ra = reachable_set(s, Endpoint::A);
        Matrix cond = ra.basis.adjoint() * s.J * kernel.basis;  // (dim ra) x k_n
        out.n_prime_dim = static_cast<int>(null_space(cond).dim());
    }
    return out;
}

Subspace reachable_from_zero(const CanonicalSystem& s, Endpoint e) {
    require_valid(s);
    const Index n = s.n;
    // State rows: Psi (transition towards e) on top, Gramian accumulator below.
    double start = (e == Endpoint::B) ? s.b : s.a;
    double stop = (e == Endpoint::B) ? s.a : s.b;
    auto rhs = [&s, n](double t, const Matrix& state) -> Matrix {
        Matrix psi = state.topRows(n);
        Matrix phi = psi * s.j_inverse();
        Matrix out(2 * n, n);
        out.topRows(n) = -psi * s.system_matrix(t, Complex(0, 0));
        out.bottomRows(n) = phi * s.coeff_delta(t) * phi.adjoint();
        return out;
    };
    Matrix y0 = Matrix::Zero(2 * n, n);
    y0.topRows(n) = Matrix::Identity(n, n);
    std::vector<double> nodes;
    for (const Piece& p : s.pieces) {
        nodes.push_back(p.t0);
        nodes.push_back(p.t1);
    }
    nodes.push_back(stop);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (e == Endpoint::B) std::reverse(nodes.begin(), nodes.end());
    OdeOptions opt;
    opt.rel_tol = s.tol.ode_rel;
    opt.abs_tol = s.tol.ode_abs;
    std::vector<Matrix> vals = integrate_rk45(rhs, start, stop, y0, nodes, opt);
    Matrix w = vals.back().bottomRows(n);
    if (e == Endpoint::B) w = -w;  // reversed orientation of the integral
    return column_space(w, s.tol.rank_tol);
}

Subspace reachable_set(const CanonicalSystem& s, Endpoint e) {
    Subspace gram = reachable_from_zero(s, e);
    Matrix hom = (e == Endpoint::B) ? solution_at_b(s, Complex(0, 0))
                                    : Matrix(Matrix::Identity(s.n, s.n));
    Matrix both(s.n, gram.dim() + s.n);
    both.leftCols(gram.dim()) = gram.basis;
    both.rightCols(s.n) = hom;
    return column_space(both, s.tol.rank_tol);
}

namespace {

enum class DirectionVerdict { ZeroMass, Decay, Growth, Ambiguous };

struct HalfPlaneCount {
    int lo = 0;
    int hi = 0;
};

/// Window cascade count of square-integrable directions at one lambda.
/// An orthonormal frame is transported window by window (re-orthonormalized
/// by QR each time), the windowed weight-masses of the adapted directions
/// are accumulated in log scale, and each direction is classified by the
/// per-window geometric ratio of its mass sequence.
HalfPlaneCount count_integrable_directions(const CanonicalSystem& s, Complex lambda,
                                           int windows) {
    const Index n = s.n;
    std::vector<double> w = window_boundaries(s, windows);
    Matrix q = Matrix::Identity(n, n);
    std::vector<std::vector<double>> log_mass(static_cast<size_t>(n));
    std::vector<double> log_scale(static_cast<size_t>(n), 0.0);
    std::vector<std::vector<bool>> mass_floor(static_cast<size_t>(n));
    OdeOptions opt;
    opt.rel_tol = s.tol.ode_rel;
    opt.abs_tol = s.tol.ode_abs;

    for (int k = 0; k < windows; ++k) {
        auto rhs = [&s, lambda, n](double t, const Matrix& state) -> Matrix {
            Matrix y = state.topRows(n);
            Matrix out(2 * n, n);
            out.topRows(n) = s.system_matrix(t, lambda) * y;
            out.bottomRows(n) = y.adjoint() * s.coeff_delta(t) * y;
            return out;
        };
        Matrix state0 = Matrix::Zero(2 * n, n);
        state0.topRows(n) = q;
        std::vector<double> nodes = {w[k + 1]};
        for (const Piece& p : s.pieces) {
            if (p.t0 > w[k] && p.t0 < w[k + 1]) nodes.push_back(p.t0);
            if (p.t1 > w[k] && p.t1 < w[k + 1]) nodes.push_back(p.t1);
        }
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        Matrix state = integrate_rk45(rhs, w[k], w[k + 1], state0, nodes, opt).back();
        Matrix ylocal = state.topRows(n);
        Matrix gram = state.bottomRows(n);

        double floor_scale = std::max(gram.cwiseAbs().maxCoeff(), 1e-300);
        for (Index j = 0; j < n; ++j) {
            double m = std::max(gram(j, j).real(), 0.0);
            bool floored = (m <= 1e-14 * floor_scale);
            mass_floor[static_cast<size_t>(j)].push_back(floored);
            double lm = std::log(std::max(m, 1e-300)) + 2.0 * log_scale[static_cast<size_t>(j)];
            log_mass[static_cast<size_t>(j)].push_back(lm);
        }

        Eigen::HouseholderQR<Matrix> qr(ylocal);
        Matrix qnext = qr.householderQ();
        Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Index j = 0; j < n; ++j) {
            double rj = std::abs(r(j, j));
            log_scale[static_cast<size_t>(j)] += std::log(std::max(rj, 1e-300));
            // keep the frame deterministic in phase
            Complex d = r(j, j);
            if (d != Complex(0, 0)) qnext.col(j) *= d / std::abs(d);
        }
        q = qnext;
    }

    const int fit_from = std::max(1, windows - 6);  // skip the initial transient
    HalfPlaneCount count;
    for (Index j = 0; j < n; ++j) {
        const auto& lm = log_mass[static_cast<size_t>(j)];
        const auto& fl = mass_floor[static_cast<size_t>(j)];
        bool all_floored = std::all_of(fl.begin(), fl.end(), [](bool b) { return b; });
        if (all_floored) {
            ++count.lo;  // weight-null direction: zero seminorm, square integrable
            ++count.hi;
            continue;
        }
        // Geometric regression on the tail windows.
        int pts = windows - fit_from;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        bool any_floor = false;
        std::vector<double> ratios;
        for (int k = fit_from; k < windows; ++k) {
            any_floor = any_floor || fl[static_cast<size_t>(k)];
            double x = k;
            double y = lm[static_cast<size_t>(k)];
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            if (k > fit_from) ratios.push_back(lm[static_cast<size_t>(k)] -
                                               lm[static_cast<size_t>(k - 1)]);
        }
        double slope = (pts * sxy - sx * sy) / (pts * sxx - sx * sx);
        bool all_down = std::all_of(ratios.begin(), ratios.end(),
                                    [](double r) { return r < 0.0; });
        bool all_up = std::all_of(ratios.begin(), ratios.end(),
                                  [](double r) { return r > 0.0; });
        DirectionVerdict v = DirectionVerdict::Ambiguous;
        if (any_floor && all_down)
            v = DirectionVerdict::Decay;  // fell below resolution while shrinking
        else if (slope <= std::log(0.8) && all_down)
            v = DirectionVerdict::Decay;
        else if (slope >= std::log(1.25) && all_up)
            v = DirectionVerdict::Growth;
        switch (v) {
            case DirectionVerdict::ZeroMass:
            case DirectionVerdict::Decay:
                ++count.lo;
                ++count.hi;
                break;
            case DirectionVerdict::Growth: break;
            case DirectionVerdict::Ambiguous: ++count.hi; break;
        }
    }
    return count;
}

}  // namespace

FormalIndices formal_deficiency_indices(const CanonicalSystem& s) {
    require_valid(s);
    FormalIndices out;
    if (s.b_kind == EndpointKind::Regular) {
        out.plus_lo = out.plus_hi = static_cast<int>(s.n);
        out.minus_lo = out.minus_hi = static_cast<int>(s.n);
        out.method = "exact-regular";
        out.exact = true;
        return out;
    }

    out.method = "truncation-heuristic";
    out.exact = false;
    const int windows = 8;
    const std::vector<Complex> samples = {Complex(0, 1), Complex(0, 2), Complex(0.6, 0.8)};
    auto combine = [&](bool upper) {
        int lo = -1, hi = -1;
        for (const Complex& l : samples) {
            Complex lam = upper ? l : std::conj(l);
            HalfPlaneCount c = count_integrable_directions(s, lam, windows);
            if (lo < 0) {
                lo = c.lo;
                hi = c.hi;
            } else {
                // The dimension is lambda-independent per half-plane; estimates
                // that disagree widen the reported range.
                lo = std::min(lo, c.lo);
                hi = std::max(hi, c.hi);
            }
        }
        return std::pair<int, int>(lo, hi);
    };
    auto [plo, phi] = combine(true);
    auto [mlo, mhi] = combine(false);
    out.plus_lo = plo;
    out.plus_hi = phi;
    out.minus_lo = mlo;
    out.minus_hi = mhi;
    return out;
}

BoundaryFormInertia boundary_form_inertia(const CanonicalSystem& s) {
    require_valid(s);
    Subspace reach = reachable_set(s, Endpoint::B);
    Matrix p = reach.basis;
    Matrix form = p.adjoint() * (Complex(0, -1) * s.J) * p;
    Inertia in = hermitian_inertia(form, 1e-10 * std::max(1.0, form.norm()));
    BoundaryFormInertia out;
    out.nu_b_plus = in.n_plus;
    out.nu_b_minus = in.n_minus;
    out.kernel_dim = in.n_zero;

    if (s.b_kind == EndpointKind::Regular) {
        SignatureData sig = signature_of(s.J);
        if (sig.nu_plus + out.nu_b_plus != s.n || sig.nu_minus + out.nu_b_minus != s.n)
            throw InternalError(
                "boundary_form_inertia: signature sum rule fails for a regular system");
    }
    return out;
}

IndexBookkeeping index_bookkeeping(const CanonicalSystem& s) {
    IndexBookkeeping out;
    out.formal = formal_deficiency_indices(s);
    NullManifoldData nm = null_manifold(s);
    out.k_n = nm.k_n;
    SignatureData sig = signature_of(s.J);
    out.nu_plus = sig.nu_plus;
    out.nu_minus = sig.nu_minus;
    out.boundary = boundary_form_inertia(s);
    if (out.formal.conclusive()) {
        out.n_plus = out.formal.n_plus() - out.k_n;
        out.n_minus = out.formal.n_minus() - out.k_n;
    }
    if (out.formal.exact) {
        out.sum_rule_signature =
            (out.formal.n_plus() == out.nu_plus + out.boundary.nu_b_plus &&
             out.formal.n_minus() == out.nu_minus + out.boundary.nu_b_minus);
        // Independent recount of the deficiency indices through the boundary
        // maps: dim H0 minus the rank of the null-manifold boundary image.
        DecomposingBoundary db = decomposing_triplet(s);
        Index n_from_boundary = db.dim_boundary - db.mul_gamma.dim();
        out.sum_rule_null =
            (out.formal.n_plus() == static_cast<int>(n_from_boundary) + out.k_n &&
             out.formal.n_minus() == static_cast<int>(n_from_boundary) + out.k_n);
    }
    return out;
}

DecomposingBoundary decomposing_triplet(const CanonicalSystem& s) {
    require_valid(s);
    DecomposingBoundary out;
    out.sig = signature_of(s.J);
    out.b_truncated = (s.b_kind == EndpointKind::TruncatedSingular);

    BoundaryFormInertia bf = boundary_form_inertia(s);
    if (bf.nu_b_plus - bf.nu_b_minus != out.sig.nu_minus - out.sig.nu_plus)
        throw InputError(
            "decomposing_triplet: unequal formal deficiency indices "
            "(endpoint-form inertia difference does not cancel the signature difference)");

    const Index n = s.n;
    const Index dh = out.sig.dim_h;
    const Index dhh = out.sig.dim_h_hat;
    const Index dim = 2 * dh + dhh;
    out.dim_boundary = dim;
    const double isq = 1.0 / std::sqrt(2.0);
    const double delta = static_cast<double>(out.sig.delta);

    // Boundary data layout: (x_a ; x_b) with x = U^H y in normal-form blocks
    // (x0, xhat, x1) of sizes (dh, dhh, dh).
    Matrix g0 = Matrix::Zero(dim, 2 * n);
    Matrix g1 = Matrix::Zero(dim, 2 * n);
    auto xa0 = [&](Matrix& g, Index row, Index count, double re, double im, bool at_b,
                   Index offset) {
        for (Index k = 0; k < count; ++k)
            g(row + k, (at_b ? n : 0) + offset + k) = Complex(re, im);
    };
    // first block: y0(a) / y1(a)
    xa0(g0, 0, dh, 1, 0, false, 0);
    xa0(g1, 0, dh, 1, 0, false, dh + dhh);
    // middle block: i delta / sqrt2 (xhat(a) - xhat(b));  1/sqrt2 (xhat(a) + xhat(b))
    xa0(g0, dh, dhh, 0, delta * isq, false, dh);
    xa0(g0, dh, dhh, 0, -delta * isq, true, dh);
    xa0(g1, dh, dhh, isq, 0, false, dh);
    xa0(g1, dh, dhh, isq, 0, true, dh);
    // last block: y0(b) / -y1(b)
    xa0(g0, dh + dhh, dh, 1, 0, true, 0);
    xa0(g1, dh + dhh, dh, -1, 0, true, dh + dhh);
    out.G0 = g0;
    out.G1 = g1;

    // Green identity on the full boundary-data basis, in normal-form coords:
    // (Jn x_b, x'_b) - (Jn x_a, x'_a) = (G1 x, G0 x') - (G0 x, G1 x').
    Matrix jn = out.sig.normal_form();
    Matrix sa = Matrix::Zero(n, 2 * n), sb = Matrix::Zero(n, 2 * n);
    sa.leftCols(n) = Matrix::Identity(n, n);
    sb.rightCols(n) = Matrix::Identity(n, n);
    Matrix lhs = sb.adjoint() * jn * sb - sa.adjoint() * jn * sa;
    Matrix rhs = g0.adjoint() * g1 - g1.adjoint() * g0;
    out.green_residual = (lhs - rhs).cwiseAbs().maxCoeff();
    if (out.green_residual > s.tol.green_tol)
        throw InternalError("decomposing_triplet: Green identity residual too large");

    NullManifoldData nm = null_manifold(s);
    out.is_triplet = nm.definite;
    if (!nm.definite) {
        Matrix yb = solution_at_b(s, Complex(0, 0));
        Matrix data(2 * n, nm.k_n);
        data.topRows(n) = out.sig.U.adjoint() * nm.initial_vectors.basis;
        data.bottomRows(n) = out.sig.U.adjoint() * (yb * nm.initial_vectors.basis);
        Matrix image(2 * dim, nm.k_n);
        image.topRows(dim) = g0 * data;
        image.bottomRows(dim) = g1 * data;
        out.mul_gamma = column_space(image);
        if (out.mul_gamma.dim() != nm.k_n)
            throw InternalError(
                "decomposing_triplet: multivalued part dimension differs from the "
                "null-manifold dimension");
    } else {
        out.mul_gamma = Subspace::zero(2 * dim);
    }
    return out;
}

WeylPoint weyl_function(const CanonicalSystem& s, Complex lambda) {
    if (lambda.imag() == 0.0) throw InputError("weyl_function: lambda must be nonreal");
    DecomposingBoundary db = decomposing_triplet(s);
    if (!db.is_triplet)
        throw InputError("weyl_function: system is not definite");
    const Index n = s.n;
    Matrix yb = solution_at_b(s, lambda);
    Matrix data(2 * n, n);
    data.topRows(n) = db.sig.U.adjoint();  // y(a) = I columnwise
    data.bottomRows(n) = db.sig.U.adjoint() * yb;
    Matrix g0b = db.G0 * data;
    Matrix g1b = db.G1 * data;
    WeylPoint out;
    out.lambda = lambda;
    out.condition = condition_number(g0b);
    out.ill_conditioned = (out.condition > 1e10);
    if (!is_invertible(g0b, 1e-13))
        throw InternalError("weyl_function: boundary map singular off the real axis");
    out.m = g1b * g0b.inverse();
    return out;
}

BoundaryCondition assemble_separated(const CanonicalSystem& s,
                                     const SeparatedBlocks& blocks) {
    SignatureData sig = signature_of(s.J);
    const Index dh = sig.dim_h;
    const Index dhh = sig.dim_h_hat;
    const Index ka = blocks.N0a.rows();
    const Index kb = blocks.N0b.rows();
    if (blocks.N0a.cols() != dh || blocks.N1a.cols() != dh || blocks.Nhat_a.cols() != dhh)
        throw InputError("assemble_separated: endpoint-a block shapes do not match");
    if (blocks.N0b.cols() != dh || blocks.N1b.cols() != dh || blocks.Nhat_b.cols() != dhh)
        throw InputError("assemble_separated: endpoint-b block shapes do not match");
    BoundaryCondition bc;
    Matrix ca_blocks = Matrix::Zero(ka + kb, s.n);
    ca_blocks.block(0, 0, ka, dh) = blocks.N0a;
    ca_blocks.block(0, dh, ka, dhh) = blocks.Nhat_a;
    ca_blocks.block(0, dh + dhh, ka, dh) = blocks.N1a;
    Matrix cb_blocks = Matrix::Zero(ka + kb, s.n);
    cb_blocks.block(ka, 0, kb, dh) = blocks.N0b;
    cb_blocks.block(ka, dh, kb, dhh) = blocks.Nhat_b;
    cb_blocks.block(ka, dh + dhh, kb, dh) = blocks.N1b;
    bc.Ca = ca_blocks * sig.U.adjoint();
    bc.Cb = cb_blocks * sig.U.adjoint();
    bc.separated = blocks;
    return bc;
}

namespace {

struct PairRouteData {
    OperatorPair pair;
    ConditionClass cls;
};

PairRouteData pair_route(const CanonicalSystem& s, const Matrix& ca, const Matrix& cb,
                         const Matrix& jb) {
    SignatureData sig = signature_of(s.J);
    SignatureData sigb = signature_of(jb);
    if (sigb.dim_h_hat != sig.dim_h_hat)
        throw InputError("boundary condition: endpoint signature operators have "
                         "incompatible middle blocks");
    if (sig.dim_h_hat > 0 && sigb.delta != sig.delta)
        throw InputError("boundary condition: endpoint signature operators have "
                         "opposite middle-block orientation");
    const Index dh = sig.dim_h;
    const Index dhh = sig.dim_h_hat;
    const Index dhb = sigb.dim_h;
    const double isq = 1.0 / std::sqrt(2.0);
    const Complex idelta(0.0, static_cast<double>(sig.delta));

    Matrix ca_n = ca * sig.U;   // blocks (C0a : Chat_a : C1a)
    Matrix cb_n = cb * sigb.U;  // blocks (C0b : Chat_b : C1b)
    Matrix c0a = ca_n.leftCols(dh), chat_a = ca_n.middleCols(dh, dhh),
           c1a = ca_n.rightCols(dh);
    Matrix c0b = cb_n.leftCols(dhb), chat_b = cb_n.middleCols(dhb, dhh),
           c1b = cb_n.rightCols(dhb);

    const Index m = dh + dhh + dhb;
    Matrix ct0(ca.rows(), m), ct1(ca.rows(), m);
    ct0.leftCols(dh) = c0a;
    ct0.middleCols(dh, dhh) = -idelta * isq * (chat_a - chat_b);
    ct0.rightCols(dhb) = c0b;
    ct1.leftCols(dh) = c1a;
    ct1.middleCols(dh, dhh) = isq * (chat_a + chat_b);
    ct1.rightCols(dhb) = -c1b;

    PairRouteData out{make_pair(BoundarySpacePair{m, m}, ct0, ct1), ConditionClass::None};
    out.cls = condition_class_of_pair(classify_pair(out.pair));
    return out;
}

}  // namespace

ConditionReport classify_boundary_condition(const CanonicalSystem& s,
                                            const BoundaryCondition& bc) {
    require_valid(s);
    NullManifoldData nm = null_manifold(s);
    if (!nm.definite)
        throw InputError("classify_boundary_condition: system is not definite");
    const Index n = s.n;
    Matrix jb = bc.Jb.value_or(s.J);
    const Index nb = jb.rows();
    if (bc.Ca.rows() != bc.Cb.rows() || bc.Ca.cols() != n || bc.Cb.cols() != nb)
        throw InputError("classify_boundary_condition: condition matrices have wrong shapes");
    const Index k = bc.Ca.rows();
    if (k != n)
        throw InputError("classify_boundary_condition: the condition must have n rows");
    Matrix joint(k, n + nb);
    joint.leftCols(n) = bc.Ca;
    joint.rightCols(nb) = bc.Cb;
    if (column_space(Matrix(joint.adjoint())).dim() != k)
        throw InputError("classify_boundary_condition: rank-deficient condition "
                         "(inadmissible)");

    ConditionReport r;

    // Route 1: endpoint sign test on D = i (Ca J Ca^* - Cb Jb Cb^*).
    Matrix caj = bc.Ca * s.J * bc.Ca.adjoint();
    Matrix cbj = bc.Cb * jb * bc.Cb.adjoint();
    Matrix d = Complex(0, 1) * (caj - cbj);
    double dscale = std::max({caj.norm(), cbj.norm(), 1e-30});
    Inertia din = hermitian_inertia(d, 1e-10 * dscale);
    {
        Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (d + d.adjoint())),
                                                 Eigen::EigenvaluesOnly);
        r.d_eigenvalues = es.eigenvalues().reverse();
    }
    // D <= 0 means dissipative: the sign test mirrors 2 Im of the pair form.
    if (din.n_plus == 0 && din.n_minus == 0)
        r.sign_route = ConditionClass::SelfAdjoint;
    else if (din.n_plus == 0)
        r.sign_route = ConditionClass::MaximalDissipative;
    else if (din.n_minus == 0)
        r.sign_route = ConditionClass::MaximalAccumulative;
    else
        r.sign_route = ConditionClass::None;

    // Route 2: operator pair through the decomposing boundary maps.
    r.pair_route = pair_route(s, bc.Ca, bc.Cb, jb).cls;

    // Route 3: inertia of the boundary form on the condition kernel.
    Subspace v = null_space(joint);
    Matrix q = Matrix::Zero(n + nb, n + nb);
    q.topLeftCorner(n, n) = Complex(0, 1) * s.J;    // -(-iJ) on the a-side
    q.bottomRightCorner(nb, nb) = Complex(0, -1) * jb;
    Matrix compressed = v.basis.adjoint() * q * v.basis;
    Inertia fin = hermitian_inertia(compressed, 1e-10 * std::max(1.0, compressed.norm()));
    r.form_route = class_from_inertia(fin);

    if (r.sign_route != r.pair_route || r.sign_route != r.form_route)
        throw InternalError(std::string("classify_boundary_condition: routes disagree: ") +
                            to_string(r.sign_route) + " / " + to_string(r.pair_route) +
                            " / " + to_string(r.form_route));
    r.cls = r.sign_route;
    return r;
}

SeparatedReport classify_separated(const CanonicalSystem& s, const BoundaryCondition& bc,
                                   bool require_self_adjoint) {
    require_valid(s);
    if (!bc.separated)
        throw InputError("classify_separated: condition has no separated blocks");
    SignatureData sig = signature_of(s.J);
    if (require_self_adjoint && sig.nu_plus != sig.nu_minus)
        throw VerificationError(
            "classify_separated: self-adjoint separated conditions exist only when the "
            "signature indices are equal (nu+ = nu-); this system has nu+ = " +
            std::to_string(sig.nu_plus) + ", nu- = " + std::to_string(sig.nu_minus));

    const SeparatedBlocks& blk = *bc.separated;
    SeparatedReport r;
    r.dim_ka = blk.N0a.rows();
    r.dim_kb = blk.N0b.rows();
    const double half_delta = 0.5 * static_cast<double>(sig.delta ? sig.delta : 1);

    r.Sa = imaginary_part(Matrix(blk.N1a * blk.N0a.adjoint())) +
           half_delta * blk.Nhat_a * blk.Nhat_a.adjoint();
    r.Sb = imaginary_part(Matrix(blk.N1b * blk.N0b.adjoint())) +
           half_delta * blk.Nhat_b * blk.Nhat_b.adjoint();
    double sa_thr = 1e-10 * std::max(1.0, r.Sa.norm());
    double sb_thr = 1e-10 * std::max(1.0, r.Sb.norm());
    r.sa_psd = r.Sa.rows() == 0 || min_eigenvalue_hermitian(r.Sa) >= -sa_thr;
    r.sa_nsd = r.Sa.rows() == 0 || min_eigenvalue_hermitian(Matrix(-r.Sa)) >= -sa_thr;
    r.sb_psd = r.Sb.rows() == 0 || min_eigenvalue_hermitian(r.Sb) >= -sb_thr;
    r.sb_nsd = r.Sb.rows() == 0 || min_eigenvalue_hermitian(Matrix(-r.Sb)) >= -sb_thr;

    // Invertibility conditions from the block-triangular shape of the
    // twisted pair: assembled once for the dissipative and once for the
    // accumulative test.
    BoundaryCondition assembled = assemble_separated(s, blk);
    PairRouteData pr = pair_route(s, assembled.Ca, assembled.Cb, s.J);
    Matrix dis_map = pr.pair.c01() - Complex(0, 1) * pr.pair.C1;
    Matrix ac_map = pr.pair.C0 + Complex(0, 1) * pr.pair.C1 * p1_of(pr.pair.spaces);
    r.resolvent_dissipative =
        (dis_map.rows() == dis_map.cols()) && is_invertible(dis_map);
    r.resolvent_accumulative = (ac_map.rows() == ac_map.cols()) && is_invertible(ac_map);

    bool dis = r.sa_psd && r.sb_nsd && r.resolvent_dissipative;
    bool ac = r.sa_nsd && r.sb_psd && r.resolvent_accumulative;
    if (dis && ac)
        r.cls = ConditionClass::SelfAdjoint;
    else if (dis)
        r.cls = ConditionClass::MaximalDissipative;
    else if (ac)
        r.cls = ConditionClass::MaximalAccumulative;
    else
        r.cls = ConditionClass::None;

    r.dims_dissipative_ok =
        !dis || (r.dim_ka == sig.nu_minus &&
                 r.dim_kb == boundary_form_inertia(s).nu_b_minus);
    r.dims_accumulative_ok =
        !ac || (r.dim_ka == sig.nu_plus && r.dim_kb == boundary_form_inertia(s).nu_b_plus);

    if (sig.hamiltonian) {
        // Reduced route: on Hamiltonian systems the separated condition is
        // self-adjoint iff both endpoint pairs are self-adjoint pairs.
        bool a_self = false, b_self = false;
        if (blk.N0a.rows() == sig.dim_h && blk.N0b.rows() == sig.dim_h) {
            OperatorPair ta = make_pair(BoundarySpacePair{sig.dim_h, sig.dim_h}, blk.N0a,
                                        blk.N1a);
            OperatorPair tb = make_pair(BoundarySpacePair{sig.dim_h, sig.dim_h}, blk.N0b,
                                        blk.N1b);
            a_self = classify_pair(ta) == PairClass::Self;
            b_self = classify_pair(tb) == PairClass::Self;
        }
        r.hamiltonian_pairs_self_adjoint = a_self && b_self;
        if ((r.cls == ConditionClass::SelfAdjoint) != (a_self && b_self))
            throw InternalError(
                "classify_separated: reduced endpoint-pair route disagrees with the "
                "assembled classification");
    }

    NullManifoldData nm = null_manifold(s);
    if (nm.definite) {
        ConditionReport full = classify_boundary_condition(s, assembled);
        r.assembled_class = full.cls;
        if (full.cls != r.cls)
            throw InternalError("classify_separated: assembled condition classifies "
                                "differently");
    } else {
        r.assembled_class = r.cls;
    }

    if (require_self_adjoint && r.cls != ConditionClass::SelfAdjoint)
        throw VerificationError("classify_separated: condition is not self-adjoint (class: " +
                         std::string(to_string(r.cls)) + ")");
    return r;
}

SpectrumReport eigenvalues(const CanonicalSystem& s, const BoundaryCondition& bc,
                           double lambda_lo, double lambda_hi, int max_count,
                           int grid_points) {
    require_valid(s);
    ConditionReport cr = classify_boundary_condition(s, bc);
    if (cr.cls != ConditionClass::SelfAdjoint)
        throw VerificationError("eigenvalues: boundary condition is not self-adjoint (class: " +
                         std::string(to_string(cr.cls)) + ")");
    if (bc.Jb && (bc.Jb->rows() != s.n || (*bc.Jb - s.J).norm() > 1e-12))
        throw InputError("eigenvalues: spectral solve requires the endpoint data y(b) "
                         "(Jb = J)");
    if (lambda_hi <= lambda_lo) throw InputError("eigenvalues: empty range");

    auto dip = [&](double lambda) -> double {
        Matrix m = bc.Ca + bc.Cb * solution_at_b(s, Complex(lambda, 0.0));
        return smallest_singular_value(m);
    };

    SpectrumReport rep;
    rep.grid_points = grid_points;
    std::vector<double> grid(static_cast<size_t>(grid_points) + 1);
    std::vector<double> vals(grid.size());
    double scale = 0.0;
    for (size_t k = 0; k < grid.size(); ++k) {
        grid[k] = lambda_lo + (lambda_hi - lambda_lo) * static_cast<double>(k) /
                                  static_cast<double>(grid_points);
        vals[k] = dip(grid[k]);
        scale = std::max(scale, vals[k]);
    }
    double accept = 1e-7 * std::max(scale, 1.0);

    auto golden = [&](double lo, double hi) -> double {
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
        double f1 = dip(x1), f2 = dip(x2);
        while (hi - lo > 1e-10 * std::max(1.0, std::abs(lo) + std::abs(hi))) {
            if (f1 <= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = dip(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = dip(x2);
            }
        }
        return 0.5 * (lo + hi);
    };

    std::vector<EigenvalueHit> hits;
    for (size_t k = 0; k < grid.size(); ++k) {
        bool local_min = true;
        if (k > 0 && vals[k] > vals[k - 1]) local_min = false;
        if (k + 1 < vals.size() && vals[k] > vals[k + 1]) local_min = false;
        if (!local_min) continue;
        if (vals[k] > 0.05 * std::max(scale, 1.0)) continue;  // shallow dip, not a root
        double lo = (k > 0) ? grid[k - 1] : grid[k];
        double hi = (k + 1 < grid.size()) ? grid[k + 1] : grid[k];
        double root = (lo < hi) ? golden(lo, hi) : grid[k];
        double res = dip(root);
        if (res > accept) continue;
        Matrix m = bc.Ca + bc.Cb * solution_at_b(s, Complex(root, 0.0));
        Eigen::JacobiSVD<Matrix> svd(m);
        double mult_thr = std::max(accept, 50.0 * res);
        int mult = 0;
        for (Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) <= mult_thr) ++mult;
        hits.push_back({root, std::max(mult, 1), res});
    }

    std::sort(hits.begin(), hits.end(),
              [](const EigenvalueHit& x, const EigenvalueHit& y) { return x.lambda < y.lambda; });
    for (const EigenvalueHit& h : hits) {
        if (!rep.values.empty() &&
            std::abs(h.lambda - rep.values.back().lambda) <
                1e-8 * std::max(1.0, std::abs(h.lambda))) {
            if (h.residual < rep.values.back().residual) rep.values.back() = h;
            continue;
        }
        if (static_cast<int>(rep.values.size()) >= max_count) {
            rep.truncated = true;
            break;
        }
        rep.values.push_back(h);
    }
    return rep;
}

double lagrange_residual(const CanonicalSystem& s, const SolutionPair& p1,
                         const SolutionPair& p2) {
    require_valid(s);
    const Index n = s.n;
    if (p1.y0.size() != n || p2.y0.size() != n || p1.coeff.size() != n ||
        p2.coeff.size() != n)
        throw InputError("lagrange_residual: vector sizes do not match the system");

    // Augmented state [Z1 | Z2 | y1 | y2]: Z_i are the homogeneous families
    // feeding the right-hand sides f_i = Z_i coeff_i.
    auto rhs = [&](double t, const Matrix& state) -> Matrix {
        Matrix z1 = state.leftCols(n);
        Matrix z2 = state.middleCols(n, n);
        Vector y1 = state.col(2 * n);
        Vector y2 = state.col(2 * n + 1);
        Matrix bm = s.coeff_b(t);
        Matrix dm = s.coeff_delta(t);
        Matrix ji = s.j_inverse();
        Matrix out(n, 2 * n + 2);
        out.leftCols(n) = ji * (bm + p1.mu * dm) * z1;
        out.middleCols(n, n) = ji * (bm + p2.mu * dm) * z2;
        out.col(2 * n) = ji * (bm * y1 + dm * (z1 * p1.coeff));
        out.col(2 * n + 1) = ji * (bm * y2 + dm * (z2 * p2.coeff));
        return out;
    };
    Matrix state0 = Matrix::Zero(n, 2 * n + 2);
    state0.leftCols(n) = Matrix::Identity(n, n);
    state0.middleCols(n, n) = Matrix::Identity(n, n);
    state0.col(2 * n) = p1.y0;
    state0.col(2 * n + 1) = p2.y0;

    OdeOptions opt;
    opt.rel_tol = s.tol.ode_rel;
    opt.abs_tol = s.tol.ode_abs;

    Complex ip1 = 0.0, ip2 = 0.0;
    Complex boundary = 0.0;
    Complex prev1 = 0.0, prev2 = 0.0;
    bool have_prev = false;
    for (int level = 0; level < 6; ++level) {
        int segments = 4 << level;
        std::vector<double> nodes;
        for (const Piece& p : s.pieces) {
            std::vector<double> seg = composite_gl_nodes(p.t0, p.t1, segments);
            nodes.insert(nodes.end(), seg.begin(), seg.end());
        }
        std::vector<double> all = nodes;
        all.push_back(s.b);
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        std::vector<Matrix> states = integrate_rk45(rhs, s.a, s.b, state0, all, opt);

        // Map node -> state
        std::vector<Complex> f1z2, y1f2;
        f1z2.reserve(nodes.size());
        y1f2.reserve(nodes.size());
        size_t cursor = 0;
        Matrix state_b;
        for (size_t idx = 0; idx < all.size(); ++idx) {
            if (all[idx] == s.b) state_b = states[idx];
        }
        for (double t : nodes) {
            auto it = std::lower_bound(all.begin(), all.end(), t);
            const Matrix& st = states[static_cast<size_t>(it - all.begin())];
            Matrix dm = s.coeff_delta(t);
            Vector f1 = st.leftCols(n) * p1.coeff;
            Vector f2 = st.middleCols(n, n) * p2.coeff;
            Vector y1 = st.col(2 * n);
            Vector y2 = st.col(2 * n + 1);
            f1z2.push_back((y2.adjoint() * dm * f1)(0, 0));
            y1f2.push_back((f2.adjoint() * dm * y1)(0, 0));
            (void)cursor;
        }
        Complex i1 = 0.0, i2 = 0.0;
        size_t off = 0;
        for (const Piece& p : s.pieces) {
            size_t cnt = static_cast<size_t>(segments) * gauss_legendre_nodes().size();
            std::vector<Complex> v1(f1z2.begin() + off, f1z2.begin() + off + cnt);
            std::vector<Complex> v2(y1f2.begin() + off, y1f2.begin() + off + cnt);
            i1 += composite_gl_sum(v1, p.t0, p.t1, segments);
            i2 += composite_gl_sum(v2, p.t0, p.t1, segments);
            off += cnt;
        }
        Vector y1b = state_b.col(2 * n), y2b = state_b.col(2 * n + 1);
        Complex form_b = (y2b.adjoint() * s.J * y1b)(0, 0);
        Complex form_a = (p2.y0.adjoint() * s.J * p1.y0)(0, 0);
        boundary = form_b - form_a;
        ip1 = i1;
        ip2 = i2;
        if (have_prev) {
            double drift = std::abs(i1 - prev1) + std::abs(i2 - prev2);
            if (drift <= std::max(1e-11, 1e-9 * (std::abs(i1) + std::abs(i2)))) break;
        }
        prev1 = i1;
        prev2 = i2;
        have_prev = true;
    }
    return std::abs(ip1 - ip2 - boundary);
}

}  // namespace cansys
