// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code = failure count.

#include "cansys/cli.hpp"
#include "cansys/io.hpp"
#include "cansys/spectral.hpp"

#include "support/generators.hpp"
#include "support/model_triplet.hpp"
#include "support/systems.hpp"

#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace cansys;
using cansys::testing::Rng;

namespace {

int failures = 0;

void criterion(int num, const std::string& name, const std::function<void()>& body) {
    try {
        body();
        std::printf("PASS %2d  %s\n", num, name.c_str());
    } catch (const std::exception& e) {
        ++failures;
        std::printf("FAIL %2d  %s\n         %s\n", num, name.c_str(), e.what());
    }
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

BoundaryCondition dirichlet_condition() {
    BoundaryCondition bc;
    bc.Ca = Matrix::Zero(2, 2);
    bc.Ca(0, 0) = 1;
    bc.Cb = Matrix::Zero(2, 2);
    bc.Cb(1, 0) = 1;
    return bc;
}

struct CouplingData {
    Matrix F2, F1, Fp;
};

CouplingData random_coupling(Index h2, Index k1, Index kp, Rng& rng) {
    CouplingData c;
    c.F2 = testing::random_matrix(h2, kp, rng);
    c.F1 = testing::random_matrix(k1, kp, rng);
    Matrix h = testing::random_hermitian(kp, rng);
    c.Fp = h - Complex(0, 0.5) * c.F2.adjoint() * c.F2;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    std::string systems_dir = (argc > 1) ? argv[1] : "systems";
    auto sys_path = [&](const char* name) { return systems_dir + "/" + name; };

    criterion(1, "free-Dirac Dirichlet spectrum = integers in [-10.5, 10.5]", [&] {
        CanonicalSystem s = testing::free_dirac();
        SpectrumReport rep = eigenvalues(s, dirichlet_condition(), -10.5, 10.5);
        require(rep.values.size() == 21,
                "expected 21 eigenvalues, got " + std::to_string(rep.values.size()));
        for (int k = -10; k <= 10; ++k) {
            const EigenvalueHit& h = rep.values[static_cast<size_t>(k + 10)];
            require(std::abs(h.lambda - k) <= 1e-8,
                    "eigenvalue near " + std::to_string(k) + " off by " +
                        fmt(std::abs(h.lambda - k)));
            require(h.multiplicity == 1, "nonsimple eigenvalue reported");
        }
    });

    criterion(2, "free-Dirac Weyl function: closed form, symmetry, Nevanlinna grid", [&] {
        CanonicalSystem s = testing::free_dirac();
        Matrix ref = testing::dirac_weyl_closed_form(Complex(0, 1));
        Matrix m = weyl_function(s, Complex(0, 1)).m;
        require((m - ref).cwiseAbs().maxCoeff() <= 1e-8,
                "M(i) differs from the closed form by " +
                    fmt((m - ref).cwiseAbs().maxCoeff()));
        for (int k = 0; k < 20; ++k) {
            double re = -2.0 + 4.0 * k / 19.0;
            double im = 0.35 + 0.1 * (k % 5);
            for (double sign : {1.0, -1.0}) {
                Complex l(re, sign * im);
                Matrix mp = weyl_function(s, l).m;
                Matrix mc = weyl_function(s, std::conj(l)).m;
                require((mc - mp.adjoint()).norm() <= 1e-9,
                        "conjugation symmetry residual " + fmt((mc - mp.adjoint()).norm()));
                double nev =
                    min_eigenvalue_hermitian(Matrix(imaginary_part(mp) / l.imag()));
                require(nev >= -1e-9, "Nevanlinna eigenvalue bound " + fmt(nev));
            }
        }
    });

    criterion(3, "index bookkeeping: exact integers on free Dirac and the "
                 "degenerate-weight system", [&] {
        IndexBookkeeping fd = index_bookkeeping(testing::free_dirac());
        require(fd.formal.exact && fd.formal.n_plus() == 2 && fd.formal.n_minus() == 2,
                "free Dirac formal indices wrong");
        require(fd.k_n == 0 && fd.n_plus == 2 && fd.n_minus == 2,
                "free Dirac null-manifold bookkeeping wrong");
        require(fd.sum_rule_signature && fd.sum_rule_null, "free Dirac sum rules fail");

        IndexBookkeeping dg = index_bookkeeping(testing::degenerate_weight_system());
        require(dg.k_n == 1, "degenerate system k_N != 1");
        require(dg.formal.n_plus() == 2 && dg.formal.n_minus() == 2,
                "degenerate system N != 2");
        require(dg.n_plus == 1 && dg.n_minus == 1, "degenerate system n != 1");
        require(dg.sum_rule_signature && dg.sum_rule_null,
                "degenerate system sum rules fail");
    });

    criterion(4, "classification concordance on 200 randomized conditions", [&] {
        Rng rng(2026);
        int total = 0;
        for (int sys = 0; sys < 20; ++sys) {
            Index n = (sys % 2) ? 2 : 4;
            CanonicalSystem s = testing::random_definite_system(n, 0.8, rng);
            for (int rep = 0; rep < 10; ++rep) {
                BoundaryCondition bc = testing::random_condition(s, rep % 4, rng);
                Matrix joint(n, 2 * n);
                joint.leftCols(n) = bc.Ca;
                joint.rightCols(n) = bc.Cb;
                if (column_space(Matrix(joint.adjoint())).dim() != n) continue;
                ConditionReport r = classify_boundary_condition(s, bc);
                require(r.sign_route == r.pair_route && r.sign_route == r.form_route,
                        "routes disagree");
                ++total;
            }
        }
        require(total >= 200, "only " + std::to_string(total) + " conditions checked");
    });

    criterion(5, "separated conditions: worked example and impossibility error", [&] {
        CanonicalSystem s = testing::free_dirac();
        SeparatedBlocks blk;
        blk.N0a = Matrix::Identity(1, 1);
        blk.N1a = Matrix::Zero(1, 1);
        blk.Nhat_a = Matrix::Zero(1, 0);
        blk.N0b = Matrix::Identity(1, 1);
        blk.N1b = Matrix::Zero(1, 1);
        blk.N1b(0, 0) = Complex(0, -1);
        blk.Nhat_b = Matrix::Zero(1, 0);
        BoundaryCondition bc;
        bc.separated = blk;
        SeparatedReport r = classify_separated(s, bc);
        require(r.cls == ConditionClass::MaximalDissipative,
                std::string("worked example classified as ") + to_string(r.cls));
        require(std::abs(r.Sa(0, 0)) <= 1e-12 && std::abs(r.Sb(0, 0) + 1.0) <= 1e-12,
                "sign operators differ from the hand computation");
        require(r.assembled_class == ConditionClass::MaximalDissipative,
                "assembled cross-check failed");

        CanonicalSystem mixed = testing::mixed_signature_system();
        SeparatedBlocks mb;
        mb.N0a = Matrix::Identity(1, 1);
        mb.N1a = Matrix::Zero(1, 1);
        mb.Nhat_a = Matrix::Zero(1, 1);
        mb.N0b = Matrix::Identity(1, 1);
        mb.N1b = Matrix::Zero(1, 1);
        mb.Nhat_b = Matrix::Zero(1, 1);
        BoundaryCondition mbc;
        mbc.separated = mb;
        bool threw = false;
        try {
            classify_separated(mixed, mbc, true);
        } catch (const VerificationError&) {
            threw = true;
        }
        require(threw, "impossibility error not raised for unequal signature indices");
    });

    criterion(6, "abstract layer: 100 randomized boundary relations", [&] {
        Rng rng(777);
        int total = 0;
        int gamma_checked = 0;
        for (int rep = 0; rep < 100; ++rep) {
            Index d = 3 + (rep % 4);              // model dimension up to 6
            Index dom = 1 + (rep % 2);
            Index mul = (rep / 2) % 2;
            if (dom + mul + 1 > d) dom = 1;
            Index kp = rep % 3;
            Index kpp = (rep % 2 == 0) ? 0 : (rep / 3) % 2;
            LinearRelation a = testing::random_symmetric_relation(d, dom, mul, rng);
            BoundaryTriplet t = testing::von_neumann_triplet(a, rng);
            CouplingData c = random_coupling(t.spaces.h2(), t.spaces.h1, kp, rng);
            BoundaryRelation br = assemble(t, c.F2, c.F1, c.Fp, kpp);

            BoundaryRelationReport vr = verify_boundary_relation(br);
            require(vr.valid, "assembled relation failed verification: " + vr.failure);

            DeficiencyData dd = deficiency_indices(br.base);
            MulStructure ms = multivalued_structure(br);
            require(br.spaces.h0 == dd.n_plus + ms.n_gamma,
                    "dim H0 != n+ + dim mul Gamma");
            require(br.spaces.h1 == dd.n_minus + ms.n_gamma,
                    "dim H1 != n- + dim mul Gamma");

            GammaDecomposition dec = decompose(br);
            BoundaryRelation round = reassemble(br.base, dec, br.spaces);
            require(relations_equal(round.gamma, br.gamma),
                    "decompose/assemble round trip failed");

            Complex l(0.3 + 0.1 * (rep % 5), 0.8 + 0.1 * (rep % 3));
            WeylFamilySample w = weyl_family(br, l);
            require(w.route_residual <= 1e-9,
                    "block Weyl formula residual " + fmt(w.route_residual));

            if (kpp == 0) {
                Complex mu(0.1, 1.1);
                WeylFamilySample wmu = weyl_family(br, mu);
                Matrix lhs = wmu.calM - w.calM.adjoint();
                Matrix rhs = (mu - std::conj(l)) * w.gamma_plus.adjoint() * wmu.gamma_plus;
                require((lhs - rhs).norm() <= 1e-9,
                        "gamma-field identity residual " + fmt((lhs - rhs).norm()));
                ++gamma_checked;
            }
            ++total;
        }
        require(total >= 100, "fewer than 100 relations checked");
        require(gamma_checked >= 40, "too few gamma-field identity checks");
    });

    criterion(7, "model triplet verifies and M(lambda) = lambda - 1/lambda", [&] {
        BoundaryTriplet t = testing::model_triplet();
        TripletReport r = verify_triplet(t);
        require(r.valid, "model triplet failed verification: " + r.failure);
        for (int k = 0; k < 10; ++k) {
            Complex l(-1.4 + 0.3 * k, 0.6 + 0.15 * k);
            Complex expected = l - 1.0 / l;
            Complex got = weyl(t, l).m(0, 0);
            require(std::abs(got - expected) <= 1e-10,
                    "Weyl value off by " + fmt(std::abs(got - expected)));
        }
    });

    criterion(8, "numerical invariants across the example corpus", [&] {
        struct Case {
            CanonicalSystem s;
            Complex lambda;
        };
        std::vector<Case> corpus = {
            {testing::free_dirac(), Complex(0, 1)},
            {testing::degenerate_weight_system(), Complex(0.5, 0.7)},
            {testing::mixed_signature_system(), Complex(-0.3, 1.2)},
            // For the long truncation, sample spectral parameters whose
            // imaginary part keeps the solution magnitudes representable.
            {testing::free_dirac_truncated(40.0), Complex(1.0, 0.02)},
        };
        Rng rng(31415);
        corpus.push_back({testing::random_definite_system(4, 1.5, rng), Complex(0.4, 0.9)});

        for (const Case& c : corpus) {
            double jres = j_invariance_residual(c.s, c.lambda);
            require(jres <= 1e-8, "J-invariance residual " + fmt(jres));

            SolutionPair p1, p2;
            p1.y0 = Vector::Zero(c.s.n);
            p1.y0(0) = 1;
            p1.mu = c.lambda;
            p1.coeff = c.lambda * p1.y0;
            p2.y0 = Vector::Zero(c.s.n);
            p2.y0(c.s.n - 1) = Complex(0.4, 0.2);
            p2.mu = std::conj(c.lambda);
            p2.coeff = std::conj(c.lambda) * p2.y0;
            double lres = lagrange_residual(c.s, p1, p2);
            require(lres <= 1e-8, "Lagrange residual " + fmt(lres));

            SolutionPair q1;
            q1.y0 = Vector::Ones(c.s.n);
            q1.mu = Complex(0.2, 0.1);
            q1.coeff = Vector::Ones(c.s.n);
            double lres2 = lagrange_residual(c.s, q1, q1);
            require(lres2 <= 1e-8, "inhomogeneous Lagrange residual " + fmt(lres2));

            DecomposingBoundary db = decomposing_triplet(c.s);
            require(db.green_residual <= 1e-10,
                    "decomposing-map Green residual " + fmt(db.green_residual));
        }
    });

    criterion(9, "truncated free Dirac reports N = (1, 1) with the truncation tag", [&] {
        FormalIndices fi = formal_deficiency_indices(testing::free_dirac_truncated(40.0));
        require(fi.method == "truncation-heuristic", "method tag missing");
        require(fi.conclusive(), "heuristic inconclusive");
        require(fi.n_plus() == 1 && fi.n_minus() == 1,
                "expected (1, 1), got (" + std::to_string(fi.n_plus()) + ", " +
                    std::to_string(fi.n_minus()) + ")");
    });

    criterion(10, "CLI reports are byte-stable across runs", [&] {
        const std::vector<std::string> systems = {"dirac_pi.json", "dirac_trunc40.json",
                                                  "degenerate_weight.json", "mixed3.json",
                                                  "ham4.json"};
        auto run_once = [&](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            run_cli(args, out, err);
            return out.str();
        };
        for (const std::string& sys : systems) {
            for (const char* cmd : {"validate", "signature", "indices"}) {
                std::vector<std::string> args = {cmd, "--system", sys_path(sys.c_str())};
                std::string first = run_once(args);
                std::string second = run_once(args);
                require(!first.empty(), std::string(cmd) + " produced no output for " + sys);
                require(first == second,
                        std::string(cmd) + " output unstable for " + sys);
            }
        }
        std::vector<std::string> cls = {"classify-bc", "--system", sys_path("dirac_pi.json"),
                                        "--bc", sys_path("bc_dissipative.json")};
        require(run_once(cls) == run_once(cls), "classify-bc output unstable");
        std::vector<std::string> spec = {"spectrum",  "--system",
                                         sys_path("dirac_pi.json"), "--bc",
                                         sys_path("bc_dirichlet.json"), "--range",
                                         "-3.5,3.5"};
        require(run_once(spec) == run_once(spec), "spectrum output unstable");
    });

    if (failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) failed\n", failures);
    return failures;
}
