#include "cansys/boundary_triplet.hpp"
#include "support/generators.hpp"
#include "support/model_triplet.hpp"

#include <doctest.h>

using namespace cansys;
using cansys::testing::Rng;

TEST_SUITE_BEGIN("boundary-triplet");

TEST_CASE("the model triplet verifies") {
    BoundaryTriplet t = testing::model_triplet();
    TripletReport r = verify_triplet(t);
    CHECK(r.valid);
    CHECK(r.green_residual <= 1e-10);
    CHECK(t.spaces.h0 == 1);
    CHECK(t.spaces.h1 == 1);
}

TEST_CASE("swapping (G0, G1) to (G1, -G0) preserves the Green identity") {
    BoundaryTriplet t = testing::model_triplet();
    BoundaryTriplet s = make_triplet(t.base, t.adjoint_basis, t.spaces, t.G1, Matrix(-t.G0));
    CHECK(verify_triplet(s).valid);
}

TEST_CASE("equal boundary maps fail the Green identity") {
    BoundaryTriplet t = testing::model_triplet();
    BoundaryTriplet bad = t;
    bad.G1 = bad.G0;
    TripletReport r = verify_triplet(bad);
    CHECK(!r.valid);
    CHECK(r.failure == "Green identity residual above tolerance");
}

TEST_CASE("random von Neumann triplets verify") {
    Rng rng(41);
    for (int rep = 0; rep < 15; ++rep) {
        Index d = 3 + (rep % 3);
        LinearRelation a = testing::random_symmetric_relation(d, 1 + (rep % 2), rep % 2, rng);
        BoundaryTriplet t = testing::von_neumann_triplet(a, rng);
        TripletReport r = verify_triplet(t);
        CHECK(r.valid);
    }
}

TEST_CASE("extensions from pairs sit between A and A* and match the pair class") {
    BoundaryTriplet t = testing::model_triplet();

    Matrix c0(1, 1), c1(1, 1);
    c0 << 1;
    c1 << 0;
    LinearRelation a0 = extension_from_pair(t, make_pair(t.spaces, c0, c1));
    CHECK(a0.dim() == 2);
    CHECK(classify(a0) == RelationClass::SelfAdjoint);
    // ker Gamma0 = {((f1,0),(0,f3))}
    Vector v(4);
    v << 1, 0, 0, -2;
    CHECK(a0.graph.contains(v));

    c1 << Complex(0, 1);
    LinearRelation ad = extension_from_pair(t, make_pair(t.spaces, c0, c1));
    CHECK(classify(ad) == RelationClass::MaximalDissipative);

    Matrix z = Matrix::Zero(1, 1);
    CHECK_THROWS_AS(extension_from_pair(t, make_pair(t.spaces, z, z)), InputError);
}

TEST_CASE("extension bijection over random pairs") {
    Rng rng(42);
    LinearRelation a = testing::random_symmetric_relation(4, 1, 1, rng);
    BoundaryTriplet t = testing::von_neumann_triplet(a, rng);
    REQUIRE(verify_triplet(t).valid);
    const Index h = t.spaces.h0;
    for (int rep = 0; rep < 10; ++rep) {
        OperatorPair p = make_pair(t.spaces, testing::random_matrix(h, h, rng),
                                   testing::random_matrix(h, h, rng));
        OperatorPair q = make_pair(t.spaces, testing::random_matrix(h, h, rng),
                                   testing::random_matrix(h, h, rng));
        if (!is_admissible(p) || !is_admissible(q)) continue;
        LinearRelation ep = extension_from_pair(t, p);
        LinearRelation eq = extension_from_pair(t, q);
        CHECK(ep.graph.contains(a.graph));
        CHECK(relations_equal(ep, eq) == pairs_equivalent(p, q));
    }
}

TEST_CASE("ker Gamma0 is maximal symmetric with trivial lower defect") {
    Rng rng(43);
    for (int rep = 0; rep < 8; ++rep) {
        LinearRelation a = testing::random_symmetric_relation(4, 1, rep % 2, rng);
        BoundaryTriplet t = testing::von_neumann_triplet(a, rng);
        Subspace coords = null_space(t.G0);
        LinearRelation a0 = LinearRelation::from_span(
            4, 4, Matrix(t.adjoint_basis * coords.basis));
        CHECK(defect(a0, Complex(0, -1)).dim() == 0);
    }
}

TEST_CASE("model Weyl function is lambda - 1/lambda") {
    BoundaryTriplet t = testing::model_triplet();
    auto closed_form = [](Complex l) { return l - 1.0 / l; };
    Complex i(0, 1);
    WeylSample w1 = weyl(t, i);
    CHECK(std::abs(w1.m(0, 0) - Complex(0, 2)) < 1e-12);
    WeylSample w2 = weyl(t, 2.0 * i);
    CHECK(std::abs(w2.m(0, 0) - Complex(0, 2.5)) < 1e-12);
    for (int k = 0; k < 6; ++k) {
        Complex l(0.3 * k - 1.0, 0.7 + 0.2 * k);
        CHECK(std::abs(weyl(t, l).m(0, 0) - closed_form(l)) < 1e-10);
    }
}

TEST_CASE("conjugation symmetry is a genuine cross-check") {
    BoundaryTriplet t = testing::model_triplet();
    Complex l(1, 1);
    Matrix mp = weyl(t, l).m;
    Matrix mm = weyl(t, std::conj(l)).m;
    CHECK((mm - mp.adjoint()).norm() < 1e-10);
}

TEST_CASE("weyl rejects real lambda") {
    CHECK_THROWS_AS(weyl(testing::model_triplet(), Complex(1, 0)), InputError);
}

TEST_CASE("Nevanlinna property on a random triplet") {
    Rng rng(44);
    LinearRelation a = testing::random_symmetric_relation(4, 2, 0, rng);
    BoundaryTriplet t = testing::von_neumann_triplet(a, rng);
    for (int k = 0; k < 10; ++k) {
        Complex l(-1.0 + 0.4 * k, (k % 2) ? 0.8 : -1.3);
        Matrix m = weyl(t, l).m;
        Matrix im = imaginary_part(m) / l.imag();
        CHECK(min_eigenvalue_hermitian(im) >= -1e-9);
    }
}

TEST_CASE("gamma-field identity M(mu) - M(lambda)^* = (mu - conj(lambda)) gamma(lambda)^H gamma(mu)") {
    Rng rng(45);
    LinearRelation a = testing::random_symmetric_relation(5, 2, 0, rng);
    BoundaryTriplet t = testing::von_neumann_triplet(a, rng);
    for (int rep = 0; rep < 6; ++rep) {
        Complex mu(0.3 * rep - 1.0, 0.5 + 0.2 * rep);
        Complex la(1.0 - 0.4 * rep, 1.5 - 0.1 * rep);
        WeylSample wm = weyl(t, mu);
        WeylSample wl = weyl(t, la);
        Matrix lhs = wm.m - wl.m.adjoint();
        Matrix rhs = (mu - std::conj(la)) * wl.gamma.adjoint() * wm.gamma;
        CHECK((lhs - rhs).norm() < 1e-9);
    }
}

TEST_SUITE_END();
