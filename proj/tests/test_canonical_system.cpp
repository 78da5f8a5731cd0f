#include "cansys/canonical_system.hpp"
#include "support/systems.hpp"

#include <doctest.h>

using namespace cansys;
using cansys::testing::Rng;

TEST_SUITE_BEGIN("canonical-system");

TEST_CASE("validation accepts the example systems") {
    CHECK(validate_system(testing::free_dirac()).valid);
    CHECK(validate_system(testing::degenerate_weight_system()).valid);
    CHECK(validate_system(testing::mixed_signature_system()).valid);
    Rng rng(71);
    CHECK(validate_system(testing::random_definite_system(4, 1.5, rng)).valid);
}

TEST_CASE("validation rejects a non-signature J") {
    CanonicalSystem s = testing::free_dirac();
    s.J = Matrix::Identity(2, 2);
    ValidationReport r = validate_system(s);
    CHECK(!r.valid);
    CHECK(r.failure.find("J") != std::string::npos);
}

TEST_CASE("validation rejects an indefinite weight") {
    CanonicalSystem s = testing::free_dirac();
    Matrix d(2, 2);
    d << 1, 0, 0, -0.5;
    s.pieces[0].delta = MatrixPolynomial::constant(d);
    CHECK(!validate_system(s).valid);
}

TEST_CASE("validation rejects gaps between pieces") {
    CanonicalSystem s = testing::free_dirac();
    s.pieces[0].t1 = 1.0;  // no longer reaches b
    CHECK(!validate_system(s).valid);
}

TEST_CASE("signature of the standard skew form") {
    SignatureData sig = signature_decompose(testing::free_dirac());
    CHECK(sig.nu_plus == 1);
    CHECK(sig.nu_minus == 1);
    CHECK(sig.delta == 0);
    CHECK(sig.dim_h == 1);
    CHECK(sig.dim_h_hat == 0);
    CHECK(sig.hamiltonian);
    CHECK(sig.normal_form_residual < 1e-12);
}

TEST_CASE("signature of a 1x1 and a mixed 3x3 signature operator") {
    Matrix j1(1, 1);
    j1 << Complex(0, 1);
    SignatureData s1 = signature_of(j1);
    CHECK(s1.nu_plus == 0);
    CHECK(s1.nu_minus == 1);
    CHECK(s1.delta == 1);

    SignatureData s3 = signature_of(testing::mixed_signature_system().J);
    CHECK(s3.nu_plus == 1);
    CHECK(s3.nu_minus == 2);
    CHECK(s3.delta == 1);
    CHECK(s3.dim_h == 1);
    CHECK(s3.dim_h_hat == 1);
    CHECK(!s3.hamiltonian);
}

TEST_CASE("signature is a unitary invariant") {
    Rng rng(72);
    for (int rep = 0; rep < 5; ++rep) {
        Matrix u = testing::random_unitary(3, rng);
        Matrix j = testing::mixed_signature_system().J;
        SignatureData sig = signature_of(Matrix(u * j * u.adjoint()));
        CHECK(sig.nu_plus == 1);
        CHECK(sig.nu_minus == 2);
        CHECK(sig.normal_form_residual < 1e-10);
    }
}

TEST_CASE("fundamental solution of the free Dirac system matches the closed form") {
    CanonicalSystem s = testing::free_dirac();
    FundamentalSolution f = fundamental_solution(s, Complex(1, 0));
    CHECK((f.at_b() + Matrix::Identity(2, 2)).norm() < 1e-9);
    for (size_t k = 0; k < f.grid.size(); ++k) {
        Matrix ref = testing::dirac_closed_form(f.grid[k], Complex(1, 0));
        CHECK((f.values[k] - ref).norm() < 1e-9);
    }

    FundamentalSolution fi = fundamental_solution(s, Complex(0, 1));
    Matrix ref = testing::dirac_closed_form(M_PI, Complex(0, 1));
    CHECK((fi.at_b() - ref).norm() < 1e-8 * ref.norm());
}

TEST_CASE("zero coefficient matrix freezes the solution") {
    CanonicalSystem s = testing::free_dirac();
    FundamentalSolution f = fundamental_solution(s, Complex(0, 0));
    // B = 0, lambda = 0: Y stays the identity.
    for (const Matrix& y : f.values)
        CHECK((y - Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("J-invariance of the fundamental solution") {
    CHECK(j_invariance_residual(testing::free_dirac(), Complex(0, 1)) < 1e-8);
    CHECK(j_invariance_residual(testing::free_dirac(), Complex(1.3, -0.4)) < 1e-8);
    Rng rng(73);
    CanonicalSystem s = testing::random_definite_system(4, 1.0, rng);
    CHECK(j_invariance_residual(s, Complex(0.5, 0.8)) < 1e-8);
}

TEST_CASE("piecewise coefficients are handled across breakpoints") {
    CanonicalSystem s = testing::free_dirac(2.0);
    // Split into two pieces with different constant B.
    Piece p1 = s.pieces[0], p2 = s.pieces[0];
    p1.t1 = 1.0;
    p2.t0 = 1.0;
    Matrix b2 = Matrix::Zero(2, 2);
    b2(0, 0) = 1.0;
    p2.b = MatrixPolynomial::constant(b2);
    s.pieces = {p1, p2};
    REQUIRE(validate_system(s).valid);
    FundamentalSolution f = fundamental_solution(s, Complex(0.7, 0.2));
    CHECK(all_finite(f.at_b()));
    CHECK(j_invariance_residual(s, Complex(0.7, 0.2)) < 1e-8);
}

TEST_SUITE_END();
