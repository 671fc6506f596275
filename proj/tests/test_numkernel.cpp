#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace affirr;
using namespace testing_support;
using Catch::Approx;

namespace {

  // Random matrix of exact rank r with well separated singular values.
  template <Scalar S>
  Mat<S> low_rank(Eigen::Index m, Eigen::Index n, Eigen::Index r, Rng& rng) {
    Mat<S> u = random_unitary<S>(m, rng).leftCols(r);
    Mat<S> v = random_unitary<S>(n, rng).leftCols(r);
    Vec<S> s(r);
    for (Eigen::Index i = 0; i < r; ++i) {
      s(i) = uniform(rng, 0.5, 3.0);
    }
    return u * s.asDiagonal() * v.adjoint();
  }

  template <Scalar S>
  double orthonormality_defect(Mat<S> const& q) {
    return (q.adjoint() * q - Mat<S>::Identity(q.cols(), q.cols())).norm();
  }

}  // namespace

TEMPLATE_TEST_CASE("random unitaries are unitary", "[numkernel]", double, complex_t) {
  Rng rng(21);
  for (Eigen::Index n = 1; n <= 6; ++n) {
    Mat<TestType> q = random_unitary<TestType>(n, rng);
    CHECK(orthonormality_defect(q) < 1e-12);
  }
}

TEMPLATE_TEST_CASE("null space, range and rank agree with LU", "[numkernel]", double, complex_t) {
  using S = TestType;
  Rng rng(22);
  for (int trial = 0; trial < 60; ++trial) {
    Eigen::Index m = 1 + static_cast<Eigen::Index>(pick(rng, 6));
    Eigen::Index n = 1 + static_cast<Eigen::Index>(pick(rng, 6));
    Eigen::Index r = static_cast<Eigen::Index>(pick(rng, static_cast<std::size_t>(std::min(m, n)) + 1));
    Mat<S>       a = low_rank<S>(m, n, r, rng);

    // Reference rank from a different decomposition.
    Eigen::FullPivLU<Mat<S>> lu(a);
    lu.setThreshold(1e-9);
    CHECK(numerical_rank<S>(a) == lu.rank());
    CHECK(lu.rank() == r);

    Mat<S> k = null_space_basis<S>(a);
    CHECK(k.cols() == n - r);
    if (k.cols() > 0) {
      CHECK(orthonormality_defect(k) < 1e-10);
      CHECK((a * k).norm() < 1e-10);
    }
    Mat<S> im = range_basis<S>(a);
    CHECK(im.cols() == r);
    // Columns of a lie in the range.
    CHECK((a - im * (im.adjoint() * a)).norm() < 1e-10 * (1.0 + a.norm()));
  }
}

TEST_CASE("rank decisions are relative to the largest singular value", "[numkernel]") {
  Mat<double> a = Mat<double>::Zero(3, 3);
  a(0, 0) = 1e6;
  a(1, 1) = 1e-3;  // 1e-9 relative: below the default cutoff
  a(2, 2) = 1.0;
  CHECK(numerical_rank<double>(a) == 2);
  ToleranceProfile loose{.rank = 1e-10, .residual = 1e-8, .eig = 1e-8};
  CHECK(numerical_rank<double>(a, loose) == 3);
  CHECK(numerical_rank<double>(Mat<double>::Zero(2, 2)) == 0);
  CHECK(null_space_basis<double>(Mat<double>::Zero(2, 3)).cols() == 3);
  CHECK(null_space_basis<double>(Mat<double>(0, 2)).cols() == 2);
  CHECK(range_basis<double>(Mat<double>(3, 0)).cols() == 0);
}

TEST_CASE("a scale floor keeps roundoff out of the rank", "[numkernel]") {
  // What pi(s) - I looks like when pi(s) is the identity up to rounding.
  Mat<double> noise(2, 2);
  noise << 1.1e-16, -3e-17, 2e-17, 8e-16;
  CHECK(numerical_rank<double>(noise) == 2);
  CHECK(numerical_rank<double>(noise, {}, 1.0) == 0);
  CHECK(null_space_basis<double>(noise, {}, 1.0).cols() == 2);
  CHECK(range_basis<double>(noise, {}, 1.0).cols() == 0);
  auto sol = solve_affine_system<double>(noise, Vec<double>::Zero(2), {}, 1.0);
  REQUIRE(sol.has_value());
  CHECK(sol->homogeneous.cols() == 2);
  // The floor never lowers the cutoff below the relative one.
  Mat<double> big = Mat<double>::Identity(2, 2) * 1e6;
  big(1, 1) = 1e-3;
  CHECK(numerical_rank<double>(big, {}, 1.0) == 1);
}

TEMPLATE_TEST_CASE("affine systems match the complete orthogonal decomposition", "[numkernel]",
                   double, complex_t) {
  using S = TestType;
  Rng rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    Eigen::Index m = 1 + static_cast<Eigen::Index>(pick(rng, 6));
    Eigen::Index n = 1 + static_cast<Eigen::Index>(pick(rng, 6));
    Eigen::Index r = 1 + static_cast<Eigen::Index>(pick(rng, static_cast<std::size_t>(std::min(m, n))));
    Mat<S>       a = low_rank<S>(m, n, r, rng);
    bool         consistent = pick(rng, 2) == 0;
    Vec<S>       c = consistent ? Vec<S>(a * random_vector<S>(n, rng)) : random_vector<S>(m, rng);

    Eigen::CompleteOrthogonalDecomposition<Mat<S>> cod(a);
    cod.setThreshold(1e-9);
    Vec<S> ref = cod.solve(c);
    bool   solvable = (a * ref - c).norm() <= 1e-8 * (1.0 + c.norm());

    auto sol = solve_affine_system<S>(a, c);
    REQUIRE(sol.has_value() == solvable);
    if (consistent) {
      CHECK(solvable);
    }
    if (sol) {
      // Both are the minimum-norm solution.
      CHECK((sol->particular - ref).norm() < 1e-8 * (1.0 + ref.norm()));
      CHECK(sol->homogeneous.cols() == n - r);
      CHECK((a * sol->homogeneous).norm() < 1e-10);
    }
  }
  CHECK_THROWS_AS(solve_affine_system<S>(Mat<S>::Zero(2, 2), Vec<S>::Zero(3)),
                  std::invalid_argument);
}

TEST_CASE("hermitian eigensystem clusters repeated eigenvalues", "[numkernel]") {
  Rng            rng(24);
  Mat<complex_t> u = random_unitary<complex_t>(5, rng);
  Vec<complex_t> ev(5);
  ev << 2.0, -1.0, 2.0 + 1e-12, 0.5, -1.0;
  Mat<complex_t> h = u * ev.asDiagonal() * u.adjoint();
  auto           cl = hermitian_eigensystem<complex_t>(h);
  REQUIRE(cl.size() == 3);
  CHECK(cl[0].value == Approx(-1.0));
  CHECK(cl[0].basis.cols() == 2);
  CHECK(cl[1].value == Approx(0.5));
  CHECK(cl[2].value == Approx(2.0));
  CHECK(cl[2].basis.cols() == 2);
  for (auto const& c : cl) {
    CHECK((h * c.basis - c.value * c.basis).norm() < 1e-10);
  }
  Mat<complex_t> skew = Mat<complex_t>::Zero(2, 2);
  skew(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eigensystem<complex_t>(skew), PreconditionError);
  CHECK(hermitian_eigensystem<complex_t>(Mat<complex_t>(0, 0)).empty());
}

TEMPLATE_TEST_CASE("kron and vec identities", "[numkernel]", double, complex_t) {
  using S = TestType;
  Rng rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    Mat<S> a = random_matrix<S>(3, 2, rng);
    Mat<S> x = random_matrix<S>(2, 4, rng);
    Mat<S> b = random_matrix<S>(4, 3, rng);
    // vec(A X B) = (B^T (x) A) vec(X)
    Vec<S> lhs = vec<S>(Mat<S>(a * x * b));
    Vec<S> rhs = kron<S>(b.transpose(), a) * vec<S>(x);
    CHECK((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    CHECK(unvec<S>(vec<S>(x), 2, 4) == x);
  }
}

TEST_CASE("spectral norm and projector", "[numkernel]") {
  Mat<double> a(2, 2);
  a << 3, 0, 0, -4;
  CHECK(spectral_norm(a) == Approx(4.0));
  CHECK(spectral_norm(Mat<double>(0, 0)) == 0.0);
  Rng         rng(26);
  Mat<double> q = random_unitary<double>(4, rng).leftCols(2);
  Mat<double> p = projector<double>(q, 4);
  CHECK((p * p - p).norm() < 1e-12);
  CHECK(p.trace() == Approx(2.0));
  CHECK(projector<double>(Mat<double>(4, 0), 4).norm() == 0.0);
}

TEST_CASE("tolerance profile validation", "[numkernel]") {
  CHECK_NOTHROW(ToleranceProfile{}.validate());
  CHECK_THROWS_AS((ToleranceProfile{.rank = 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ToleranceProfile{.residual = 0.5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ToleranceProfile{.eig = -1e-9}.validate()), std::invalid_argument);
}
