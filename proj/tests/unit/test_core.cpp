#include "doctest.h"

#include "randsmooth/core.hpp"

#include <cmath>
#include <limits>

using namespace randsmooth;

TEST_CASE("norm examples") {
  CHECK(norm(Vector{{3.0, 4.0}}, Norm::l2()) == doctest::Approx(5.0));
  CHECK(norm(Vector{{1.0, -2.0, 3.0}}, Norm::l1()) == doctest::Approx(6.0));
  CHECK(norm(Vector{{1.0, -2.0, 3.0}}, Norm::linf()) == doctest::Approx(3.0));
  CHECK(norm(Vector{{1.0, 1.0}}, Norm::lp(1.5)) == doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("lp norm survives entries whose p-th power overflows") {
  const Vector v = Vector::Constant(3, 1e200);
  CHECK(norm(v, Norm::lp(4.0)) == doctest::Approx(1e200 * std::pow(3.0, 0.25)));
  CHECK(norm(Vector::Zero(4), Norm::lp(1.5)) == 0.0);
}

TEST_CASE("norm rejects non-finite input and p <= 1") {
  Vector v{{1.0, std::numeric_limits<double>::quiet_NaN()}};
  CHECK_THROWS_AS(norm(v, Norm::l2()), NumericError);
  v[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(norm(v, Norm::l1()), NumericError);
  CHECK_THROWS_AS(norm(Vector{{1.0}}, Norm::lp(1.0)), ConfigError);
}

TEST_CASE("dual norms satisfy Hoelder with equality at the aligned vector") {
  const Vector x{{0.3, -1.2, 2.0, 0.5}};
  for (double p : {1.1, 1.5, 2.0, 3.0}) {
    const Norm n = Norm::lp(p);
    const double q = conjugate_exponent(p);
    CHECK(n.dual().p == doctest::Approx(q));
    // y_j = sign(x_j)|x_j|^{p-1} attains <x, y> = ||x||_p ||y||_q
    const Vector y = (x.array().sign() * x.array().abs().pow(p - 1.0)).matrix();
    CHECK(x.dot(y) == doctest::Approx(norm(x, n) * norm(y, n.dual())).epsilon(1e-12));
  }
  CHECK(Norm::l1().dual().kind == NormKind::linf);
  CHECK(Norm::linf().dual().kind == NormKind::l1);
  CHECK(Norm::l2().dual().kind == NormKind::l2);
}

TEST_CASE("sign(0) is 0") {
  CHECK(sign(0.0) == 0.0);
  CHECK(sign(-0.0) == 0.0);
  CHECK(sign(-2.5) == -1.0);
  CHECK(sign(1e-300) == 1.0);
}

TEST_CASE("SymMatrix packing") {
  Matrix M(3, 3);
  M << 1, 2, 3,
       2, 5, 6,
       3, 6, 9;
  const SymMatrix S = SymMatrix::from_dense(M);
  CHECK(S.packed().size() == 6);
  CHECK(S.to_dense().isApprox(M));
  CHECK(S(0, 2) == 3.0);
  CHECK(S(2, 0) == 3.0);
  CHECK(S.trace() == doctest::Approx(15.0));
  CHECK(S.packed()[packed_index(0, 1)] == doctest::Approx(2.0 * std::sqrt(2.0)));

  SUBCASE("inner product of packings is tr(AB)") {
    Matrix B = Matrix::Random(3, 3);
    B = (B + B.transpose()).eval();
    CHECK(S.packed().dot(SymMatrix::from_dense(B).packed()) == doctest::Approx((M * B).trace()));
  }
  SUBCASE("only the upper triangle is read") {
    Matrix U = M;
    U(2, 0) = -100.0;
    CHECK(SymMatrix::from_dense(U).to_dense().isApprox(M));
  }
  SUBCASE("sizes") {
    CHECK(SymMatrix::packed_size(100) == 5050);
    CHECK(SymMatrix::dim_from_packed(5050) == 100);
    CHECK(SymMatrix::dim_from_packed(1) == 1);
    CHECK_THROWS_AS(SymMatrix::dim_from_packed(5), ConfigError);
    CHECK_THROWS_AS(SymMatrix(3, Vector::Zero(5)), ConfigError);
  }
}
