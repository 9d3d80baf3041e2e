#include <doctest.h>

#include "../support/oracles.hpp"
#include "g2pinch/errors.hpp"
#include "g2pinch/g2core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>

using namespace g2pinch;

TEST_CASE("basis forms carry the permutation sign") {
  CHECK(approx_equal(KForm::basis({2, 1}), -1.0 * KForm::basis({1, 2}), 0.0));
  CHECK(KForm::basis({3, 3}).is_zero(0.0));
  CHECK(KForm::basis({1, 2, 7}).coeff(0b1000011) == 1.0);
  CHECK_THROWS_AS(KForm::basis({0, 1}), ValidationError);
}

TEST_CASE("wedge examples") {
  CHECK(approx_equal(wedge(KForm::basis({1}), KForm::basis({2})), KForm::basis({1, 2}), 0.0));
  CHECK(wedge(KForm::basis({1, 2}), KForm::basis({1, 2})).is_zero(0.0));
  CHECK(approx_equal(wedge(standard_phi(), hodge(standard_phi())), 7.0 * volume_form(), 1e-14));
}

TEST_CASE("wedge past the top degree vanishes and is flagged") {
  const WedgeResult r = wedge_checked(standard_phi(), standard_psi() + KForm(4));
  CHECK_FALSE(r.vanishes_by_degree);
  const WedgeResult over = wedge_checked(KForm::basis({1, 2, 3, 4}), standard_psi() + standard_psi());
  CHECK(over.vanishes_by_degree);
  CHECK(over.form.degree() == 7);
  CHECK(over.form.is_zero(0.0));
}

TEST_CASE("NaN input to wedge is rejected") {
  KForm a = KForm::basis({1});
  a[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(wedge(a, KForm::basis({2})), ValidationError);
}

TEST_CASE("wedge agrees with the permutation-sum evaluation") {
  oracle::Random rng(11);
  for (int k = 0; k <= 4; ++k)
    for (int l = 0; k + l <= 5; ++l) {
      const KForm a = rng.form(k), b = rng.form(l);
      std::vector<Vec7> v;
      for (int i = 0; i < k + l; ++i) v.push_back(rng.vector());
      CHECK(oracle::evaluate(wedge(a, b), v) == doctest::Approx(oracle::evaluate_wedge(a, b, v)).epsilon(1e-11));
    }
}

TEST_CASE("wedge is associative and graded commutative") {
  oracle::Random rng(12);
  for (int k = 0; k <= 3; ++k)
    for (int l = 0; l <= 3; ++l) {
      const KForm a = rng.form(k), b = rng.form(l), c = rng.form(1);
      const double sign = (k * l) % 2 ? -1.0 : 1.0;
      CHECK(approx_equal(wedge(a, b), sign * wedge(b, a), 1e-12));
      CHECK(approx_equal(wedge(wedge(a, b), c), wedge(a, wedge(b, c)), 1e-12));
    }
}

TEST_CASE("hodge star conventions") {
  CHECK(approx_equal(hodge(KForm::scalar(1.0)), volume_form(), 0.0));
  CHECK(approx_equal(hodge(KForm::basis({1, 2, 7})), KForm::basis({3, 4, 5, 6}), 0.0));
  oracle::Random rng(13);
  for (int k = 0; k <= 7; ++k) {
    const KForm a = rng.form(k), b = rng.form(k);
    CHECK(approx_equal(hodge(hodge(a)), a, 1e-12));
    CHECK(approx_equal(wedge(a, hodge(b)), form_inner(a, b) * volume_form(), 1e-12));
    CHECK(approx_equal(wedge(a, hodge(b)), wedge(b, hodge(a)), 1e-12));
  }
}

TEST_CASE("form_inner") {
  CHECK(form_inner(standard_phi(), standard_phi()) == 7.0);
  CHECK(form_inner(KForm::basis({1, 2}), KForm::basis({1, 3})) == 0.0);
  CHECK_THROWS_AS(form_inner(KForm::basis({1}), KForm::basis({1, 2})), ValidationError);
}

TEST_CASE("interior product") {
  CHECK(approx_equal(interior(Vec7::Unit(0), KForm::basis({1, 2})), KForm::basis({2}), 0.0));
  const KForm expected = KForm::basis({1, 2}) + KForm::basis({3, 4}) + KForm::basis({5, 6});
  CHECK(approx_equal(interior(Vec7::Unit(6), standard_phi()), expected, 1e-15));
  CHECK(interior(Vec7::Unit(0), KForm::scalar(3.0)).is_zero(0.0));

  oracle::Random rng(14);
  for (int k = 1; k <= 7; ++k) {
    const KForm a = rng.form(k);
    const Vec7 x = rng.vector();
    CHECK(interior(x, interior(x, a)).is_zero(1e-12));
    std::vector<Vec7> rest;
    for (int i = 1; i < k; ++i) rest.push_back(rng.vector());
    std::vector<Vec7> full{x};
    full.insert(full.end(), rest.begin(), rest.end());
    CHECK(oracle::evaluate(interior(x, a), rest) == doctest::Approx(oracle::evaluate(a, full)).epsilon(1e-11));
  }
}

TEST_CASE("gl_pullback conventions") {
  oracle::Random rng(15);
  const KForm a = rng.form(3);
  CHECK(approx_equal(gl_pullback(Mat7::Identity(), a), a, 0.0));
  CHECK(approx_equal(gl_pullback(2.0 * Mat7::Identity(), a, PullbackConvention::inverse), a * 0.125, 1e-14));
  CHECK_THROWS_AS(gl_pullback(Mat7::Zero(), a, PullbackConvention::inverse), ValidationError);

  const Mat7 g = rng.invertible(), h = rng.invertible();
  // inverse convention is a left action, raw pullback a right action
  CHECK(approx_equal(gl_pullback(g * h, a, PullbackConvention::inverse),
                     gl_pullback(g, gl_pullback(h, a, PullbackConvention::inverse), PullbackConvention::inverse),
                     1e-10));
  CHECK(approx_equal(gl_pullback(g * h, a), gl_pullback(h, gl_pullback(g, a)), 1e-10));

  // raw pullback evaluated directly
  std::vector<Vec7> v{rng.vector(), rng.vector(), rng.vector()};
  std::vector<Vec7> hv{h * v[0], h * v[1], h * v[2]};
  CHECK(oracle::evaluate(gl_pullback(h, a), v) == doctest::Approx(oracle::evaluate(a, hv)).epsilon(1e-11));
}

TEST_CASE("orthogonal pullback commutes with hodge") {
  oracle::Random rng(16);
  const Mat7 q = rng.orthogonal();
  for (int k = 0; k <= 7; ++k) {
    const KForm a = rng.form(k);
    CHECK(approx_equal(hodge(gl_pullback(q, a, PullbackConvention::inverse)),
                       gl_pullback(q, hodge(a), PullbackConvention::inverse), 1e-10));
  }
}

TEST_CASE("infinitesimal action") {
  oracle::Random rng(17);
  for (int k = 0; k <= 7; ++k) {
    const KForm a = rng.form(k);
    CHECK(approx_equal(infinitesimal_action(Mat7::Identity(), a), -static_cast<double>(k) * a, 1e-12));
    CHECK(infinitesimal_action(Mat7::Zero(), a).is_zero(0.0));
  }

  const Mat7 d = rng.matrix();
  const double h = 1e-5;
  const KForm plus = gl_pullback((h * d).exp(), standard_phi(), PullbackConvention::inverse);
  const KForm minus = gl_pullback((-h * d).exp(), standard_phi(), PullbackConvention::inverse);
  CHECK(approx_equal(infinitesimal_action(d, standard_phi()), (1.0 / (2 * h)) * (plus - minus), 1e-8));

  const KForm a = rng.form(2), b = rng.form(3);
  CHECK(approx_equal(infinitesimal_action(d, wedge(a, b)),
                     wedge(infinitesimal_action(d, a), b) + wedge(a, infinitesimal_action(d, b)), 1e-10));
}
