#include <doctest.h>

#include "../support/oracles.hpp"
#include "g2pinch/curvature.hpp"
#include "g2pinch/errors.hpp"
#include "g2pinch/families.hpp"
#include "g2pinch/solitonlab.hpp"

#include <cmath>

using namespace g2pinch;

TEST_CASE("catalog entries") {
  const CatalogEntry at = catalog("A_t", {{"t", 1.0}});
  REQUIRE(at.spec.has_value());
  const CMat3 a = *at.spec->complex();
  CHECK(a(0, 0) == 1.0);
  CHECK(a(0, 1) == -1.0);
  CHECK(a(1, 0) == 1.0);
  CHECK(a(1, 1) == -1.0);
  CHECK(*pinching_F(at.mu).F == doctest::Approx(0.5).epsilon(1e-12));

  const CatalogEntry hyp = catalog("mu_hyp");
  CHECK_FALSE(hyp.spec.has_value());
  for (int i = 0; i < 6; ++i) CHECK(hyp.mu(6, i, i) == 1.0);

  CHECK_THROWS_WITH_AS(catalog("mu6", {{"a", 0.0}}), doctest::Contains("out of range"), ValidationError);
  CHECK_THROWS_WITH_AS(catalog("nope"), doctest::Contains("mu_hyp"), ValidationError);
  CHECK_THROWS_AS(catalog("A_t"), ValidationError);
  CHECK_THROWS_AS(catalog("A_t", {{"t", 1.0}, {"s", 2.0}}), ValidationError);
  CHECK_THROWS_AS(catalog("D_t", {{"a", 1.0}, {"b", 1.0}, {"t", 1.0}}), ValidationError);
  CHECK_THROWS_AS(catalog("nf_diag", {{"alpha_re", 0.0}, {"alpha_im", 1.0}, {"beta_re", 0.0}, {"beta_im", 0.0}}),
                  ValidationError);
  CHECK_THROWS_AS(catalog("nf_jordan", {{"alpha_re", 2.0}, {"alpha_im", 0.0}}), ValidationError);
}

TEST_CASE("every almost-abelian catalog member is closed") {
  for (const auto& f : family_specs()) {
    if (!f.almost_abelian) continue;
    ParamMap p;
    for (const auto& r : f.params) p[r.name] = 0.6;
    if (f.name == "nf_diag" || f.name == "nf_jordan") p = {{"alpha_re", 0.6}, {"alpha_im", 0.8}};
    if (f.name == "nf_diag") p.insert({{"beta_re", 0.1}, {"beta_im", -0.3}});
    if (f.name == "D_t") p["b"] = -0.4;
    const CatalogEntry e = catalog(f.name, p);
    CAPTURE(f.name);
    CHECK(closedness_criterion(*e.spec).closed);
  }
}

TEST_CASE("reference F formulas hold pointwise") {
  auto check = [](const std::string& family, ParamMap p) {
    const ScanRow row = evaluate_row(family, p);
    CAPTURE(family);
    REQUIRE(row.error.empty());
    REQUIRE(row.F.has_value());
    REQUIRE(row.reference_F.has_value());
    CHECK(std::abs(*row.F - *row.reference_F) <= 1e-8 * *row.reference_F);
  };
  for (double t = 0.1; t < 2.0; t += 0.15) {
    check("A_t", {{"t", t}});
    check("B_t", {{"t", t}});
    check("C_t", {{"t", t}});
    check("D_t", {{"a", 0.7}, {"b", -1.6}, {"t", t}});
    check("mu6", {{"a", t}});
    check("ab", {{"a", t}, {"b", 0.9 - t}});
  }
  check("mu2", {});
  check("nf_nil3", {});
  check("mu_heis", {});
  check("mu_hyp", {});
}

TEST_CASE("D_t value for a - b = 1 from the matrix formula") {
  // |H|^4 = t^4/4 and |[A,A*]|^2 = 2t^4 + 2t^2 (a-b)^2 for this matrix
  for (double t : {0.3, 1.0, 2.0}) {
    const ScanRow row = evaluate_row("D_t", {{"a", 0.5}, {"b", -0.5}, {"t", t}});
    CHECK(*row.F == doctest::Approx(t * t / (2 * t * t + 1)).epsilon(1e-12));
  }
}

TEST_CASE("grid parsing") {
  const Grid g = parse_grid("t=0.05:1:0.05");
  CHECK(g.param == "t");
  CHECK(g.values.size() == 20);
  CHECK(g.values.back() == doctest::Approx(1.0));
  CHECK(parse_grid("a=1:1:0.5").values.size() == 1);
  CHECK_THROWS_AS(parse_grid("t=1:0:0.1"), ValidationError);
  CHECK_THROWS_AS(parse_grid("t=0:1:0"), ValidationError);
  CHECK_THROWS_AS(parse_grid("t=0:1"), ValidationError);
  CHECK_THROWS_AS(parse_grid("0:1:0.1"), ValidationError);
  CHECK_THROWS_AS(parse_grid("t=a:1:0.1"), ValidationError);
}

TEST_CASE("scans") {
  const ScanResult at = scan("A_t", parse_grid("t=0.05:0.95:0.05"), {}, 2);
  REQUIRE(at.rows.size() == 19);
  for (std::size_t i = 0; i < at.rows.size(); ++i) {
    const double t = at.rows[i].params.at("t");
    CHECK(*at.rows[i].F == doctest::Approx(t * t / (t * t + 1)).epsilon(1e-10));
    if (i > 0) CHECK(*at.rows[i].F > *at.rows[i - 1].F);
  }
  CHECK(*at.F_inf < 0.003);

  const ScanResult m = scan("mu6", parse_grid("a=0.2:3:0.05"), {}, 3);
  CHECK(*m.F_sup == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(*m.argmax == doctest::Approx(1.0).epsilon(1e-9));

  const ScanResult b = scan("B_t", parse_grid("t=0.1:1:0.1"));
  for (const auto& row : b.rows) CHECK(*row.F == doctest::Approx(1.0).epsilon(1e-12));

  // t = 0 is torsion-free: F absent, row kept
  const ScanResult edge = scan("A_t", parse_grid("t=0:0.2:0.1"));
  CHECK_FALSE(edge.rows[0].F.has_value());
  CHECK(edge.rows[1].F.has_value());

  // rows are merged in grid order regardless of worker count
  const ScanResult one = scan("C_t", parse_grid("t=0.1:1:0.1"), {}, 1);
  const ScanResult four = scan("C_t", parse_grid("t=0.1:1:0.1"), {}, 4);
  for (std::size_t i = 0; i < one.rows.size(); ++i) CHECK(*one.rows[i].F == *four.rows[i].F);

  CHECK_THROWS_AS(scan("A_t", parse_grid("s=0:1:0.5")), ValidationError);
}

TEST_CASE("extremization") {
  const ExtremizeResult m = extremize_F(*catalog("mu6", {{"a", 2.0}}).spec, Direction::max);
  CHECK(m.F == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(m.converged);
  CHECK(m.grad_norm <= 1e-8);
  for (std::size_t i = 1; i < m.trace.size(); ++i) CHECK(m.trace[i] >= m.trace[i - 1] - 1e-15);

  const ExtremizeResult b = extremize_F(*catalog("B_t", {{"t", 0.5}}).spec, Direction::max);
  CHECK(b.iterations == 0);
  CHECK(b.F == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.grad_norm <= 1e-8);

  Mat6 r = Mat6::Zero();
  r(0, 0) = 1.0;
  CHECK_THROWS_AS(extremize_F(AlmostAbelianSpec::from_real(r), Direction::max), ValidationError);

  // orbit gradient is scale invariant in the sense of F: zero at a normal matrix
  CMat3 d = CMat3::Zero();
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  CHECK(orbit_gradient(d).norm() <= 1e-9);
}

TEST_CASE("flow of a torsion-free structure is stationary") {
  oracle::Random rng(61);
  const G2Structure g = G2Structure::standard(mu_from_matrix(AlmostAbelianSpec::from_complex(rng.su3())));
  const FlowResult r = laplacian_flow(g, 0.2, 0.02);
  CHECK(r.samples.size() == 11);
  CHECK((r.samples.back().phi - standard_phi()).norm() <= 1e-10);
}

TEST_CASE("flow monotonicity on the (a, b) family") {
  const FlowResult dec = laplacian_flow(G2Structure::standard(catalog("ab", {{"a", 1.0}, {"b", -2.0}}).mu), 0.3, 0.005);
  CHECK(flow_monotonicity(dec) == Monotonicity::decreasing);
  const FlowResult inc = laplacian_flow(G2Structure::standard(catalog("ab", {{"a", 1.0}, {"b", 2.0}}).mu), 0.3, 0.005);
  CHECK(flow_monotonicity(inc) == Monotonicity::increasing);
  for (const auto& s : dec.samples) CHECK(s.closedness_drift <= 1e-8);
  for (std::size_t i = 1; i < dec.samples.size(); ++i) CHECK(dec.samples[i].t > dec.samples[i - 1].t);
}

TEST_CASE("flow from a soliton keeps F") {
  const FlowResult r = laplacian_flow(G2Structure::standard(catalog("B_t", {{"t", 0.5}}).mu), 0.5, 0.01);
  for (const auto& s : r.samples) CHECK(*s.F == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(laplacian_flow(G2Structure::standard(catalog("mu_hyp").mu), 1.0, 0.1), ValidationError);
}
