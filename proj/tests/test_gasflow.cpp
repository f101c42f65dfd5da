#include <doctest.h>

#include "mecgrid/gasflow.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>

using namespace mecgrid;

namespace {

GasPipe pipe(double c_p, double pi0_from, double pi0_to) {
  GasPipe p;
  p.id = "p";
  p.from = "a";
  p.to = "b";
  p.c_p = c_p;
  p.pi0_from = pi0_from;
  p.pi0_to = pi0_to;
  p.f_max = 100.0;
  return p;
}

}  // namespace

TEST_CASE("coefficients at a simple linearization point") {
  // c_p = 1, pressures (2, 1): a_n = 2/sqrt(3), a_m = 1/sqrt(3)
  const auto m = gas_flow_coefficients(pipe(1.0, 2.0, 1.0));
  CHECK(m.a_n == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(m.a_m == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(m.evaluate(2.0, 1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("linear and nonlinear flow agree at the linearization point") {
  const auto m = gas_flow_coefficients(pipe(1.0, 2.0, 1.0));
  CHECK(m.evaluate(2.0, 1.0) ==
        doctest::Approx(weymouth_flow(1.0, 2.0, 1.0)).epsilon(1e-12));
  // nearby the error is small but nonzero
  const double lin = m.evaluate(2.1, 1.0);
  const double truth = weymouth_flow(1.0, 2.1, 1.0);
  CHECK(lin == doctest::Approx(3.2 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(truth == doctest::Approx(std::sqrt(2.1 * 2.1 - 1.0)).epsilon(1e-12));
  CHECK(std::abs(lin - truth) == doctest::Approx(9.2e-4).epsilon(0.05));
}

TEST_CASE("flow is linear in the pipeline constant") {
  const auto m1 = gas_flow_coefficients(pipe(1.0, 90.0, 85.0));
  const auto m2 = gas_flow_coefficients(pipe(2.0, 90.0, 85.0));
  CHECK(m2.a_n == doctest::Approx(2.0 * m1.a_n).epsilon(1e-12));
  CHECK(m2.a_m == doctest::Approx(2.0 * m1.a_m).epsilon(1e-12));
  CHECK(weymouth_flow(2.0, 90.0, 85.0) ==
        doctest::Approx(2.0 * weymouth_flow(1.0, 90.0, 85.0)).epsilon(1e-12));
}

TEST_CASE("reversed nominal pressures give negative flow") {
  const auto m = gas_flow_coefficients(pipe(1.0, 1.0, 2.0));
  CHECK(m.evaluate(1.0, 2.0) == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-12));
  CHECK(weymouth_flow(1.0, 1.0, 2.0) == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("degenerate linearization points are rejected") {
  CHECK_THROWS_AS((void)gas_flow_coefficients(pipe(1.0, 5.0, 5.0)), std::domain_error);
  CHECK_THROWS_AS((void)gas_flow_coefficients(pipe(1.0, 0.0, 1.0)), std::domain_error);
  CHECK_THROWS_AS((void)gas_flow_coefficients(pipe(1.0, 1.0, -1.0)), std::domain_error);
}

TEST_CASE("random pipes reproduce the nonlinear flow at their anchor") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> pd(30.0, 130.0), cd(0.2, 4.0);
  for (int i = 0; i < 100; ++i) {
    double pn = pd(rng), pm = pd(rng);
    if (std::abs(pn - pm) < 1e-3) pm += 1.0;
    const double cp = cd(rng);
    const auto m = gas_flow_coefficients(pipe(cp, pn, pm));
    const double lin = m.evaluate(pn, pm);
    const double truth = weymouth_flow(cp, pn, pm);
    CHECK(std::abs(lin - truth) <= 1e-9 * std::max(1.0, std::abs(truth)));
  }
}

TEST_CASE("linearization error grows away from the anchor") {
  const auto m = gas_flow_coefficients(pipe(1.0, 100.0, 90.0));
  double prev = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double pn = 100.0 + 2.0 * k;  // walk the from-pressure outward
    const double err = std::abs(m.evaluate(pn, 90.0) - weymouth_flow(1.0, pn, 90.0));
    CHECK(err >= prev - 1e-12);
    prev = err;
  }
}

TEST_CASE("linearize_pipes covers every pipe in order") {
  const auto c = mectest::make_tiny_case();
  const auto models = linearize_pipes(c);
  REQUIRE(models.size() == c.pipes.size());
  CHECK(models[0].pipe_id == "p1");
  const double anchor = models[0].evaluate(c.pipes[0].pi0_from, c.pipes[0].pi0_to);
  CHECK(anchor ==
        doctest::Approx(weymouth_flow(c.pipes[0].c_p, c.pipes[0].pi0_from, c.pipes[0].pi0_to))
            .epsilon(1e-12));
}
