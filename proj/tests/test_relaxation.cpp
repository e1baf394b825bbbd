#include <doctest.h>

#include <cmath>
#include <random>

#include "sigbound/oracle.hpp"
#include "sigbound/relaxation.hpp"

using namespace sigbound;

namespace {

// independent finite-difference oracle for derivatives
double fd_derivative(ActivationKind kind, double x, double h = 1e-6) {
  return (sigma(kind, x + h) - sigma(kind, x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("sigma and sigma_prime match closed forms") {
  CHECK(sigma(ActivationKind::Sigmoid, 0.0) == doctest::Approx(0.5));
  CHECK(sigma_prime(ActivationKind::Sigmoid, 0.0) == doctest::Approx(0.25));
  CHECK(sigma(ActivationKind::Tanh, 0.0) == doctest::Approx(0.0));
  CHECK(sigma_prime(ActivationKind::Tanh, 0.0) == doctest::Approx(1.0));

  CHECK(sigma_prime(ActivationKind::Sigmoid, 1.0) ==
        doctest::Approx(0.1966119).epsilon(1e-6));
  CHECK(sigma_prime(ActivationKind::Sigmoid, 1.0) ==
        doctest::Approx(fd_derivative(ActivationKind::Sigmoid, 1.0))
            .epsilon(1e-5));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xs(-6.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    const double x = xs(rng);
    for (ActivationKind kind : {ActivationKind::Sigmoid, ActivationKind::Tanh})
      CHECK(sigma_prime(kind, x) ==
            doctest::Approx(fd_derivative(kind, x)).epsilon(1e-5));
  }

  CHECK_THROWS_AS(sigma(ActivationKind::Identity, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sigma_prime(ActivationKind::Identity, 0.0),
                  std::invalid_argument);
}

TEST_CASE("classify_case follows the sign pattern") {
  CHECK(classify_case(1.0, 2.0) == ActivationCase::SPlus);
  CHECK(classify_case(-2.0, -1.0) == ActivationCase::SMinus);
  CHECK(classify_case(-1.0, 2.0) == ActivationCase::SMixed);
  // boundary intervals avoid the two-sided case
  CHECK(classify_case(0.0, 5.0) == ActivationCase::SPlus);
  CHECK(classify_case(-5.0, 0.0) == ActivationCase::SMinus);
  CHECK(classify_case(0.0, 0.0) == ActivationCase::SPlus);
  CHECK_THROWS_AS(classify_case(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("chord_line interpolates the endpoints") {
  const auto kind = ActivationKind::Sigmoid;
  const BoundingLine chord = chord_line(kind, 1.0, 2.0);
  const double expect_slope = (sigma(kind, 2.0) - sigma(kind, 1.0)) / 1.0;
  CHECK(chord.slope == doctest::Approx(0.1497385).epsilon(1e-6));
  CHECK(chord.intercept == doctest::Approx(0.5813201).epsilon(1e-6));
  CHECK(chord.slope == doctest::Approx(expect_slope));
  CHECK(chord(1.0) == doctest::Approx(sigma(kind, 1.0)));
  CHECK(chord(2.0) == doctest::Approx(sigma(kind, 2.0)));

  const BoundingLine point = chord_line(kind, 0.0, 0.0);
  CHECK(point.slope == 0.0);
  CHECK(point.intercept == doctest::Approx(0.5));

  for (double a : {0.5, 1.0, 3.0}) {
    const BoundingLine sym = chord_line(ActivationKind::Tanh, -a, a);
    CHECK(sym.intercept == doctest::Approx(0.0).epsilon(1e-15));
  }

  CHECK_THROWS_AS(chord_line(kind, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("tangent_line touches the activation at its point") {
  const BoundingLine t0 = tangent_line(ActivationKind::Sigmoid, 0.0);
  CHECK(t0.slope == doctest::Approx(0.25));
  CHECK(t0.intercept == doctest::Approx(0.5));

  const BoundingLine th = tangent_line(ActivationKind::Tanh, 0.0);
  CHECK(th.slope == doctest::Approx(1.0));
  CHECK(th.intercept == doctest::Approx(0.0));

  const BoundingLine t1 = tangent_line(ActivationKind::Sigmoid, 1.0);
  CHECK(t1.slope == doctest::Approx(0.1966119).epsilon(1e-6));
  CHECK(t1.intercept == doctest::Approx(0.5344467).epsilon(1e-6));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ds(-8.0, 8.0);
  for (int i = 0; i < 500; ++i) {
    const double d = ds(rng);
    for (ActivationKind kind :
         {ActivationKind::Sigmoid, ActivationKind::Tanh}) {
      const BoundingLine line = tangent_line(kind, d);
      CHECK(std::abs(line(d) - sigma(kind, d)) <= 1e-15);
    }
  }
}

TEST_CASE("check_upper_valid agrees with direct endpoint evaluation") {
  const auto kind = ActivationKind::Sigmoid;

  const BoundingLine bad = tangent_line(kind, 0.1);
  CHECK(bad(-4.0) == doctest::Approx(-0.4974).epsilon(1e-3));
  CHECK_FALSE(check_upper_valid(kind, bad, -4.0, 2.0));

  const BoundingLine good = tangent_line(kind, 1.6);
  CHECK(good(-4.0) == doctest::Approx(0.0494).epsilon(1e-3));
  CHECK(check_upper_valid(kind, good, -4.0, 2.0));

  // concave domain: any tangent point inside the interval works
  for (double d : {1.0, 1.3, 1.7, 2.0})
    CHECK(check_upper_valid(kind, tangent_line(kind, d), 1.0, 2.0));
}

TEST_CASE("check_lower_valid mirrors the upper predicate") {
  const auto kind = ActivationKind::Sigmoid;
  CHECK_FALSE(check_lower_valid(kind, tangent_line(kind, -0.1), -2.0, 4.0));
  CHECK(check_lower_valid(kind, tangent_line(kind, -1.6), -2.0, 4.0));

  for (double d : {-2.0, -1.5, -1.0})
    CHECK(check_lower_valid(ActivationKind::Tanh, tangent_line(ActivationKind::Tanh, d),
                            -2.0, -1.0));
}

TEST_CASE("validity is symmetric under reflection") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> span(-8.0, 8.0);
  std::uniform_real_distribution<double> ds(0.0, 9.0);
  for (int i = 0; i < 2000; ++i) {
    double l = span(rng), u = span(rng);
    if (l > u) std::swap(l, u);
    const double d = ds(rng);
    for (ActivationKind kind :
         {ActivationKind::Sigmoid, ActivationKind::Tanh}) {
      const bool upper = check_upper_valid(kind, tangent_line(kind, d), l, u);
      const bool lower =
          check_lower_valid(kind, tangent_line(kind, -d), -u, -l);
      CHECK(upper == lower);
    }
  }
}

TEST_CASE("relax_neuron dispatches the case rules") {
  const auto kind = ActivationKind::Sigmoid;

  SUBCASE("SPlus: chord below, tangent above") {
    const NeuronRelaxation r = relax_neuron(kind, 1.0, 2.0, std::nullopt, 1.5);
    const BoundingLine chord = chord_line(kind, 1.0, 2.0);
    const BoundingLine tangent = tangent_line(kind, 1.5);
    CHECK(r.case_tag == ActivationCase::SPlus);
    CHECK(r.lower.slope == doctest::Approx(chord.slope));
    CHECK(r.lower.intercept == doctest::Approx(chord.intercept));
    CHECK(r.upper.slope == doctest::Approx(tangent.slope));
    CHECK(r.upper.intercept == doctest::Approx(tangent.intercept));
    CHECK(r.tangent_upper == 1.5);
    CHECK_FALSE(r.tangent_lower.has_value());
  }

  SUBCASE("invalid upper tangent is rejected") {
    CHECK_THROWS_AS(relax_neuron(kind, -4.0, 2.0, -1.6, 0.1),
                    std::invalid_argument);
  }

  SUBCASE("missing required tangent is rejected") {
    CHECK_THROWS_AS(relax_neuron(kind, 1.0, 2.0, std::nullopt, std::nullopt),
                    std::invalid_argument);
    CHECK_THROWS_AS(relax_neuron(kind, -2.0, -1.0, std::nullopt, std::nullopt),
                    std::invalid_argument);
  }

  SUBCASE("wrong-sign tangent is rejected") {
    CHECK_THROWS_AS(relax_neuron(kind, 1.0, 2.0, std::nullopt, -0.5),
                    std::invalid_argument);
  }

  SUBCASE("point interval collapses to a constant") {
    const NeuronRelaxation r =
        relax_neuron(kind, 0.7, 0.7, std::nullopt, std::nullopt);
    CHECK(r.lower.slope == 0.0);
    CHECK(r.upper.slope == 0.0);
    CHECK(r.lower.intercept == doctest::Approx(sigma(kind, 0.7)));
    CHECK(r.upper.intercept == doctest::Approx(sigma(kind, 0.7)));
  }

  SUBCASE("SMixed uses tangents on both sides") {
    const NeuronRelaxation r = relax_neuron(kind, -4.0, 2.0, -1.6, 1.6);
    CHECK(r.case_tag == ActivationCase::SMixed);
    CHECK(r.tangent_lower == -1.6);
    CHECK(r.tangent_upper == 1.6);
  }
}

TEST_CASE("random relaxations sandwich the activation") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> span(-8.0, 8.0);
  std::uniform_real_distribution<double> extra(0.0, 6.0);

  int built = 0;
  for (int i = 0; i < 4000; ++i) {
    double l = span(rng), u = span(rng);
    if (l > u) std::swap(l, u);
    const ActivationKind kind =
        (i % 2 == 0) ? ActivationKind::Sigmoid : ActivationKind::Tanh;

    // rejection-sample valid tangents of the right sign
    std::optional<double> t_lower, t_upper;
    const ActivationCase tag = classify_case(l, u);
    if (tag != ActivationCase::SMinus) {
      double d = extra(rng);
      for (int tries = 0;
           !check_upper_valid(kind, tangent_line(kind, d), l, u) && tries < 64;
           ++tries)
        d = 1.5 * d + 0.25;
      if (!check_upper_valid(kind, tangent_line(kind, d), l, u)) continue;
      t_upper = d;
    }
    if (tag != ActivationCase::SPlus) {
      double d = -extra(rng);
      for (int tries = 0;
           !check_lower_valid(kind, tangent_line(kind, d), l, u) && tries < 64;
           ++tries)
        d = 1.5 * d - 0.25;
      if (!check_lower_valid(kind, tangent_line(kind, d), l, u)) continue;
      t_lower = d;
    }

    const NeuronRelaxation r = relax_neuron(kind, l, u, t_lower, t_upper);
    const ValidityGrid grid(kind, l, u, 1000);
    CHECK(grid.worst_gap(BoundSide::Lower, r.lower) >= -1e-12);
    CHECK(grid.worst_gap(BoundSide::Upper, r.upper) >= -1e-12);
    ++built;
  }
  CHECK(built > 3000);  // rejection loop rarely gives up
}
