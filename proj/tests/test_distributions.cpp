#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "contagion/distribution.hpp"
#include "contagion/rng.hpp"
#include "contagion/stats.hpp"

using namespace contagion;

TEST_CASE("poisson construction") {
  auto mu = DegreeDistribution::poisson(2.0);
  CHECK(mu.pmf(0) == Catch::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(mu.pmf(3) == Catch::Approx(std::exp(-2.0) * 8.0 / 6.0).epsilon(1e-12));
  CHECK(mu.mean() == Catch::Approx(2.0).margin(1e-9));
  CHECK(mu.second_moment() == Catch::Approx(6.0).margin(1e-8));
  CHECK(mu.branching_rate() == Catch::Approx(2.0).margin(1e-8));
  CHECK(mu.supercritical());
  CHECK(mu.tail_class() == TailClass::exponential);
  CHECK(mu.truncation_epsilon() < 1e-11);

  double s = 0;
  for (uint32_t k = 0; k <= mu.kmax(); ++k) s += mu.pmf(k);
  CHECK(s == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("geometric construction") {
  auto mu = DegreeDistribution::geometric(0.5);
  CHECK(mu.pmf(0) == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(mu.pmf(4) == Catch::Approx(0.03125).epsilon(1e-10));
  CHECK(mu.mean() == Catch::Approx(1.0).margin(1e-9));
  // E D(D-1) = 2 q^2 / p^2 = 2, so b = 2
  CHECK(mu.branching_rate() == Catch::Approx(2.0).margin(1e-8));
  CHECK(mu.tail(3) == Catch::Approx(0.0625).margin(1e-10));
}

TEST_CASE("point mass and subcritical flag") {
  auto mu = DegreeDistribution::point(3);
  CHECK(mu.pmf(3) == 1.0);
  CHECK(mu.mean() == 3.0);
  CHECK(mu.tail_class() == TailClass::finite_support);
  CHECK(DegreeDistribution::point(1).supercritical() == false);
}

TEST_CASE("size biasing") {
  SECTION("poisson is a fixed point") {
    auto mu = DegreeDistribution::poisson(2.0);
    auto mup = size_biased(mu);
    // the top atom carries folded truncation mass; compare below it
    for (uint32_t k = 0; k < mup.kmax(); ++k)
      CHECK(mup.pmf(k) == Catch::Approx(mu.pmf(k)).margin(1e-12));
  }
  SECTION("point mass shifts down by one") {
    auto mup = size_biased(DegreeDistribution::point(3));
    CHECK(mup.kmax() == 2);
    CHECK(mup.pmf(2) == Catch::Approx(1.0).margin(1e-15));
  }
  SECTION("two-atom law by hand: {1:1/2, 3:1/2} -> {0:1/4, 2:3/4}") {
    auto mu = DegreeDistribution::from_masses({0.0, 0.5, 0.0, 0.5});
    auto mup = size_biased(mu);
    CHECK(mup.pmf(0) == Catch::Approx(0.25).margin(1e-15));
    CHECK(mup.pmf(2) == Catch::Approx(0.75).margin(1e-15));
    CHECK(mup.pmf(1) == 0.0);
  }
  SECTION("zero mean errors") {
    CHECK_THROWS_WITH(size_biased(DegreeDistribution::point(0)),
                      Catch::Matchers::ContainsSubstring("degenerate"));
  }
}

TEST_CASE("conditioning to positive support") {
  SECTION("single positive atom") {
    auto nu = condition_positive(DegreeDistribution::from_masses({0.25, 0.0, 0.75}));
    CHECK(nu.pmf(2) == Catch::Approx(1.0).margin(1e-15));
    CHECK(nu.pmf(0) == 0.0);
  }
  SECTION("renormalization by 1/2") {
    auto nu = condition_positive(DegreeDistribution::from_masses({0.5, 0.25, 0.25}));
    CHECK(nu.pmf(1) == Catch::Approx(0.5).margin(1e-15));
    CHECK(nu.pmf(2) == Catch::Approx(0.5).margin(1e-15));
  }
  SECTION("poisson closed form at k=1") {
    auto nu = condition_positive(DegreeDistribution::poisson(2.0));
    double expected = 2.0 * std::exp(-2.0) / (1.0 - std::exp(-2.0));
    CHECK(nu.pmf(1) == Catch::Approx(expected).margin(1e-12));
  }
  SECTION("all mass at zero errors") {
    CHECK_THROWS(condition_positive(DegreeDistribution::point(0)));
  }
}

TEST_CASE("augmentation") {
  SECTION("point mass is unchanged (top-of-support branch)") {
    AugmentReport rep;
    auto sharp = augment(DegreeDistribution::point(5), &rep);
    CHECK(rep.second_branch);
    CHECK(rep.k0 == 5);
    CHECK(rep.Z == Catch::Approx(1.0).margin(1e-15));
    CHECK(sharp.pmf(5) == Catch::Approx(1.0).margin(1e-15));
  }
  SECTION("geometric(1/2) has k0 = 4") {
    // sqrt tail sums are 2^{-(k+1)/2}/(1-2^{-1/2}); >= 1/2 iff k <= 4
    AugmentReport rep;
    auto sharp = augment(DegreeDistribution::geometric(0.5), &rep);
    CHECK(rep.k0 == 4);
    CHECK_FALSE(rep.second_branch);
    CHECK(rep.Z < 1.0);
    // below k0: halved and rescaled; above: square root and rescaled
    CHECK(sharp.pmf(2) == Catch::Approx(0.125 / 2 / rep.Z).margin(1e-12));
    CHECK(sharp.pmf(6) == Catch::Approx(std::sqrt(0.0078125) / rep.Z).margin(1e-12));
  }
  SECTION("mass inflation property: sharp(j) >= mu(j)/(2Z) everywhere") {
    auto mu = DegreeDistribution::poisson(2.0);
    AugmentReport rep;
    auto sharp = augment(mu, &rep);
    for (uint32_t j = 0; j <= mu.kmax(); ++j)
      CHECK(sharp.pmf(j) >= mu.pmf(j) / 2 / rep.Z - 1e-15);
    CHECK(rep.Z < 1.0);
  }
  SECTION("tail class is preserved for exponential inputs") {
    auto sharp = augment(DegreeDistribution::poisson(2.0));
    CHECK(sharp.tail_class() == TailClass::exponential);
    CHECK(DegreeDistribution::classify(sharp.masses()) == TailClass::exponential);
  }
  SECTION("subexponential inputs are rejected") {
    auto fat = DegreeDistribution::stretched_exponential(1.0, 0.5);
    CHECK_THROWS_WITH(augment(fat), Catch::Matchers::ContainsSubstring("exponential tail"));
  }
}

TEST_CASE("classification heuristic") {
  CHECK(DegreeDistribution::classify(DegreeDistribution::poisson(3.0).masses()) ==
        TailClass::exponential);
  CHECK(DegreeDistribution::classify(DegreeDistribution::geometric(0.3).masses()) ==
        TailClass::exponential);
  CHECK(DegreeDistribution::classify(DegreeDistribution::stretched_exponential(1.0, 0.5).masses()) ==
        TailClass::subexponential);
  CHECK(DegreeDistribution::classify({0.2, 0.3, 0.5}) == TailClass::finite_support);
}

TEST_CASE("sampling") {
  SECTION("point mass") {
    RandomStream s(1);
    auto xs = DegreeDistribution::point(3).sample_many(5, s);
    CHECK(xs == std::vector<uint32_t>{3, 3, 3, 3, 3});
  }
  SECTION("poisson mean within CLT band") {
    RandomStream s(20250101);
    auto mu = DegreeDistribution::poisson(2.0);
    auto xs = mu.sample_many(100000, s);
    double m = 0;
    for (auto x : xs) m += x;
    m /= double(xs.size());
    CHECK(std::abs(m - 2.0) < 3.0 * std::sqrt(2.0 / 100000.0));
  }
  SECTION("determinism byte for byte") {
    auto mu = DegreeDistribution::geometric(0.4);
    RandomStream a(77), b(77), c(78);
    auto xa = mu.sample_many(1000, a);
    auto xb = mu.sample_many(1000, b);
    auto xc = mu.sample_many(1000, c);
    CHECK(xa == xb);
    CHECK(xa != xc);
  }
}

TEST_CASE("domination testing") {
  auto mu = DegreeDistribution::poisson(2.0);
  auto sharp = augment(mu);

  SECTION("point mass against itself") {
    std::vector<uint32_t> xs(300, 5);
    auto rep = domination_test(xs, 100, augment(DegreeDistribution::point(5)));
    CHECK(rep.dominated);
  }
  SECTION("poisson samples against augmented poisson, full budget") {
    RandomStream s(424242);
    auto xs = mu.sample_many(100000, s);
    auto rep = domination_test(xs, xs.size() / 3, sharp);
    CHECK(rep.dominated);
  }
  SECTION("doubled samples violate and report a witness") {
    RandomStream s(424242);
    auto xs = mu.sample_many(100000, s);
    for (auto& x : xs) x *= 2;
    auto rep = domination_test(xs, xs.size() / 3, sharp);
    CHECK_FALSE(rep.dominated);
    CHECK(rep.worst_k >= 0);
    CHECK(rep.worst_excess > 0);
  }
  SECTION("budget above n/3 is rejected") {
    std::vector<uint32_t> xs(9, 1);
    CHECK_THROWS_WITH(domination_test(xs, 4, sharp),
                      Catch::Matchers::ContainsSubstring("lemma hypothesis"));
  }
}

TEST_CASE("csv round trip") {
  const char* path = "test_dist_table.csv";
  {
    std::ofstream out(path);
    out << "# k,p\n0,0.2\n1,0.5\n3,0.3\n";
  }
  auto mu = DegreeDistribution::from_table_csv(path);
  CHECK(mu.pmf(1) == Catch::Approx(0.5).margin(1e-12));
  CHECK(mu.pmf(2) == 0.0);
  CHECK(mu.pmf(3) == Catch::Approx(0.3).margin(1e-12));
  CHECK(mu.tail_class() == TailClass::finite_support);
  std::remove(path);

  {
    std::ofstream out(path);
    out << "0,0.5\n1,0.6\n";
  }
  CHECK_THROWS_WITH(DegreeDistribution::from_table_csv(path),
                    Catch::Matchers::ContainsSubstring("sum to 1"));
  std::remove(path);
}
