#include <doctest.h>

#include <cmath>
#include <vector>

#include "featurenull/error.hpp"
#include "featurenull/parallel.hpp"
#include "featurenull/stats.hpp"

using namespace featurenull;

namespace {

bool rel_close(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::abs(want);
}

}  // namespace

// Reference values below were computed at 50 significant digits.

TEST_CASE("welch on equal-size integer samples") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10};
  const auto r = stats::welch_t_test(a, b);
  CHECK(rel_close(r.statistic, -1.8973665961010275992, 1e-12));
  CHECK(rel_close(r.dof, 5.8823529411764705882, 1e-12));
  CHECK(rel_close(r.p_value, 0.10753119493062724041, 1e-10));
  CHECK(r.n1 == 5);
  CHECK(r.n2 == 5);
}

TEST_CASE("welch on unequal sizes and variances") {
  const std::vector<double> a{10.1, 9.8, 10.4, 10.0, 9.7, 10.2, 10.3};
  const std::vector<double> b{11.2, 10.9, 11.5, 10.6, 11.8, 11.1};
  const auto r = stats::welch_t_test(a, b);
  CHECK(rel_close(r.statistic, -5.5829140725280659168, 1e-12));
  CHECK(rel_close(r.dof, 7.9447466163755871318, 1e-12));
  CHECK(rel_close(r.p_value, 0.00053345411725050715208, 1e-10));
}

TEST_CASE("welch is antisymmetric in its arguments") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10};
  const auto ab = stats::welch_t_test(a, b), ba = stats::welch_t_test(b, a);
  CHECK(ab.statistic == doctest::Approx(-ba.statistic));
  CHECK(ab.p_value == doctest::Approx(ba.p_value));
}

TEST_CASE("welch rejects bad input") {
  const std::vector<double> one{1.0}, two{1.0, 2.0}, flat{3.0, 3.0, 3.0};
  CHECK_THROWS_AS(stats::welch_t_test(one, two), ArgumentError);
  CHECK_THROWS_AS(stats::welch_t_test(flat, flat), DegenerateInputError);
  const std::vector<double> bad{1.0, std::nan("")};
  CHECK_THROWS_AS(stats::welch_t_test(bad, two), ArgumentError);
}

TEST_CASE("pearson on a near-linear set") {
  std::vector<double> x, y{2.1, 3.9, 6.2, 7.8, 10.5, 11.7, 14.2, 15.9, 18.4, 19.6,
                           22.3, 23.8, 26.1, 28.2, 29.7, 32.4, 33.9, 36.2, 38.1, 40.3};
  for (int i = 1; i <= 20; ++i) x.push_back(i);
  const auto r = stats::pearson(x, y);
  CHECK(rel_close(r.rho, 0.99975977840354827731, 1e-12));
  CHECK(rel_close(r.p_value, 2.5274224421184338287e-31, 1e-9));
  CHECK(r.n == 20);
}

TEST_CASE("pearson on a noisy rank set") {
  std::vector<double> x, y{5, 3, 8, 1, 9, 2, 7, 4, 6, 10, 12, 11, 15, 13, 14, 20, 16, 18, 17, 19};
  for (int i = 1; i <= 20; ++i) x.push_back(i);
  const auto r = stats::pearson(x, y);
  CHECK(rel_close(r.rho, 0.8962406015037593985, 1e-12));
  CHECK(rel_close(r.p_value, 9.035617179015224615e-8, 1e-9));
}

TEST_CASE("pearson rejects bad input") {
  const std::vector<double> a{1, 2, 3}, b{1, 2}, flat{4, 4, 4};
  CHECK_THROWS_AS(stats::pearson(a, b), ArgumentError);
  CHECK_THROWS_AS(stats::pearson(b, b), ArgumentError);
  CHECK_THROWS_AS(stats::pearson(a, flat), DegenerateInputError);
}

TEST_CASE("incomplete beta reference values") {
  CHECK(rel_close(stats::incomplete_beta(2, 3, 0.4), 0.52480000000000003837, 1e-13));
  CHECK(rel_close(stats::incomplete_beta(0.5, 0.5, 0.3), 0.36901011956554537504, 1e-13));
  CHECK(rel_close(stats::incomplete_beta(10, 4, 0.7), 0.42060564576099986162, 1e-13));
  CHECK(rel_close(stats::incomplete_beta(1.5, 20, 0.05), 0.44342120168569028169, 1e-13));
  CHECK(stats::incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(stats::incomplete_beta(2, 3, 1.0) == 1.0);
}

TEST_CASE("student t cdf reference values") {
  CHECK(rel_close(stats::student_t_cdf(1.5, 4), 0.896, 1e-12));
  CHECK(rel_close(stats::student_t_cdf(-2.2, 9.5), 0.02690587854646285249, 1e-11));
  CHECK(rel_close(stats::student_t_cdf(0.3, 1), 0.59277357907774234032, 1e-12));
}

TEST_CASE("student t cdf identities") {
  for (double dof : {1.0, 2.5, 7.0, 30.0, 1000.0}) {
    CHECK(std::abs(stats::student_t_cdf(0.0, dof) - 0.5) <= 1e-12);
    for (double t : {0.1, 0.9, 2.0, 5.0, 40.0}) {
      CHECK(std::abs(stats::student_t_cdf(t, dof) + stats::student_t_cdf(-t, dof) - 1.0) <= 1e-12);
      CHECK(std::abs(stats::student_t_two_sided(t, dof) - 2.0 * stats::student_t_cdf(-t, dof)) <= 1e-12);
    }
  }
}

TEST_CASE("student t cdf is monotone in t") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double dof = 0.5 + 60.0 * uniform_unit(rng);
    const double t1 = 20.0 * (uniform_unit(rng) - 0.5);
    const double t2 = t1 + 5.0 * uniform_unit(rng);
    CHECK(stats::student_t_cdf(t1, dof) <= stats::student_t_cdf(t2, dof));
  }
}

TEST_CASE("mean and sample variance") {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(stats::mean(v) == 5.0);
  CHECK(stats::sample_variance(v) == doctest::Approx(32.0 / 7.0));
}

TEST_CASE("pearson on exact lines") {
  std::vector<double> x, up, down;
  for (int i = 0; i < 15; ++i) {
    x.push_back(0.37 * i * i - 2.0 * i);
    up.push_back(2.0 * x.back() + 3.0);
    down.push_back(-x.back());
  }
  CHECK(std::abs(stats::pearson(x, up).rho - 1.0) <= 1e-12);
  CHECK(std::abs(stats::pearson(x, down).rho + 1.0) <= 1e-12);
}

TEST_CASE("welch on identical samples") {
  const std::vector<double> a{3.0, 1.5, 4.25, 2.0};
  const auto r = stats::welch_t_test(a, a);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("welch p falls as the mean gap grows") {
  Rng rng(8);
  std::vector<double> base(12);
  for (auto& v : base) v = standard_normal(rng);
  double last = 1.1;
  for (int step = 0; step <= 20; ++step) {
    std::vector<double> shifted;
    for (double v : base) shifted.push_back(1.7 * v + 0.25 * step);
    const double p = stats::welch_t_test(base, shifted).p_value;
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(p < last);
    last = p;
  }
}
