#include "doctest.h"

#include <cmath>
#include <complex>

#include "orthorot/mpoly.hpp"
#include "orthorot/rng.hpp"

using orthorot::MPoly;
using orthorot::RngStream;

namespace {

MPoly random_poly(std::uint64_t stream, int nvars, int max_degree, int terms) {
  RngStream rng(41, stream, 0xfe);
  MPoly p(nvars);
  for (int t = 0; t < terms; ++t) {
    std::vector<std::uint8_t> e(static_cast<std::size_t>(nvars), 0);
    int budget = max_degree;
    for (int v = 0; v < nvars && budget > 0; ++v) {
      const int d = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(budget + 1));
      e[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(d);
      budget -= d;
    }
    p.add_term(rng.uniform_sym(), e);
  }
  return p;
}

}  // namespace

TEST_SUITE("mpoly") {

TEST_CASE("difference of squares") {
  const MPoly x = MPoly::variable(2, 0);
  const MPoly y = MPoly::variable(2, 1);
  const MPoly prod = (x + y) * (x - y);
  MPoly expect(2);
  expect.add_term(1.0, {2, 0});
  expect.add_term(-1.0, {0, 2});
  CHECK(prod.term_count() == 2);
  const double pt[2] = {1.5, -0.25};
  CHECK(prod.eval(pt) == doctest::Approx(expect.eval(pt)).epsilon(1e-15));
  CHECK(prod.eval(pt) == doctest::Approx(1.5 * 1.5 - 0.0625).epsilon(1e-15));
}

TEST_CASE("monomial evaluation") {
  MPoly p(2);
  p.add_term(1.0, {2, 1});  // x^2 y
  const double pt[2] = {2.0, 3.0};
  CHECK(p.eval(pt) == doctest::Approx(12.0));
}

TEST_CASE("multiplication commutes with evaluation") {
  const MPoly a = random_poly(0, 3, 3, 6);
  const MPoly b = random_poly(1, 3, 3, 5);
  const MPoly ab = a * b;
  RngStream rng(42, 0, 0xfe);
  for (int i = 0; i < 100; ++i) {
    double pt[3] = {rng.uniform_sym(), rng.uniform_sym(), rng.uniform_sym()};
    const double lhs = ab.eval(pt);
    const double rhs = a.eval(pt) * b.eval(pt);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("complex evaluation agrees with real on the real axis") {
  const MPoly a = random_poly(2, 2, 4, 8);
  const double pt[2] = {0.3, -0.8};
  const std::complex<double> cpt[2] = {{0.3, 0.0}, {-0.8, 0.0}};
  const std::complex<double> cv = a.eval(cpt);
  CHECK(cv.real() == doctest::Approx(a.eval(pt)).epsilon(1e-13));
  CHECK(std::abs(cv.imag()) < 1e-15);
}

TEST_CASE("derivative matches finite differences") {
  const MPoly a = random_poly(3, 3, 4, 10);
  const MPoly da = a.derivative(1);
  const double h = 1e-6;
  RngStream rng(43, 0, 0xfe);
  for (int i = 0; i < 20; ++i) {
    double pt[3] = {rng.uniform_sym(), rng.uniform_sym(), rng.uniform_sym()};
    double up[3] = {pt[0], pt[1] + h, pt[2]};
    double dn[3] = {pt[0], pt[1] - h, pt[2]};
    const double fd = (a.eval(up) - a.eval(dn)) / (2.0 * h);
    CHECK(da.eval(pt) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("terms merge and cancel") {
  MPoly p(2);
  p.add_term(2.0, {1, 1});
  p.add_term(-2.0, {1, 1});
  CHECK(p.is_zero());
  p.add_term(1.0, {0, 0});
  p.add_term(0.5, {0, 0});
  CHECK(p.term_count() == 1);
  const double pt[2] = {9.0, 9.0};
  CHECK(p.eval(pt) == doctest::Approx(1.5));
}

TEST_CASE("printing uses the supplied names") {
  MPoly p(2);
  p.add_term(1.0, {2, 0});
  p.add_term(-3.0, {1, 1});
  const auto name = [](int v) { return v == 0 ? std::string("x") : std::string("y"); };
  CHECK(p.to_string(name) == "1*x^2 + -3*x*y");
  CHECK(MPoly(2).to_string(name) == "0");
}

TEST_CASE("degree bookkeeping") {
  MPoly p(3);
  CHECK(p.total_degree() == 0);
  p.add_term(1.0, {1, 2, 0});
  p.add_term(1.0, {0, 0, 1});
  CHECK(p.total_degree() == 3);
}

}  // TEST_SUITE
