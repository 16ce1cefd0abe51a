#include <cstring>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "relstoch/kernels.hpp"

using namespace relstoch::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& e : v) e = g(rng) * 3.0 + 0.1;
  return v;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

const std::vector<std::size_t> kLengths{0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 65, 1001};

}  // namespace

TEST_CASE("isa names and availability") {
  CHECK(std::string(isa_name(Isa::scalar)) == "scalar");
  CHECK(std::string(isa_name(Isa::avx2)) == "avx2");
  CHECK(isa_available(Isa::scalar));
  CHECK(table(Isa::scalar).isa == Isa::scalar);
}

TEST_CASE("force_isa pins and restores dispatch") {
  force_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  CHECK(active().isa == Isa::scalar);
  force_isa(std::nullopt);
  if (isa_available(Isa::avx2)) {
    force_isa(Isa::avx2);
    CHECK(active_isa() == Isa::avx2);
    force_isa(std::nullopt);
  } else {
    CHECK_THROWS_AS(force_isa(Isa::avx2), std::invalid_argument);
  }
}

TEST_CASE("scalar kernels against naive loops") {
  const auto& s = table(Isa::scalar);
  std::mt19937_64 rng(1);
  for (std::size_t n : kLengths) {
    const auto a = random_vec(rng, n), b = random_vec(rng, n);
    double naive = 0.0, naive_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) naive += a[i];
    for (std::size_t i = 0; i + 1 < n; ++i) naive_sq += (a[i + 1] - a[i]) * (a[i + 1] - a[i]);
    CHECK(s.sum(a.data(), n) == doctest::Approx(naive).epsilon(1e-12));
    CHECK(s.sum_sq_increments(a.data(), n) == doctest::Approx(naive_sq).epsilon(1e-12));

    const auto ps = s.power_sums(a.data(), n);
    double s2 = 0.0, s4 = 0.0;
    for (double v : a) {
      s2 += v * v;
      s4 += v * v * v * v;
    }
    CHECK(ps.s1 == doctest::Approx(naive).epsilon(1e-12));
    CHECK(ps.s2 == doctest::Approx(s2).epsilon(1e-12));
    CHECK(ps.s4 == doctest::Approx(s4).epsilon(1e-12));

    const auto cs = s.cross_sums(a.data(), b.data(), n);
    double ab = 0.0, a2b2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ab += a[i] * b[i];
      a2b2 += a[i] * a[i] * b[i] * b[i];
    }
    CHECK(cs.ab == doctest::Approx(ab).epsilon(1e-12));
    CHECK(cs.a2b2 == doctest::Approx(a2b2).epsilon(1e-12));
  }
}

TEST_CASE("flux kernels compute faces and conservative updates") {
  const auto& s = table(Isa::scalar);
  const std::vector<double> cl{1, 2, 3}, cr{0.5, 0.25, 0.125}, ext{1, 2, 4, 8};
  std::vector<double> face(3);
  s.two_point_flux(face.data(), cl.data(), cr.data(), ext.data(), 3);
  CHECK(face == std::vector<double>{1.0 * 1 + 0.5 * 2, 2.0 * 2 + 0.25 * 4, 3.0 * 4 + 0.125 * 8});
  const std::vector<double> rho{1, 1};
  std::vector<double> out(2);
  s.conservative_update(out.data(), rho.data(), face.data(), 0.5, 2);
  CHECK(out[0] == 1 - 0.5 * (face[1] - face[0]));
  CHECK(out[1] == 1 - 0.5 * (face[2] - face[1]));
}

TEST_CASE("avx2 kernels are bit-identical to the scalar reference") {
  if (!isa_available(Isa::avx2)) {
    MESSAGE("avx2 unavailable, skipping");
    return;
  }
  const auto& s = table(Isa::scalar);
  const auto& v = table(Isa::avx2);
  REQUIRE(v.isa == Isa::avx2);
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> len(0, 300);
  std::vector<std::size_t> lengths = kLengths;
  for (int i = 0; i < 40; ++i) lengths.push_back(len(rng));

  for (std::size_t n : lengths) {
    CAPTURE(n);
    const auto a = random_vec(rng, n), b = random_vec(rng, n), c = random_vec(rng, n);
    const double dt = 1e-3;

    auto xs = a, xv = a;
    s.euler_update(xs.data(), b.data(), dt, c.data(), a.data(), n);
    v.euler_update(xv.data(), b.data(), dt, c.data(), a.data(), n);
    CHECK(same_bits(xs, xv));

    xs = a, xv = a;
    s.mul_accumulate(xs.data(), b.data(), c.data(), n);
    v.mul_accumulate(xv.data(), b.data(), c.data(), n);
    CHECK(same_bits(xs, xv));

    xs = a, xv = a;
    s.scale_accumulate(xs.data(), b.data(), 0.37, n);
    v.scale_accumulate(xv.data(), b.data(), 0.37, n);
    CHECK(same_bits(xs, xv));

    CHECK(same_bits(s.sum(a.data(), n), v.sum(a.data(), n)));
    CHECK(same_bits(s.sum_sq_increments(a.data(), n), v.sum_sq_increments(a.data(), n)));

    const auto ps = s.power_sums(a.data(), n), pv = v.power_sums(a.data(), n);
    CHECK(same_bits(ps.s1, pv.s1));
    CHECK(same_bits(ps.s2, pv.s2));
    CHECK(same_bits(ps.s3, pv.s3));
    CHECK(same_bits(ps.s4, pv.s4));

    const auto cs = s.cross_sums(a.data(), b.data(), n), cv = v.cross_sums(a.data(), b.data(), n);
    CHECK(same_bits(cs.a, cv.a));
    CHECK(same_bits(cs.b, cv.b));
    CHECK(same_bits(cs.aa, cv.aa));
    CHECK(same_bits(cs.bb, cv.bb));
    CHECK(same_bits(cs.ab, cv.ab));
    CHECK(same_bits(cs.a4, cv.a4));
    CHECK(same_bits(cs.b4, cv.b4));
    CHECK(same_bits(cs.a2b2, cv.a2b2));

    const auto ext = random_vec(rng, n + 1);
    std::vector<double> fs(n), fv(n);
    s.two_point_flux(fs.data(), a.data(), b.data(), ext.data(), n);
    v.two_point_flux(fv.data(), a.data(), b.data(), ext.data(), n);
    CHECK(same_bits(fs, fv));

    if (n > 0) {
      std::vector<double> us(n - 1), uv(n - 1);
      s.conservative_update(us.data(), c.data(), fs.data(), 0.3, n - 1);
      v.conservative_update(uv.data(), c.data(), fs.data(), 0.3, n - 1);
      CHECK(same_bits(us, uv));
    }
  }
}
