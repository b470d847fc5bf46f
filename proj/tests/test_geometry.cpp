#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "rsma/errors.hpp"
#include "rsma/geometry.hpp"

using namespace rsma;

namespace {

RoomScenario two_user_room() {
  RoomScenario sc;
  sc.room_dims = {5.0, 5.0, 4.0};
  LedFixture left, right;
  left.position = {-1.25, 0.0, 4.0};
  right.position = {1.25, 0.0, 4.0};
  sc.fixtures = {left, right};
  PhotoDetector u1, u2;
  u1.position = {-1.5, 0.0, 0.8};
  u2.position = {1.5, 0.0, 0.8};
  sc.users = {u1, u2};
  return sc;
}

// Single-link Lambertian gain written out longhand, independent of the
// library's own helper functions.
double longhand_gain(const Eigen::Vector3d& fix, const Eigen::Vector3d& pd,
                     int q, double semi_deg, double area, double n,
                     double fov_deg, double ts) {
  const Eigen::Vector3d delta = pd - fix;
  const double d = delta.norm();
  const double cos_emission = -delta.z() / d;  // fixture points straight down
  const double cos_incidence = -delta.z() / d; // pd points straight up
  const double fov = fov_deg * M_PI / 180.0;
  if (std::acos(cos_incidence) > fov) return 0.0;
  const double m = -std::log(2.0) / std::log(std::cos(semi_deg * M_PI / 180.0));
  const double radiant = (m + 1.0) / (2.0 * M_PI) * std::pow(cos_emission, m);
  const double conc = n * n / (std::sin(fov) * std::sin(fov));
  return q * (area / (d * d)) * radiant * ts * conc * cos_incidence;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("lambertian order at reference semi-angles") {
  CHECK(lambertian_order(60.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lambertian_order(45.0) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(lambertian_order(30.0) == doctest::Approx(4.8188).epsilon(1e-3));
}

TEST_CASE("lambertian order strictly decreases with semi-angle") {
  double prev = lambertian_order(5.0);
  for (double a = 10.0; a < 90.0; a += 5.0) {
    const double m = lambertian_order(a);
    CHECK(m < prev);
    CHECK(m > 0.0);
    prev = m;
  }
}

TEST_CASE("lambertian order domain") {
  CHECK_THROWS_AS(lambertian_order(0.0), std::domain_error);
  CHECK_THROWS_AS(lambertian_order(90.0), std::domain_error);
  CHECK_THROWS_AS(lambertian_order(-10.0), std::domain_error);
}

TEST_CASE("concentrator gain is flat inside the field of view") {
  CHECK(concentrator_gain(30.0, 60.0, 1.5) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(concentrator_gain(0.0, 60.0, 1.5) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(concentrator_gain(59.9, 60.0, 1.5) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(concentrator_gain(45.0, 90.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("concentrator gain hard zero beyond the field of view") {
  CHECK(concentrator_gain(61.0, 60.0, 1.5) == 0.0);
  CHECK(concentrator_gain(60.0001, 60.0, 1.5) == 0.0);
}

TEST_CASE("concentrator gain domain") {
  CHECK_THROWS_AS(concentrator_gain(-1.0, 60.0, 1.5), std::domain_error);
  CHECK_THROWS_AS(concentrator_gain(30.0, 0.0, 1.5), std::domain_error);
  CHECK_THROWS_AS(concentrator_gain(30.0, 95.0, 1.5), std::domain_error);
}

TEST_CASE("radiant intensity reference values") {
  CHECK(radiant_intensity(1.0, 0.0) == doctest::Approx(1.0 / M_PI).epsilon(1e-12));
  CHECK(radiant_intensity(1.0, 90.0) == doctest::Approx(0.0));
  CHECK(radiant_intensity(2.0, 60.0) ==
        doctest::Approx(3.0 / (2.0 * M_PI) * 0.25).epsilon(1e-9));
  CHECK_THROWS_AS(radiant_intensity(1.0, -1.0), std::domain_error);
  CHECK_THROWS_AS(radiant_intensity(1.0, 90.5), std::domain_error);
}

TEST_CASE("fixture gain on the vertical axis") {
  LedFixture f;
  f.position = {0.0, 0.0, 4.0};
  PhotoDetector pd;
  pd.position = {0.0, 0.0, 0.8};
  // 3600 * (1e-4 / 10.24) * (1/pi) * 3, all angles zero
  CHECK(fixture_gain(f, pd) == doctest::Approx(3.357e-2).epsilon(3e-3));
  CHECK(fixture_gain(f, pd) ==
        doctest::Approx(3600.0 * (1e-4 / 10.24) * (1.0 / M_PI) * 3.0)
            .epsilon(1e-12));
}

TEST_CASE("fixture gain is exactly zero outside the field of view") {
  LedFixture f;
  f.position = {0.0, 0.0, 4.0};
  PhotoDetector pd;
  // incidence of atan(8/3.2) ~ 68 degrees > 60
  pd.position = {8.0, 0.0, 0.8};
  CHECK(fixture_gain(f, pd) == 0.0);
}

TEST_CASE("fixture gain scales linearly in the LED count") {
  LedFixture f;
  f.position = {0.3, -0.2, 4.0};
  PhotoDetector pd;
  pd.position = {0.9, 0.4, 0.8};
  LedFixture single = f;
  single.led_count = 1;
  const double one = fixture_gain(single, pd);
  CHECK(fixture_gain(f, pd) == doctest::Approx(3600.0 * one).epsilon(1e-12));
  LedFixture doubled = f;
  doubled.led_count = 7200;
  CHECK(fixture_gain(doubled, pd) ==
        doctest::Approx(2.0 * fixture_gain(f, pd)).epsilon(1e-12));
}

TEST_CASE("gain decreases with vertical distance under the fixture") {
  LedFixture f;
  f.position = {0.0, 0.0, 4.0};
  PhotoDetector pd;
  double prev = -1.0;
  // walking the detector down lengthens the link, so the gain must shrink
  for (double z = 3.0; z > 0.3; z -= 0.5) {
    pd.position = {0.0, 0.0, z};
    const double g = fixture_gain(f, pd);
    if (prev >= 0.0) CHECK(g < prev);
    prev = g;
  }
}

TEST_CASE("coincident fixture and detector rejected") {
  LedFixture f;
  f.position = {1.0, 1.0, 2.0};
  PhotoDetector pd;
  pd.position = {1.0, 1.0, 2.0};
  CHECK_THROWS_AS(fixture_gain(f, pd), std::domain_error);
}

TEST_CASE("channel matrix mirror symmetry") {
  const auto sc = two_user_room();
  const auto H = channel_matrix(sc);
  REQUIRE(H.user_count() == 2);
  REQUIRE(H.fixture_count() == 2);
  CHECK(H.gains(0, 0) == doctest::Approx(H.gains(1, 1)).epsilon(1e-12));
  CHECK(H.gains(0, 1) == doctest::Approx(H.gains(1, 0)).epsilon(1e-12));
  CHECK(H.gains.minCoeff() >= 0.0);
  CHECK(H.gains.allFinite());
}

TEST_CASE("channel matrix single link equals fixture gain") {
  RoomScenario sc;
  LedFixture f;
  f.position = {0.0, 0.0, 4.0};
  sc.fixtures = {f};
  PhotoDetector pd;
  pd.position = {0.4, -0.3, 0.8};
  sc.users = {pd};
  const auto H = channel_matrix(sc);
  REQUIRE(H.gains.rows() == 1);
  REQUIRE(H.gains.cols() == 1);
  CHECK(H.gains(0, 0) == doctest::Approx(fixture_gain(f, pd)).epsilon(1e-15));
}

TEST_CASE("channel matrix entries match a longhand oracle") {
  const auto sc = two_user_room();
  const auto H = channel_matrix(sc);
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      const double expect =
          longhand_gain(sc.fixtures[j].position, sc.users[k].position, 3600,
                        60.0, 1e-4, 1.5, 60.0, 1.0);
      CHECK(H.gains(k, j) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  // frozen magnitudes for the bundled 2-LED scenario-1 geometry
  CHECK(H.gains(0, 0) == doctest::Approx(3.31657e-2).epsilon(1e-4));
  CHECK(H.gains(0, 1) == doctest::Approx(1.11074e-2).epsilon(1e-4));
}

TEST_CASE("scenario validation names the failing field") {
  auto sc = two_user_room();
  sc.users[0].fov_deg = 120.0;
  CHECK_THROWS_AS(sc.validate(), ScenarioError);
  try {
    sc.validate();
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("fov") != std::string::npos);
  }
}

TEST_CASE("scenario validation rejects bad geometry") {
  auto sc = two_user_room();
  sc.users[0].position = {9.0, 0.0, 0.8};  // outside the room
  CHECK_THROWS_AS(sc.validate(), ScenarioError);

  sc = two_user_room();
  sc.fixtures.clear();
  CHECK_THROWS_AS(sc.validate(), ScenarioError);

  sc = two_user_room();
  sc.fixtures[0].orientation = {0.0, 0.0, -2.0};  // not unit length
  CHECK_THROWS_AS(sc.validate(), ScenarioError);

  sc = two_user_room();
  sc.noise_mode = NoiseMode::Physical;  // but no noise_params
  CHECK_THROWS_AS(sc.validate(), ScenarioError);

  CHECK_NOTHROW(two_user_room().validate());
}

}  // TEST_SUITE
