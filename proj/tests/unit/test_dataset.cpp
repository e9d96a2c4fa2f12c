#include <cmath>
#include <filesystem>
#include <numbers>

#include <doctest.h>

#include "oracles.hpp"
#include "pvmincq/dataset.hpp"

using namespace pvmincq;

namespace {

double distance_to_upper_arc(double x, double y) {
  // Points (cos t, sin t), t in [0, pi]
  if (y >= 0.0) return std::abs(std::hypot(x, y) - 1.0);
  return std::min(std::hypot(x - 1.0, y), std::hypot(x + 1.0, y));
}

double distance_to_lower_arc(double x, double y) {
  // Points (1 - cos t, 0.5 - sin t), t in [0, pi]
  return distance_to_upper_arc(1.0 - x, 0.5 - y);
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("moons have the requested class sizes") {
  const LabeledSample s = generate_moons(150, 150, 0.0, 7);
  CHECK(s.size() == 300);
  CHECK(s.dim() == 2);
  CHECK(s.count(1) == 150);
  CHECK(s.count(-1) == 150);
}

TEST_CASE("evenly spaced single point sits at the arc endpoint") {
  const LabeledSample s = generate_moons(1, 1, 0.0, 0, ArcSampling::evenly_spaced);
  REQUIRE(s.size() == 2);
  std::size_t pos = s.label(0) == 1 ? 0 : 1;
  CHECK(s.point(pos)[0] == doctest::Approx(1.0));
  CHECK(s.point(pos)[1] == doctest::Approx(0.0));
}

TEST_CASE("generation is reproducible from the seed") {
  CHECK(generate_moons(150, 150, 0.05, 7) == generate_moons(150, 150, 0.05, 7));
  CHECK_FALSE(generate_moons(150, 150, 0.05, 7) == generate_moons(150, 150, 0.05, 8));
}

TEST_CASE("noise-free points lie on their arcs") {
  for (ArcSampling arc : {ArcSampling::uniform, ArcSampling::evenly_spaced}) {
    const LabeledSample s = generate_moons(40, 55, 0.0, 3, arc);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double x = s.point(i)[0], y = s.point(i)[1];
      CHECK((s.label(i) > 0 ? distance_to_upper_arc(x, y) : distance_to_lower_arc(x, y)) < 1e-9);
    }
  }
}

TEST_CASE("generator rejects empty classes and bad noise") {
  CHECK_THROWS_AS(generate_moons(0, 5, 0.0, 1), SampleError);
  CHECK_THROWS_AS(generate_moons(5, 0, 0.0, 1), SampleError);
  CHECK_THROWS_AS(generate_moons(5, 5, -0.1, 1), SampleError);
  CHECK_THROWS_AS(generate_moons(5, 5, std::nan(""), 1), SampleError);
}

TEST_CASE("samples validate their contents") {
  PointMatrix p(2, 2);
  p << 0, 1, 0, 1;
  CHECK_THROWS_AS(LabeledSample(p, {1, 0}), SampleError);
  CHECK_THROWS_AS(LabeledSample(p, {1}), SampleError);
  CHECK_THROWS_AS(UnlabeledSample(PointMatrix(2, 0)), SampleError);
  p(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(UnlabeledSample{p}, SampleError);
}

TEST_CASE("full turn is the identity") {
  const LabeledSample s = generate_moons(30, 30, 0.05, 11);
  const LabeledSample r = apply_shift(s, Rotation{360.0, std::nullopt});
  CHECK((r.points() - s.points()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("two 20 degree turns equal one 40 degree turn") {
  const LabeledSample s = generate_moons(30, 30, 0.05, 12);
  const Rotation r20{20.0, Eigen::Vector2d(0.5, 0.25)};
  const Rotation r40{40.0, Eigen::Vector2d(0.5, 0.25)};
  const PointMatrix twice = apply_shift(apply_shift(s.points(), r20), r20);
  CHECK((twice - apply_shift(s.points(), r40)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rotation is anticlockwise about the centre") {
  PointMatrix p(2, 1);
  p << 1, 0;
  const PointMatrix q = apply_shift(p, Rotation{90.0, Eigen::Vector2d(0.0, 0.0)});
  CHECK(q(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(q(1, 0) == doctest::Approx(1.0));
  // default centre is the sample centroid, which a single point leaves fixed
  CHECK((apply_shift(p, Rotation{90.0, std::nullopt}) - p).norm() < 1e-12);
}

TEST_CASE("translation moves every point by the offset") {
  PointMatrix p = PointMatrix::Zero(2, 1);
  const PointMatrix q = apply_shift(p, Translation{Eigen::Vector2d(1.0, 0.0)});
  CHECK(q(0, 0) == 1.0);
  CHECK(q(1, 0) == 0.0);
  CHECK_THROWS_AS(apply_shift(p, Translation{Eigen::Vector3d(1, 0, 0)}), SampleError);
  CHECK_THROWS_AS(apply_shift(p, Translation{Eigen::Vector2d(std::nan(""), 0)}), SampleError);
}

TEST_CASE("rotation angle must lie in (0, 360]") {
  const PointMatrix p = PointMatrix::Ones(2, 3);
  CHECK_THROWS_AS(apply_shift(p, Rotation{0.0, std::nullopt}), SampleError);
  CHECK_THROWS_AS(apply_shift(p, Rotation{-10.0, std::nullopt}), SampleError);
  CHECK_THROWS_AS(apply_shift(p, Rotation{400.0, std::nullopt}), SampleError);
  CHECK_THROWS_AS(apply_shift(PointMatrix::Ones(3, 3), Rotation{20.0, std::nullopt}), SampleError);
}

TEST_CASE("property: shifts keep sizes and labels, rotations keep distances") {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const LabeledSample s = generate_moons(oracle::uniform_index(rng, 1, 20), oracle::uniform_index(rng, 1, 20),
                                           0.1, rng());
    const Rotation rot{oracle::uniform(rng, 1.0, 359.0), std::nullopt};
    const LabeledSample r = apply_shift(s, rot);
    const LabeledSample t = apply_shift(s, Translation{Eigen::Vector2d(oracle::uniform(rng, -3, 3), 1.0)});
    CHECK(r.size() == s.size());
    CHECK(t.size() == s.size());
    CHECK(r.labels() == s.labels());
    CHECK(t.labels() == s.labels());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < s.points().cols(); ++i)
      for (Eigen::Index j = 0; j < s.points().cols(); ++j)
        worst = std::max(worst, std::abs(oracle::euclid(s.points(), i, s.points(), j) -
                                         oracle::euclid(r.points(), i, r.points(), j)));
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("csv with header x1,x2,y and three rows") {
  const AnySample a = parse_csv("x1,x2,y\n0,0,1\n1,0.5,-1\n2,1,1\n");
  REQUIRE(std::holds_alternative<LabeledSample>(a));
  const auto& s = std::get<LabeledSample>(a);
  CHECK(s.size() == 3);
  CHECK(s.dim() == 2);
  CHECK(s.labels() == std::vector<Label>{1, -1, 1});
}

TEST_CASE("csv rejects labels outside {-1, +1} with the line number") {
  try {
    parse_csv("x1,x2,y\n0,0,1\n1,1,0\n");
    FAIL("expected an error");
  } catch (const CsvError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("csv reports malformed rows") {
  CHECK_THROWS_AS(parse_csv("x1,x2,y\n0,0\n"), CsvError);
  CHECK_THROWS_AS(parse_csv("x1,x2,y\n0,abc,1\n"), CsvError);
  CHECK_THROWS_AS(parse_csv("x1,x2,y\n"), CsvError);
  CHECK_THROWS_AS(parse_csv("x1,x2\n1,inf\n"), CsvError);
}

TEST_CASE("csv without a y column is unlabelled") {
  const AnySample a = parse_csv("x1,x2\n0,0\n1,1\n");
  REQUIRE(std::holds_alternative<UnlabeledSample>(a));
  CHECK(std::get<UnlabeledSample>(a).size() == 2);
  CHECK(std::holds_alternative<UnlabeledSample>(parse_csv("0.5,0.25\n1,2\n")));
}

TEST_CASE("property: csv round trip is exact") {
  const auto dir = std::filesystem::temp_directory_path() / "pvmincq-csv-test";
  std::filesystem::create_directories(dir);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LabeledSample s = generate_moons(7 + seed, 3 + seed, 0.3, seed);
    write_csv(s, dir / "s.csv");
    CHECK(std::get<LabeledSample>(read_csv(dir / "s.csv")) == s);
    write_csv(s.unlabeled(), dir / "u.csv");
    CHECK(std::get<UnlabeledSample>(read_csv(dir / "u.csv")) == s.unlabeled());
  }
  std::filesystem::remove_all(dir);
}

}
