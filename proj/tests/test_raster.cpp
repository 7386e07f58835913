#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fof/raster.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace fof;

namespace {

double rasterized_volume(const LayeredIntervalGrid& g) {
  double total = 0.0;
  for (const auto& c : g.cells) total += c.inside_length();
  return total * 4.0 / (static_cast<double>(g.width) * g.height);
}

TriangleMesh octahedron(double r) {
  TriangleMesh m;
  m.vertices.resize(6, 3);
  m.vertices << r, 0, 0, -r, 0, 0, 0, r, 0, 0, -r, 0, 0, 0, r, 0, 0, -r;
  m.faces.resize(8, 3);
  m.faces << 0, 2, 4, 2, 1, 4, 1, 3, 4, 3, 0, 4, 2, 0, 5, 1, 2, 5, 3, 1, 5, 0, 3, 5;
  return m;
}

}  // namespace

TEST_CASE("pixel_to_xy") {
  CHECK(pixel_to_xy(0, 0, 2, 2) == Vec2(-0.5, 0.5));
  CHECK(pixel_to_xy(1, 1, 3, 3) == Vec2(0.0, 0.0));
  CHECK(pixel_to_xy(255, 255, 256, 256) == Vec2(0.99609375, -0.99609375));
  CHECK_THROWS_AS(pixel_to_xy(2, 0, 2, 2), std::out_of_range);
  CHECK_THROWS_AS(pixel_to_xy(0, -1, 2, 2), std::out_of_range);
}

TEST_CASE("interval_occupancy") {
  const IntervalSet s{{{-0.5, 0.5}}};
  CHECK(interval_occupancy(s, 0.0) == 1.0);
  CHECK(interval_occupancy(s, 0.5) == 0.5);
  CHECK(interval_occupancy(s, -0.5) == 0.5);
  CHECK(interval_occupancy(s, 0.9) == 0.0);
  CHECK(interval_occupancy(IntervalSet{}, 0.0) == 0.0);

  SUBCASE("integrates to the inside length") {
    for (const auto& set : oracle::random_interval_sets(50, 7)) {
      const double q = oracle::occupancy_integral(set, [](double) { return 1.0; });
      CHECK(std::abs(q - set.inside_length()) <= 1e-6);
    }
  }
}

TEST_CASE("view ray intersection") {
  const Vec3 a(0, 0, 0.2), b(1, 0, 0.2), c(1, 1, 0.2), d(0, 1, 0.2);
  SUBCASE("interior point of a planar triangle") {
    const auto z = intersect_view_ray(Vec3(0, 0, 0), Vec3(1, 0, 1), Vec3(0, 1, 2), 0.25, 0.25);
    REQUIRE(z);
    CHECK(*z == doctest::Approx(0.75));
  }
  SUBCASE("shared diagonal is owned by exactly one triangle") {
    for (const double t : {0.1, 0.25, 0.5, 0.9}) {
      const int hits = intersect_view_ray(a, b, c, t, t).has_value() +
                       intersect_view_ray(a, c, d, t, t).has_value();
      CHECK(hits == 1);
      // Either winding of the second triangle.
      const int hits2 = intersect_view_ray(a, b, c, t, t).has_value() +
                        intersect_view_ray(d, c, a, t, t).has_value();
      CHECK(hits2 == 1);
    }
  }
  SUBCASE("a vertex shared by a fan is owned by exactly one triangle") {
    const Vec3 centre(0, 0, 0.1);
    int hits = 0;
    for (int k = 0; k < 7; ++k) {
      const double t0 = 2 * M_PI * k / 7, t1 = 2 * M_PI * (k + 1) / 7;
      const Vec3 p(std::cos(t0), std::sin(t0), 0.3), q(std::cos(t1), std::sin(t1), 0.3);
      hits += intersect_view_ray(centre, p, q, 0.0, 0.0).has_value();
    }
    CHECK(hits == 1);
  }
  SUBCASE("edge-on triangle is never hit") {
    CHECK_FALSE(intersect_view_ray(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.5, 0, 1), 0.5, 0.0));
  }
  SUBCASE("outside") { CHECK_FALSE(intersect_view_ray(a, b, c, 1.5, 0.5)); }
}

TEST_CASE("rasterize_intervals on known geometry") {
  SUBCASE("box centre and corner pixels") {
    const auto g = rasterize_intervals(make_box(Vec3(0.5, 0.5, 0.5)), 128, 128);
    const auto& centre = g.at(64, 64);
    REQUIRE(centre.size() == 1);
    CHECK(std::abs(centre.intervals[0].z_in + 0.5) <= 1e-9);
    CHECK(std::abs(centre.intervals[0].z_out - 0.5) <= 1e-9);
    CHECK(g.at(0, 0).empty());
    CHECK(g.at(127, 127).empty());
    CHECK(g.at(0, 127).empty());
    CHECK(g.warnings == 0);
  }
  SUBCASE("two stacked slabs give two intervals") {
    const auto lower = translate(make_box(Vec3(0.5, 0.5, 0.1)), Vec3(0, 0, -0.5));
    const auto upper = translate(make_box(Vec3(0.5, 0.5, 0.1)), Vec3(0, 0, 0.5));
    const auto g = rasterize_intervals(merge_meshes({lower, upper}), 64, 64);
    const auto& s = g.at(20, 40);
    REQUIRE(s.size() == 2);
    CHECK(s.intervals[0].z_in == doctest::Approx(-0.6).epsilon(1e-12));
    CHECK(s.intervals[0].z_out == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(s.intervals[1].z_in == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(s.intervals[1].z_out == doctest::Approx(0.6).epsilon(1e-12));
  }
  SUBCASE("rays along octahedron edges") {
    // W = 5 puts pixel centres on the apexes and on edges through them.
    const auto g = rasterize_intervals(octahedron(0.75), 5, 5);
    REQUIRE(g.at(2, 2).size() == 1);
    CHECK(g.at(2, 2).intervals[0].z_in == -0.75);
    CHECK(g.at(2, 2).intervals[0].z_out == 0.75);
    REQUIRE(g.at(3, 2).size() == 1);
    CHECK(g.at(3, 2).intervals[0].z_out == doctest::Approx(0.35));
    CHECK(g.warnings == 0);
    for (const auto& c : g.cells) CHECK(c.is_valid());
  }
  SUBCASE("open surface produces odd-hit warnings") {
    TriangleMesh tri;
    tri.vertices.resize(3, 3);
    tri.vertices << -0.9, -0.9, 0, 0.9, -0.9, 0, 0, 0.9, 0;
    tri.faces.resize(1, 3);
    tri.faces << 0, 1, 2;
    const auto g = rasterize_intervals(tri, 16, 16);
    CHECK(g.warnings > 0);
    for (const auto& c : g.cells) CHECK(c.empty());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(rasterize_intervals(make_sphere(0.5, 1), 0, 8), std::invalid_argument);
    CHECK_THROWS_AS(rasterize_intervals(make_sphere(0.5, 1), 8, 0), std::invalid_argument);
    CHECK_THROWS_AS(rasterize_intervals(translate(make_sphere(0.5, 1), Vec3(0.6, 0, 0)), 8, 8),
                    std::invalid_argument);
  }
}

TEST_CASE("synthetic shapes rasterize without warnings") {
  for (const char* spec : {"sphere:r=0.6,level=4", "box", "slab", "torus", "figure"}) {
    const auto mesh = make_shape(ShapeSpec::parse(spec));
    for (const int n : {2, 3, 17, 64, 128, 255, 256, 512}) {
      CAPTURE(spec);
      CAPTURE(n);
      const auto g = rasterize_intervals(mesh, n, n);
      CHECK(g.warnings == 0);
      for (const auto& c : g.cells) REQUIRE(c.is_valid());
    }
  }
  SUBCASE("non-square grids") {
    const auto g = rasterize_intervals(make_shape(ShapeSpec::parse("figure")), 200, 77);
    CHECK(g.warnings == 0);
  }
}

TEST_CASE("figure has up to five layers") {
  const auto g = rasterize_intervals(make_shape(ShapeSpec::parse("figure")), 128, 128);
  std::size_t deepest = 0;
  for (const auto& c : g.cells) deepest = std::max(deepest, c.size());
  CHECK(deepest >= 3);
  CHECK(deepest <= 6);
}

TEST_CASE("rasterized volume matches the mesh volume") {
  for (const char* spec : {"sphere:r=0.6,level=5", "box:hx=0.5,hy=0.3,hz=0.4", "torus"}) {
    CAPTURE(spec);
    const auto mesh = make_shape(ShapeSpec::parse(spec));
    const double v = rasterized_volume(rasterize_intervals(mesh, 256, 256));
    CHECK(std::abs(v - signed_volume(mesh)) <= 0.02 * signed_volume(mesh));
  }
  // Against the analytic sphere too (tessellation error included).
  const double v = rasterized_volume(rasterize_intervals(make_sphere(0.6, 5), 256, 256));
  CHECK(std::abs(v - 4.0 / 3.0 * M_PI * 0.216) <= 0.02 * 4.0 / 3.0 * M_PI * 0.216);
}

TEST_CASE("interval sets at shared pixel centres do not depend on the grid") {
  const auto mesh = make_shape(ShapeSpec::parse("figure"));
  const auto coarse = rasterize_intervals(mesh, 40, 30);
  const auto fine = rasterize_intervals(mesh, 120, 90);
  for (int j = 0; j < 30; ++j) {
    for (int i = 0; i < 40; ++i) {
      REQUIRE(pixel_to_xy(i, j, 40, 30) == pixel_to_xy(3 * i + 1, 3 * j + 1, 120, 90));
      CHECK(coarse.at(i, j) == fine.at(3 * i + 1, 3 * j + 1));
    }
  }
}

TEST_CASE("winding does not affect parity pairing") {
  auto sphere = make_sphere(0.6, 3);
  const auto reference = rasterize_intervals(sphere, 64, 64);
  for (Eigen::Index f = 0; f < sphere.num_faces(); f += 3) std::swap(sphere.faces(f, 1), sphere.faces(f, 2));
  const auto flipped = rasterize_intervals(sphere, 64, 64);
  CHECK(flipped.warnings == 0);
  for (std::size_t p = 0; p < reference.cells.size(); ++p) {
    const auto& r = reference.cells[p].intervals;
    const auto& f = flipped.cells[p].intervals;
    REQUIRE(r.size() == f.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
      CHECK(std::abs(r[k].z_in - f[k].z_in) <= 1e-12);
      CHECK(std::abs(r[k].z_out - f[k].z_out) <= 1e-12);
    }
  }
}

TEST_CASE("first hits") {
  const auto mesh = make_box(Vec3(0.5, 0.5, 0.5));
  const auto hits = rasterize_first_hits(mesh, 16, 16);
  const auto& centre = hits[8 * 16 + 8];
  REQUIRE(centre);
  CHECK(centre->z == doctest::Approx(-0.5));
  CHECK(face_normal(mesh, centre->face).z() == doctest::Approx(-1.0));
  CHECK_FALSE(hits[0]);
}

TEST_CASE("interval CSV dump") {
  const auto g = rasterize_intervals(make_box(Vec3(0.5, 0.5, 0.5)), 4, 4);
  const auto path = testing::scratch("intervals.csv");
  write_intervals_csv(g, path);
  const auto text = testing::read_bytes(path);
  CHECK(text.rfind("i,j,k,z_in,z_out\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}
