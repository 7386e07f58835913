#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fof/metrics.hpp"
#include "fof/spatial.hpp"
#include "fof/surface.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace fof;

namespace {

// Square [-s, s]^2 split into two triangles, at height z, normal +z.
TriangleMesh square(double s, double z) {
  TriangleMesh m;
  m.vertices.resize(4, 3);
  m.vertices << -s, -s, z, s, -s, z, s, s, z, -s, s, z;
  m.faces.resize(2, 3);
  m.faces << 0, 1, 2, 0, 2, 3;
  return m;
}

TriangleMesh round_trip(const TriangleMesh& mesh, int size, int order) {
  return extract_mesh(encode_intervals(rasterize_intervals(mesh, size, size), order), size, size, size);
}

}  // namespace

TEST_CASE("z_align") {
  const auto gt = oracle::as_samples(oracle::random_cloud(300, 1));
  SUBCASE("identical sets") { CHECK(z_align(gt, gt).offset == 0.0); }
  SUBCASE("shifted copy") {
    auto pred = gt;
    for (auto& p : pred) p.position.z() += 0.2;
    const auto a = z_align(pred, gt);
    CHECK(a.offset == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(chamfer(a.aligned, gt) <= 1e-12);
  }
  SUBCASE("random clouds share the mean depth") {
    const auto pred = oracle::as_samples(oracle::random_cloud(500, 2, 0.7));
    const auto a = z_align(pred, gt);
    double mp = 0, mg = 0;
    for (const auto& p : a.aligned) mp += p.position.z();
    for (const auto& p : gt) mg += p.position.z();
    CHECK(std::abs(mp / 500 - mg / 300) <= 1e-12);
  }
  SUBCASE("empty input") { CHECK_THROWS_AS(z_align({}, gt), std::invalid_argument); }
}

TEST_CASE("chamfer") {
  SUBCASE("identical sets") {
    const auto a = oracle::as_samples(oracle::random_cloud(1000, 3));
    CHECK(chamfer(a, a) == 0.0);
  }
  SUBCASE("two single points") {
    PointSamples a(1), b(1);
    a[0].position = Vec3(0.1, 0.2, 0.3);
    b[0].position = Vec3(0.4, -0.2, 0.3);
    CHECK(std::abs(chamfer(a, b) - 0.5) <= 1e-12);
  }
  SUBCASE("kd-tree equals brute force") {
    for (const std::uint64_t seed : {4u, 5u, 6u}) {
      const auto p = oracle::random_cloud(2000, seed);
      const auto g = oracle::random_cloud(1700, seed + 100, 0.8);
      CHECK(chamfer_sum(oracle::as_samples(p), oracle::as_samples(g)) == oracle::brute_chamfer_sum(p, g));
    }
  }
  SUBCASE("nearest neighbour queries equal brute force, duplicates included") {
    auto cloud = oracle::random_cloud(1500, 7);
    cloud.bottomRows(300) = cloud.topRows(300);  // exact duplicates
    const KdTree tree(cloud);
    const auto queries = oracle::random_cloud(2000, 8, 1.2);
    for (Eigen::Index q = 0; q < queries.rows(); ++q) {
      const Vec3 query = queries.row(q).transpose();
      const auto n = tree.nearest(query);
      REQUIRE(n.squared_distance == oracle::brute_nearest_squared(cloud, query));
      Eigen::Index first = -1;
      for (Eigen::Index r = 0; r < cloud.rows(); ++r) {
        if ((cloud.row(r).transpose() - query).squaredNorm() == n.squared_distance) {
          first = r;
          break;
        }
      }
      CHECK(n.index == first);
    }
  }
  SUBCASE("symmetric, translation invariant, scale covariant") {
    const auto a = oracle::as_samples(oracle::random_cloud(800, 9));
    const auto b = oracle::as_samples(oracle::random_cloud(600, 10, 0.5));
    CHECK(std::abs(chamfer(a, b) - chamfer(b, a)) <= 1e-12);
    auto at = a, bt = b, as = a, bs = b;
    const Vec3 t(0.3, -0.2, 0.1);
    for (auto& p : at) p.position += t;
    for (auto& p : bt) p.position += t;
    for (auto& p : as) p.position *= 2.5;
    for (auto& p : bs) p.position *= 2.5;
    CHECK(chamfer(at, bt) == doctest::Approx(chamfer(a, b)).epsilon(1e-9));
    CHECK(std::abs(chamfer(as, bs) - 2.5 * chamfer(a, b)) <= 1e-9);
  }
  SUBCASE("aggregation averages the sums first") {
    const std::vector<double> sums = {0.02, 0.08};
    CHECK(chamfer_aggregate(sums) == doctest::Approx(std::sqrt(0.05 / 2)));
    CHECK_THROWS_AS(chamfer_aggregate({}), std::invalid_argument);
  }
  SUBCASE("empty input") { CHECK_THROWS_AS(chamfer({}, {}), std::invalid_argument); }
}

TEST_CASE("closest point on a triangle") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20000; ++t) {
    const Vec3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng)), c(u(rng), u(rng), u(rng));
    const Vec3 p(2 * u(rng), 2 * u(rng), 2 * u(rng));
    const double got = (p - closest_point_on_triangle(p, a, b, c)).norm();
    REQUIRE(std::abs(got - oracle::triangle_distance(p, a, b, c)) <= 1e-12);
  }
  // Degenerate triangles fall back to segment distance.
  const Vec3 p(0.3, 0.7, 0.2);
  CHECK((p - closest_point_on_triangle(p, Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0))).norm() ==
        doctest::Approx(std::hypot(0.7, 0.2)));
  CHECK((p - closest_point_on_triangle(p, Vec3(0, 0, 0), Vec3(0, 0, 0), Vec3(0, 0, 0))).norm() ==
        doctest::Approx(p.norm()));
}

TEST_CASE("point to surface") {
  SUBCASE("mesh against itself") {
    const auto s = make_sphere(0.6, 3);
    CHECK(p2s(s, s, 5000, 1) <= 1e-15);
    CHECK(p2s_vertices(s, s) == 0.0);
  }
  SUBCASE("parallel planes") {
    CHECK(std::abs(p2s(square(1.0, 0.1), square(1.0, 0.0), 10000, 2) - 0.1) <= 1e-9);
  }
  SUBCASE("BVH equals brute force") {
    const auto gt = make_shape(ShapeSpec::parse("figure:level=1"));
    const auto pts = oracle::random_cloud(2000, 13);
    CHECK(point_to_surface(pts, gt) == oracle::brute_point_to_surface(pts, gt));
    const TriangleBvh bvh(gt);
    for (Eigen::Index r = 0; r < 300; ++r) {
      const Vec3 q = pts.row(r).transpose();
      CHECK(bvh.closest(q).distance == oracle::brute_surface_distance(gt, q));
    }
  }
  SUBCASE("mean is at most the max") {
    const auto gt = make_sphere(0.5, 2);
    const auto pts = oracle::random_cloud(500, 14);
    double worst = 0.0;
    for (Eigen::Index r = 0; r < pts.rows(); ++r) worst = std::max(worst, oracle::brute_surface_distance(gt, pts.row(r).transpose()));
    CHECK(point_to_surface(pts, gt) <= worst);
  }
  SUBCASE("translation invariant and scale covariant") {
    const auto a = make_sphere(0.5, 3), b = make_torus(0.45, 0.15, 48, 24);
    const double base = p2s(a, b, 4000, 15);
    CHECK(p2s(translate(a, Vec3(0.1, 0.2, -0.3)), translate(b, Vec3(0.1, 0.2, -0.3)), 4000, 15) ==
          doctest::Approx(base).epsilon(1e-9));
    CHECK(std::abs(p2s(scale(a, 1.7), scale(b, 1.7), 4000, 15) - 1.7 * base) <= 1e-9);
  }
  SUBCASE("empty mesh") { CHECK_THROWS_AS(p2s(TriangleMesh{}, square(1, 0), 10, 0), std::invalid_argument); }
}

TEST_CASE("normal images") {
  SUBCASE("mesh against itself") {
    const auto s = make_sphere(0.6, 3);
    CHECK(normal_image_error(s, s, 64, 64) == 0.0);
  }
  SUBCASE("perpendicular normals over the same pixels") {
    NormalImage a{4, 4, {}, std::vector<std::uint8_t>(16, 1)};
    NormalImage b = a;
    a.normals = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>::Zero(16, 3);
    b.normals = a.normals;
    a.normals.col(2).setOnes();
    b.normals.col(0).setOnes();
    CHECK(normal_image_l1(a, b) == 2.0);
  }
  SUBCASE("tilted plane") {
    auto tilted = square(0.5, 0.0);
    for (Eigen::Index v = 0; v < 4; ++v) tilted.vertices(v, 2) = tilted.vertices(v, 0);
    // Normals (0, 0, 1) and (-1, 0, 1)/sqrt(2): L1 difference 1 per pixel.
    CHECK(normal_image_error(square(0.5, 0.0), tilted, 32, 32) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("silhouette mismatch counts against zero") {
    // The small square covers a quarter of the large one's pixels.
    const double e = normal_image_error(square(0.25, 0.0), square(0.5, 0.0), 32, 32);
    CHECK(e == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("first hit is the front-most surface") {
    const auto near = square(0.5, -0.5);
    auto far = square(0.5, 0.5);
    far.faces.col(1).swap(far.faces.col(2));
    const auto image = render_normal_image(merge_meshes({far, near}), 8, 8);
    CHECK(image.normals(3 * 8 + 3, 2) == 1.0);
  }
  SUBCASE("sphere against its round trip") {
    const auto s = make_sphere(0.6, 5);
    CHECK(normal_image_error(round_trip(s, 256, 31), s, 512, 512) <= 0.1);
  }
}

TEST_CASE("evaluate_meshes") {
  const auto s = make_sphere(0.6, 4);
  MetricOptions options;
  options.sample_count = 20000;
  options.seed = 4;
  SUBCASE("mesh against itself") {
    const auto r = evaluate_meshes(s, s, options);
    CHECK(r.chamfer == 0.0);
    CHECK(r.p2s <= 1e-15);
    CHECK(r.normal_error == 0.0);
    CHECK(r.sample_count == 20000);
    CHECK(r.seed == 4);
  }
  SUBCASE("shifted copy is aligned away") {
    const auto r = evaluate_meshes(translate(s, Vec3(0, 0, 0.2)), s, options);
    CHECK(r.chamfer <= 1e-12);
    CHECK(r.p2s <= 1e-12);
    CHECK(r.normal_error <= 1e-12);
  }
  SUBCASE("vertex P2S") {
    options.p2s_from_vertices = true;
    CHECK(evaluate_meshes(s, s, options).p2s == 0.0);
  }
  SUBCASE("CSV row") {
    MetricReport r{0.5, 0.25, 0.125, 100, 7};
    CHECK(MetricReport::csv_header() == "chamfer,p2s,normal_error,sample_count,seed");
    CHECK(r.csv_row() == "0.5,0.25,0.125,100,7");
  }
}
