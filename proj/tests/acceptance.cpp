// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fail.

#include "fof/experiments.hpp"
#include "fof/surface.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>

using namespace fof;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const char* id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_budget = budget_s <= 0.0 || seconds < budget_s;
  const bool pass = o.pass && in_budget;
  failures += !pass;
  char timing[96];
  if (budget_s > 0.0) std::snprintf(timing, sizeof timing, "%.1f s (budget %.0f s)", seconds, budget_s);
  else std::snprintf(timing, sizeof timing, "%.1f s", seconds);
  std::printf("%s %s %s: %s; %s\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), timing);
  std::fflush(stdout);
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Shared corpus: 200 interval sets, k <= 6, widths >= 0.01, seed 0.
const std::vector<IntervalSet>& corpus() {
  static const auto sets = oracle::random_interval_sets(200, 0, 0.01);
  return sets;
}

ExperimentConfig sphere_config() {
  ExperimentConfig c;
  c.source.shape = ShapeSpec::parse("sphere:r=0.6,level=5");
  c.width = c.height = c.zsamples = 256;
  return c;
}

std::string p2s_list(const std::vector<SweepRow>& rows) {
  std::string s;
  for (const auto& r : rows) {
    s += (s.empty() ? "" : " ") + fmt("%g:", r.parameter) +
         (r.metrics ? fmt("%.6g", r.metrics->p2s) : std::string("empty"));
  }
  return s;
}

}  // namespace

int main() {
  criterion("AC1", "coefficient exactness", 5.0, [] {
    constexpr int order = 63;
    double worst = 0.0;
    for (const auto& set : corpus()) {
      const Eigen::VectorXd c = encode_interval_set(set, order);
      const auto q = oracle::quadrature_coefficients(set, order);
      for (Eigen::Index i = 0; i < c.size(); ++i) worst = std::max(worst, std::abs(c(i) - q[i]));
    }
    return Outcome{worst <= 1e-8, fmt("200 sets, N=%d, max |encode - quadrature| = %.3g (tol 1e-8)", order, worst)};
  });

  criterion("AC2", "truncation nesting", 0.0, [] {
    std::size_t mismatches = 0;
    for (const auto& set : corpus()) {
      LayeredIntervalGrid grid;
      grid.width = grid.height = 1;
      grid.cells = {set};
      const FofGridd full = encode_intervals(grid, 63);
      for (const int n : {3, 7, 15, 31}) {
        const auto a = truncate_channels(full, n).coefficients(), b = encode_intervals(grid, n).coefficients();
        mismatches += a.size() != b.size() ||
                      std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) != 0;
      }
    }
    return Outcome{mismatches == 0, fmt("%zu of 800 truncations differ bitwise from direct encodes", mismatches)};
  });

  criterion("AC3", "monotone ablation trend", 120.0, [] {
    auto c = sphere_config();
    c.orders = {3, 7, 15, 31, 63};
    const auto rows = cmd_ablate_n(c);
    bool ok = rows.size() == 5;
    for (const auto& r : rows) ok = ok && r.metrics.has_value();
    if (!ok) return Outcome{false, "missing rows: " + p2s_list(rows)};
    std::string chamfers;
    bool p2s_dec = true, chamfer_dec = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      chamfers += (k ? " " : "") + fmt("%d:%.6g", c.orders[k], rows[k].metrics->chamfer);
      if (k == 0) continue;
      p2s_dec = p2s_dec && rows[k].metrics->p2s < rows[k - 1].metrics->p2s;
      chamfer_dec = chamfer_dec && rows[k].metrics->chamfer < rows[k - 1].metrics->chamfer;
    }
    const double ratio = rows[0].metrics->p2s / rows[2].metrics->p2s;
    return Outcome{p2s_dec && chamfer_dec && ratio >= 5.0,
                   fmt("p2s strictly decreasing %s, chamfer strictly decreasing %s, p2s(3)/p2s(15) = %.2f (need >= 5); ",
                       p2s_dec ? "yes" : "no", chamfer_dec ? "yes" : "no", ratio) +
                       "p2s " + p2s_list(rows) + "; chamfer " + chamfers};
  });

  criterion("AC4", "round-trip accuracy", 120.0, [] {
    bool ok = true;
    std::string detail;
    for (const char* spec : {"sphere:r=0.6,level=5", "box", "torus"}) {
      ExperimentConfig c;
      c.source.shape = ShapeSpec::parse(spec);
      c.width = c.height = c.zsamples = 256;
      c.orders = {31};
      const auto rows = cmd_ablate_n(c);
      const auto& m = rows[0].metrics;
      const bool pass = m && m->chamfer <= 0.016 && m->p2s <= 0.012;
      ok = ok && pass;
      detail += (detail.empty() ? "" : ", ") +
                (m ? fmt("%s chamfer %.5f p2s %.5f", spec, m->chamfer, m->p2s) : fmt("%s empty", spec));
    }
    return Outcome{ok, detail + " (tol chamfer 0.016, p2s 0.012)"};
  });

  criterion("AC5", "noise robustness trend", 180.0, [] {
    auto c = sphere_config();
    c.orders = {15};
    c.noise_levels = {0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
    const auto rows = cmd_noise_sweep(c);
    for (const auto& r : rows) {
      if (!r.metrics) return Outcome{false, "empty reconstruction: " + p2s_list(rows)};
    }
    bool monotone = true;
    for (std::size_t k = 1; k < rows.size(); ++k) monotone = monotone && rows[k].metrics->p2s >= rows[k - 1].metrics->p2s;
    const double base = rows[0].metrics->p2s;
    const double low = rows[1].metrics->p2s / base, high = rows.back().metrics->p2s / base;
    return Outcome{monotone && low <= 1.10 && high >= 1.5,
                   fmt("non-decreasing %s, p2s(0.05)/p2s(0) = %.3f (need <= 1.10), p2s(0.30)/p2s(0) = %.2f (need >= 1.5); ",
                       monotone ? "yes" : "no", low, high) +
                       "p2s " + p2s_list(rows)};
  });

  criterion("AC6", "thin-object failure", 30.0, [] {
    const auto table = cmd_curves(parse_intervals("-0.01:0.01"), {7}, 4001, {});
    double peak = -1.0;
    for (Eigen::Index s = 0; s < table.values.rows(); ++s) {
      if (std::abs(table.values(s, 0)) <= 0.01) peak = std::max(peak, table.values(s, 2));
    }
    ExperimentConfig c;
    c.source.shape = ShapeSpec::parse("slab:t=0.02");
    c.width = c.height = c.zsamples = 256;
    c.orders = {31};
    const auto rows = cmd_ablate_n(c);
    const auto& m = rows[0].metrics;
    return Outcome{peak < 0.5 && m && m->p2s <= 0.01,
                   fmt("max f7 over the slab = %.4f (need < 0.5), N=31 slab p2s = ", peak) +
                       (m ? fmt("%.6f", m->p2s) : std::string("empty mesh")) + " (need <= 0.01)"};
  });

  criterion("AC7", "jump midpoint", 0.0, [] {
    constexpr int order = 31;
    double worst = 0.0, isolated = 0.0;
    std::size_t endpoints = 0;
    for (const auto& set : corpus()) {
      const Eigen::VectorXd c = encode_interval_set(set, order);
      for (const auto& iv : set.intervals) {
        if (iv.z_out - iv.z_in < 0.1) continue;
        for (const double z : {iv.z_in, iv.z_out}) {
          const double dev = std::abs(evaluate_series(c, z) - 0.5);
          worst = std::max(worst, dev);
          ++endpoints;
          // Diagnostic only: endpoints with no other jump within 0.1 (periodically).
          bool alone = true;
          for (const auto& other : set.intervals) {
            for (const double j : {other.z_in, other.z_out}) {
              const double gap = std::abs(std::remainder(j - z, 2.0));
              if (j != z && gap < 0.1) alone = false;
            }
          }
          if (alone) isolated = std::max(isolated, dev);
        }
      }
    }
    return Outcome{worst <= 0.02,
                   fmt("%zu endpoints of intervals with width >= 0.1, max |f31 - 0.5| = %.4f (tol 0.02); "
                       "endpoints with no other jump within 0.1: max %.4f",
                       endpoints, worst, isolated)};
  });

  criterion("AC8", "shift invariance", 0.0, [] {
    double lo = INFINITY, hi = -INFINITY;
    for (int s = 0; s < 20; ++s) {
      const double shift = -0.7 + 1.4 * s / 19.0;
      const double e = truncation_error_l2(IntervalSet{{{shift - 0.2, shift + 0.2}}}, 15);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    return Outcome{hi - lo <= 1e-9, fmt("20 shifts, L2 error in [%.12g, %.12g], spread %.3g (tol 1e-9)", lo, hi, hi - lo)};
  });

  criterion("AC9", "metric oracle equivalence", 0.0, [] {
    const auto p = oracle::random_cloud(2000, 1), g = oracle::random_cloud(2000, 2, 0.8);
    const bool chamfer_eq = chamfer_sum(oracle::as_samples(p), oracle::as_samples(g)) == oracle::brute_chamfer_sum(p, g);
    const auto gt = make_shape(ShapeSpec::parse("figure"));
    const bool p2s_eq = point_to_surface(p, gt) == oracle::brute_point_to_surface(p, gt);
    const double self = chamfer(oracle::as_samples(p), oracle::as_samples(p));
    PointSamples a(1), b(1);
    a[0].position = Vec3(0.1, -0.3, 0.2);
    b[0].position = Vec3(0.4, 0.1, 0.2);
    const double two = std::abs(chamfer(a, b) - 0.5);
    return Outcome{chamfer_eq && p2s_eq && self == 0.0 && two <= 1e-12,
                   fmt("kd-tree chamfer == brute %s, BVH p2s == brute %s, chamfer(A,A) = %g, two-point error %.3g (tol 1e-12)",
                       chamfer_eq ? "yes" : "no", p2s_eq ? "yes" : "no", self, two)};
  });

  criterion("AC10", "decode complexity shape", 0.0, [] {
    auto c = sphere_config();
    c.orders = {7, 15, 31, 63};
    const auto result = cmd_bench(c, 3);
    std::vector<double> x, y;
    std::string times;
    for (const auto& r : result.rows) {
      x.push_back(channel_count(r.order));
      y.push_back(r.decode_ms);
      times += (times.empty() ? "" : " ") + fmt("%d:%.1fms", r.order, r.decode_ms);
    }
    const auto fit = fit_line(x, y);
    return Outcome{fit.r_squared >= 0.9, fmt("R^2 = %.4f (need >= 0.9); decode ", fit.r_squared) + times};
  });

  criterion("AC11", "sampling scalability", 0.0, [] {
    double worst = 0.0;
    std::string detail;
    for (const char* spec : {"sphere:r=0.6,level=5", "figure"}) {
      MeshSource s;
      s.shape = ShapeSpec::parse(spec);
      const auto fof = cmd_encode(s, 256, 256, 31, {}).fof;
      const auto coarse = extract_mesh(fof, 256, 256, 128), fine = extract_mesh(fof, 256, 256, 256);
      const double d = chamfer(sample_surface_points(coarse, 100000, 0), sample_surface_points(fine, 100000, 0));
      worst = std::max(worst, d);
      detail += (detail.empty() ? "" : ", ") + fmt("%s %.5f", spec, d);
    }
    return Outcome{worst <= 0.032, "chamfer K=128 vs K=256: " + detail + " (tol 0.032)"};
  });

  std::printf("%d criteria failed\n", failures);
  return failures ? 1 : 0;
}
