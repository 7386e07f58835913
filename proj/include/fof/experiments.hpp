#pragma once

#include "fof/codec.hpp"
#include "fof/geometry.hpp"
#include "fof/metrics.hpp"
#include "fof/raster.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fof {

/// Either a mesh file (normalized into the canonical cube unless
/// keep_coordinates is set) or a synthetic shape, which is already in
/// canonical coordinates and used as is.
struct MeshSource {
  std::optional<std::filesystem::path> mesh_path;
  std::optional<ShapeSpec> shape;
  bool keep_coordinates = false;
  double margin = 0.05;
};

TriangleMesh load_source(const MeshSource& source);

struct ExperimentConfig {
  MeshSource source;
  int width = 256;
  int height = 256;
  std::vector<int> orders = {3, 7, 15, 31};
  int zsamples = 256;
  std::vector<double> noise_levels = {0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30};
  std::uint64_t seed = 0;
  std::size_t sample_count = 100000;
  std::filesystem::path out_dir;

  /// Orders >= 1 ascending, noise levels >= 0 ascending, W, H, K in [2, 4096].
  void validate() const;
};

/// One sweep step. `metrics` is empty when the reconstruction has no
/// triangles (e.g. a slab too thin for the order).
struct SweepRow {
  double parameter = 0.0;
  std::optional<MetricReport> metrics;
  std::size_t faces = 0;
};

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& parameter_name,
                     const std::filesystem::path& path);

// encode / decode ------------------------------------------------------------

struct EncodeResult {
  FofGridd fof;
  std::size_t warnings = 0;
};

/// normalize -> rasterize -> encode -> write_fof (when out is non-empty).
EncodeResult cmd_encode(const MeshSource& source, int width, int height, int order,
                        const std::filesystem::path& out);

/// read_fof -> resize (when width/height differ) -> decode -> marching cubes
/// -> save_mesh (when out is non-empty). Width/height of 0 keep the FOF size.
TriangleMesh cmd_decode(const std::filesystem::path& fof_path, int width, int height, int samples,
                        const std::filesystem::path& out);

// sweeps ---------------------------------------------------------------------

/// Encodes once at the largest order, truncates to each order, extracts and
/// scores against the source mesh.
std::vector<SweepRow> cmd_ablate_n(const ExperimentConfig& config);

/// Encodes at config.orders.back(), masks, injects relative noise per level
/// (sub-seed seed ^ level index), extracts and scores.
std::vector<SweepRow> cmd_noise_sweep(const ExperimentConfig& config);

// 1D curves ------------------------------------------------------------------

/// Columns: z, exact occupancy, then one truncated reconstruction per order.
struct CurveTable {
  std::vector<int> orders;
  Eigen::MatrixXd values;  // samples x (2 + orders)
};

CurveTable cmd_curves(const IntervalSet& set, const std::vector<int>& orders, int samples,
                      const std::filesystem::path& out);

// metrics --------------------------------------------------------------------

MetricReport cmd_metrics(const std::filesystem::path& pred, const std::filesystem::path& gt,
                         const MetricOptions& options, const std::filesystem::path& out);

// bench ----------------------------------------------------------------------

struct BenchRow {
  int order = 0;
  double encode_ms = 0.0;
  double decode_ms = 0.0;
};

struct BenchResult {
  double rasterize_ms = 0.0;
  std::vector<BenchRow> rows;
};

/// Median wall-clock of `repeats` runs for encode and decode per order.
BenchResult cmd_bench(const ExperimentConfig& config, int repeats);
void write_bench_csv(const BenchResult& result, const std::filesystem::path& path);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// argument parsing helpers ---------------------------------------------------

std::pair<int, int> parse_grid(const std::string& text);         // "256x256"
std::vector<int> parse_int_list(const std::string& text);        // "3,7,15"
std::vector<double> parse_double_list(const std::string& text);  // "0,0.05"
IntervalSet parse_intervals(const std::string& text);            // "-0.5:0.5,0.6:0.8"

}  // namespace fof
