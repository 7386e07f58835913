#include "fof/experiments.hpp"

#include "fof/surface.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fof {

TriangleMesh load_source(const MeshSource& source) {
  if (source.mesh_path.has_value() == source.shape.has_value()) {
    throw std::invalid_argument("give exactly one of a mesh file or a shape spec");
  }
  if (source.shape) return make_shape(*source.shape);
  TriangleMesh mesh = load_mesh(*source.mesh_path);
  if (mesh.empty()) throw std::invalid_argument("mesh " + source.mesh_path->string() + " is empty");
  return source.keep_coordinates ? mesh : normalize_mesh(mesh, source.margin);
}

namespace {

void check_sizes(int width, int height, int zsamples) {
  const auto in_range = [](int v) { return v >= 2 && v <= 4096; };
  if (!in_range(width) || !in_range(height) || !in_range(zsamples)) {
    throw std::invalid_argument("grid and z-sample sizes must lie in [2, 4096]");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  check_sizes(width, height, zsamples);
  if (orders.empty()) throw std::invalid_argument("order list is empty");
  for (std::size_t k = 0; k < orders.size(); ++k) {
    if (orders[k] < 1) throw std::invalid_argument("orders must be >= 1");
    if (k > 0 && orders[k] <= orders[k - 1]) throw std::invalid_argument("orders must ascend");
  }
  for (std::size_t k = 0; k < noise_levels.size(); ++k) {
    if (!(noise_levels[k] >= 0.0)) throw std::invalid_argument("noise levels must be >= 0");
    if (k > 0 && noise_levels[k] <= noise_levels[k - 1]) {
      throw std::invalid_argument("noise levels must ascend");
    }
  }
  if (sample_count == 0) throw std::invalid_argument("sample count must be positive");
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& parameter_name,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << parameter_name << ",chamfer,p2s,normal_error,faces,status\n" << std::setprecision(9);
  for (const auto& row : rows) {
    out << row.parameter << ',';
    if (row.metrics) {
      out << row.metrics->chamfer << ',' << row.metrics->p2s << ',' << row.metrics->normal_error
          << ',' << row.faces << ",ok\n";
    } else {
      out << ",,," << row.faces << ",empty_mesh\n";
    }
  }
  if (!out) throw IoError("write failure on " + path.string());
}

EncodeResult cmd_encode(const MeshSource& source, int width, int height, int order,
                        const std::filesystem::path& out) {
  check_sizes(width, height, 2);
  if (order < 1) throw std::invalid_argument("order must be >= 1");
  const TriangleMesh mesh = load_source(source);
  if (mesh.empty()) throw std::invalid_argument("cannot encode an empty mesh");
  const LayeredIntervalGrid grid = rasterize_intervals(mesh, width, height);
  EncodeResult result{encode_intervals(grid, order), grid.warnings};
  if (!out.empty()) write_fof(result.fof, out);
  return result;
}

TriangleMesh cmd_decode(const std::filesystem::path& fof_path, int width, int height, int samples,
                        const std::filesystem::path& out) {
  const FofGridf fof = read_fof(fof_path);
  const int w = width > 0 ? width : fof.width();
  const int h = height > 0 ? height : fof.height();
  check_sizes(w, h, samples);
  TriangleMesh mesh = extract_mesh(fof, w, h, samples);
  if (!out.empty()) save_mesh(mesh, out);
  return mesh;
}

namespace {

SweepRow score(double parameter, const TriangleMesh& reconstruction, const TriangleMesh& truth,
               const ExperimentConfig& config) {
  SweepRow row;
  row.parameter = parameter;
  row.faces = static_cast<std::size_t>(reconstruction.num_faces());
  if (reconstruction.empty()) return row;
  MetricOptions options;
  options.sample_count = config.sample_count;
  options.seed = config.seed;
  options.image_width = config.width;
  options.image_height = config.height;
  options.align_z = false;  // reconstruction and truth share one frame
  row.metrics = evaluate_meshes(reconstruction, truth, options);
  return row;
}

}  // namespace

std::vector<SweepRow> cmd_ablate_n(const ExperimentConfig& config) {
  config.validate();
  const TriangleMesh truth = load_source(config.source);
  const FofGridd full =
      encode_intervals(rasterize_intervals(truth, config.width, config.height), config.orders.back());
  std::vector<SweepRow> rows;
  for (const int order : config.orders) {
    const TriangleMesh mesh =
        extract_mesh(truncate_channels(full, order), config.width, config.height, config.zsamples);
    rows.push_back(score(order, mesh, truth, config));
  }
  if (!config.out_dir.empty()) write_sweep_csv(rows, "N", config.out_dir / "ablate_n.csv");
  return rows;
}

std::vector<SweepRow> cmd_noise_sweep(const ExperimentConfig& config) {
  config.validate();
  const TriangleMesh truth = load_source(config.source);
  const FofGridd clean =
      encode_intervals(rasterize_intervals(truth, config.width, config.height), config.orders.back());
  // The mask must come from the clean field; noise makes every pixel non-zero.
  const ForegroundMask mask = foreground_mask(clean);
  std::vector<SweepRow> rows;
  for (std::size_t level = 0; level < config.noise_levels.size(); ++level) {
    const FofGridd noisy =
        add_relative_noise(clean, config.noise_levels[level], config.seed ^ level, mask);
    const TriangleMesh mesh = extract_mesh(noisy, config.width, config.height, config.zsamples);
    rows.push_back(score(config.noise_levels[level], mesh, truth, config));
  }
  if (!config.out_dir.empty()) write_sweep_csv(rows, "level", config.out_dir / "noise_sweep.csv");
  return rows;
}

CurveTable cmd_curves(const IntervalSet& set, const std::vector<int>& orders, int samples,
                      const std::filesystem::path& out) {
  if (!set.is_valid()) throw std::invalid_argument("interval set is not sorted and disjoint");
  if (samples < 2) throw std::invalid_argument("curve sample count must be >= 2");
  if (orders.empty()) throw std::invalid_argument("order list is empty");
  for (int n : orders) {
    if (n < 1) throw std::invalid_argument("orders must be >= 1");
  }

  CurveTable table;
  table.orders = orders;
  table.values.resize(samples, 2 + static_cast<Eigen::Index>(orders.size()));
  std::vector<Eigen::VectorXd> coefficients;
  for (int n : orders) coefficients.push_back(encode_interval_set(set, n));
  for (int s = 0; s < samples; ++s) {
    const double z = z_sample(s, samples);
    table.values(s, 0) = z;
    table.values(s, 1) = interval_occupancy(set, z);
    for (std::size_t c = 0; c < orders.size(); ++c) {
      table.values(s, 2 + static_cast<Eigen::Index>(c)) = evaluate_series(coefficients[c], z);
    }
  }

  if (!out.empty()) {
    std::ofstream csv(out);
    if (!csv) throw IoError("cannot write " + out.string());
    csv << "z,f_exact";
    for (int n : orders) csv << ",fhat_" << n;
    csv << '\n' << std::setprecision(12);
    for (Eigen::Index s = 0; s < table.values.rows(); ++s) {
      for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
        csv << (c ? "," : "") << table.values(s, c);
      }
      csv << '\n';
    }
    if (!csv) throw IoError("write failure on " + out.string());
  }
  return table;
}

MetricReport cmd_metrics(const std::filesystem::path& pred, const std::filesystem::path& gt,
                         const MetricOptions& options, const std::filesystem::path& out) {
  const MetricReport report = evaluate_meshes(load_mesh(pred), load_mesh(gt), options);
  if (!out.empty()) {
    std::ofstream csv(out);
    if (!csv) throw IoError("cannot write " + out.string());
    csv << MetricReport::csv_header() << '\n' << report.csv_row() << '\n';
    if (!csv) throw IoError("write failure on " + out.string());
  }
  return report;
}

namespace {

template <typename Fn>
double median_ms(int repeats, Fn&& fn) {
  std::vector<double> ms;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  std::sort(ms.begin(), ms.end());
  return ms[ms.size() / 2];
}

}  // namespace

BenchResult cmd_bench(const ExperimentConfig& config, int repeats) {
  config.validate();
  if (repeats < 1) throw std::invalid_argument("repeat count must be >= 1");
  const TriangleMesh mesh = load_source(config.source);
  BenchResult result;
  LayeredIntervalGrid grid;
  result.rasterize_ms =
      median_ms(1, [&] { grid = rasterize_intervals(mesh, config.width, config.height); });
  for (const int order : config.orders) {
    BenchRow row;
    row.order = order;
    FofGridd fof;
    row.encode_ms = median_ms(repeats, [&] { fof = encode_intervals(grid, order); });
    double sink = 0.0;
    row.decode_ms = median_ms(repeats, [&] {
      const auto occupancy = decode_occupancy(fof, config.zsamples);
      sink += occupancy.values(0, 0);
    });
    if (!std::isfinite(sink)) throw std::runtime_error("non-finite decode output");
    result.rows.push_back(row);
  }
  if (!config.out_dir.empty()) write_bench_csv(result, config.out_dir / "bench.csv");
  return result;
}

void write_bench_csv(const BenchResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "N,channels,rasterize_ms,encode_ms,decode_ms\n" << std::setprecision(6);
  for (const auto& row : result.rows) {
    out << row.order << ',' << channel_count(row.order) << ',' << result.rasterize_ms << ','
        << row.encode_ms << ',' << row.decode_ms << '\n';
  }
  if (!out) throw IoError("write failure on " + path.string());
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit needs >= 2 points");
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Map<const Eigen::VectorXd> xs(x.data(), n);
  const Eigen::Map<const Eigen::VectorXd> ys(y.data(), n);
  const Eigen::VectorXd dx = xs.array() - xs.mean();
  const Eigen::VectorXd dy = ys.array() - ys.mean();
  LinearFit fit;
  fit.slope = dx.dot(dy) / dx.squaredNorm();
  fit.intercept = ys.mean() - fit.slope * xs.mean();
  const double ss_res = (ys.array() - (fit.slope * xs.array() + fit.intercept)).square().sum();
  const double ss_tot = dy.squaredNorm();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

// Parsing --------------------------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

template <typename T>
T parse_number(const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (in.fail() || !in.eof()) throw std::invalid_argument("bad number '" + text + "'");
  return value;
}

}  // namespace

std::pair<int, int> parse_grid(const std::string& text) {
  const auto parts = split(text, 'x');
  if (parts.size() != 2) throw std::invalid_argument("grid must look like WxH, got '" + text + "'");
  return {parse_number<int>(parts[0]), parse_number<int>(parts[1])};
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_number<int>(p));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_number<double>(p));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

IntervalSet parse_intervals(const std::string& text) {
  IntervalSet set;
  for (const auto& p : split(text, ',')) {
    const auto ends = split(p, ':');
    if (ends.size() != 2) throw std::invalid_argument("interval must look like zin:zout");
    set.intervals.push_back({parse_number<double>(ends[0]), parse_number<double>(ends[1])});
  }
  if (!set.is_valid()) throw std::invalid_argument("intervals must be increasing and disjoint");
  return set;
}

}  // namespace fof
