// fof: command-line harness for Fourier occupancy field experiments.

#include "fof/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

struct CommonArgs {
  std::string input;
  std::string shape;
  std::string grid = "256x256";
  int order = 15;
  std::string orders;
  int zsamples = 256;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t samples = 100000;
  bool keep_coordinates = false;
  double margin = 0.05;
};

void add_source_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-i,--input", args.input, "input mesh (OBJ or PLY)");
  cmd->add_option("--shape", args.shape, "synthetic shape, e.g. sphere:r=0.6,level=5");
  cmd->add_flag("--keep-coords", args.keep_coordinates,
                "use the input mesh coordinates as is (no normalization)");
  cmd->add_option("--margin", args.margin, "normalization margin")->capture_default_str();
}

fof::MeshSource make_source(const CommonArgs& args) {
  fof::MeshSource source;
  if (!args.input.empty()) source.mesh_path = args.input;
  if (!args.shape.empty()) source.shape = fof::ShapeSpec::parse(args.shape);
  source.keep_coordinates = args.keep_coordinates;
  source.margin = args.margin;
  return source;
}

fof::ExperimentConfig make_config(const CommonArgs& args) {
  fof::ExperimentConfig config;
  config.source = make_source(args);
  std::tie(config.width, config.height) = fof::parse_grid(args.grid);
  config.zsamples = args.zsamples;
  config.seed = args.seed;
  config.sample_count = args.samples;
  config.orders = args.orders.empty() ? std::vector<int>{args.order} : fof::parse_int_list(args.orders);
  if (!args.out.empty()) {
    config.out_dir = args.out;
    std::filesystem::create_directories(config.out_dir);
  }
  return config;
}

void print_rows(const std::vector<fof::SweepRow>& rows, const char* name) {
  std::cout << name << ",chamfer,p2s,normal_error,faces,status\n";
  for (const auto& r : rows) {
    std::cout << r.parameter << ',';
    if (r.metrics) {
      std::cout << r.metrics->chamfer << ',' << r.metrics->p2s << ',' << r.metrics->normal_error
                << ',' << r.faces << ",ok\n";
    } else {
      std::cout << ",,," << r.faces << ",empty_mesh\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier occupancy field codec and experiments"};
  app.require_subcommand(1);
  CommonArgs args;

  auto* encode = app.add_subcommand("encode", "mesh -> FOF file");
  add_source_options(encode, args);
  encode->add_option("--grid", args.grid, "FOF size WxH")->capture_default_str();
  encode->add_option("-N,--order", args.order, "truncation order")->capture_default_str();
  encode->add_option("-o,--out", args.out, "output .fof path")->required();

  std::string fof_path;
  std::string decode_grid;
  auto* decode = app.add_subcommand("decode", "FOF file -> OBJ mesh");
  decode->add_option("-i,--input", fof_path, "input .fof path")->required();
  decode->add_option("--grid", decode_grid, "resize to WxH before decoding");
  decode->add_option("-K,--zsamples", args.zsamples, "z samples")->capture_default_str();
  decode->add_option("-o,--out", args.out, "output .obj path")->required();

  std::string levels = "0,0.05,0.1,0.15,0.2,0.25,0.3";
  auto* ablate = app.add_subcommand("ablate-n", "reconstruction error against truncation order");
  auto* noise = app.add_subcommand("noise-sweep", "reconstruction error against coefficient noise");
  for (auto* cmd : {ablate, noise}) {
    add_source_options(cmd, args);
    cmd->add_option("--grid", args.grid, "FOF size WxH")->capture_default_str();
    cmd->add_option("-K,--zsamples", args.zsamples, "z samples")->capture_default_str();
    cmd->add_option("--seed", args.seed, "random seed")->capture_default_str();
    cmd->add_option("--samples", args.samples, "surface samples per metric")->capture_default_str();
    cmd->add_option("--out", args.out, "output directory");
  }
  std::string ablate_orders = "3,7,15,31";
  ablate->add_option("--orders", ablate_orders, "comma-separated ascending orders")
      ->capture_default_str();
  noise->add_option("-N,--order", args.order, "truncation order")->capture_default_str();
  noise->add_option("--levels", levels, "comma-separated relative noise levels")
      ->capture_default_str();

  std::string intervals;
  std::string curve_orders = "7,15,31";
  int curve_samples = 512;
  auto* curves = app.add_subcommand("curves", "1D occupancy curves for an interval set");
  curves->add_option("--intervals", intervals, "zin:zout[,zin:zout...]")->required();
  curves->add_option("--orders", curve_orders, "comma-separated orders")->capture_default_str();
  curves->add_option("--samples", curve_samples, "samples along z")->capture_default_str();
  curves->add_option("-o,--out", args.out, "output CSV path")->required();

  std::string pred_path;
  std::string gt_path;
  bool p2s_vertices = false;
  auto* metrics = app.add_subcommand("metrics", "Chamfer / P2S / normal error between meshes");
  metrics->add_option("--pred", pred_path, "reconstructed mesh")->required();
  metrics->add_option("--gt", gt_path, "ground-truth mesh")->required();
  metrics->add_option("--samples", args.samples, "surface samples")->capture_default_str();
  metrics->add_option("--seed", args.seed, "random seed")->capture_default_str();
  metrics->add_option("--grid", args.grid, "normal image size WxH")->capture_default_str();
  metrics->add_flag("--p2s-vertices", p2s_vertices, "P2S from mesh vertices");
  metrics->add_option("-o,--out", args.out, "output CSV path");

  int repeats = 5;
  auto* bench = app.add_subcommand("bench", "encode/decode timing against order");
  add_source_options(bench, args);
  bench->add_option("--grid", args.grid, "FOF size WxH")->capture_default_str();
  bench->add_option("-K,--zsamples", args.zsamples, "z samples")->capture_default_str();
  std::string bench_orders = "7,15,31,63";
  bench->add_option("--orders", bench_orders, "comma-separated ascending orders")
      ->capture_default_str();
  bench->add_option("--repeats", repeats, "timed repetitions per stage")->capture_default_str();
  bench->add_option("--out", args.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*encode) {
      const auto [w, h] = fof::parse_grid(args.grid);
      const auto result = fof::cmd_encode(make_source(args), w, h, args.order, args.out);
      std::cout << "wrote " << args.out << " (" << w << "x" << h << "x"
                << result.fof.channels() << "), warnings " << result.warnings << '\n';
    } else if (*decode) {
      int w = 0, h = 0;
      if (!decode_grid.empty()) std::tie(w, h) = fof::parse_grid(decode_grid);
      const auto mesh = fof::cmd_decode(fof_path, w, h, args.zsamples, args.out);
      if (mesh.empty()) std::cerr << "warning: decoded occupancy has no 0.5 crossing; mesh is empty\n";
      std::cout << "wrote " << args.out << " (" << mesh.num_vertices() << " vertices, "
                << mesh.num_faces() << " faces)\n";
    } else if (*ablate) {
      args.orders = ablate_orders;
      print_rows(fof::cmd_ablate_n(make_config(args)), "N");
    } else if (*noise) {
      auto config = make_config(args);
      config.noise_levels = fof::parse_double_list(levels);
      print_rows(fof::cmd_noise_sweep(config), "level");
    } else if (*curves) {
      const auto table = fof::cmd_curves(fof::parse_intervals(intervals),
                                         fof::parse_int_list(curve_orders), curve_samples, args.out);
      std::cout << "wrote " << args.out << " (" << table.values.rows() << " rows)\n";
    } else if (*metrics) {
      fof::MetricOptions options;
      options.sample_count = args.samples;
      options.seed = args.seed;
      std::tie(options.image_width, options.image_height) = fof::parse_grid(args.grid);
      options.p2s_from_vertices = p2s_vertices;
      const auto report = fof::cmd_metrics(pred_path, gt_path, options, args.out);
      std::cout << fof::MetricReport::csv_header() << '\n' << report.csv_row() << '\n';
    } else if (*bench) {
      args.orders = bench_orders;
      const auto result = fof::cmd_bench(make_config(args), repeats);
      std::cout << "N,channels,rasterize_ms,encode_ms,decode_ms\n";
      std::vector<double> x, y;
      for (const auto& row : result.rows) {
        std::cout << row.order << ',' << fof::channel_count(row.order) << ','
                  << result.rasterize_ms << ',' << row.encode_ms << ',' << row.decode_ms << '\n';
        x.push_back(fof::channel_count(row.order));
        y.push_back(row.decode_ms);
      }
      if (x.size() >= 2) {
        const auto fit = fof::fit_line(x, y);
        std::cout << "decode_ms ~ " << fit.slope << " * (2N+1) + " << fit.intercept
                  << ", R^2 = " << fit.r_squared << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
