#include "fof/codec.hpp"

#include "fof/parallel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace fof {

Eigen::VectorXd encode_interval_set(const IntervalSet& set, int order) {
  if (order < 1) throw std::invalid_argument("FOF order must be >= 1");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(channel_count(order));
  if (set.empty()) return c;
  c(0) = set.inside_length();
  for (int n = 1; n <= order; ++n) {
    const double w = n * std::numbers::pi;
    double a = 0.0;
    double b = 0.0;
    for (const auto& iv : set.intervals) {
      a += sin_pi(n * iv.z_out) - sin_pi(n * iv.z_in);
      b += cos_pi(n * iv.z_in) - cos_pi(n * iv.z_out);
    }
    c(2 * n - 1) = a / w;
    c(2 * n) = b / w;
  }
  return c;
}

FofGridd encode_intervals(const LayeredIntervalGrid& grid, int order) {
  if (order < 1) throw std::invalid_argument("FOF order must be >= 1");
  FofGridd fof(grid.width, grid.height, order);
  parallel_for(0, static_cast<std::size_t>(grid.height), [&](std::size_t row) {
    const int j = static_cast<int>(row);
    for (int i = 0; i < grid.width; ++i) {
      const IntervalSet& set = grid.at(i, j);
      if (!set.empty()) fof.pixel(i, j) = encode_interval_set(set, order).transpose();
    }
  });
  return fof;
}

double truncation_error_l2(const IntervalSet& set, int order) {
  const Eigen::VectorXd c = encode_interval_set(set, order);
  const double a0 = c(0);
  return a0 - 0.5 * a0 * a0 - c.tail(c.size() - 1).squaredNorm();
}

BilinearTap bilinear_tap(double x, double y, int width, int height) {
  const auto axis = [](double u, int size, int& lo, int& hi, double& w) {
    u = std::clamp(u, 0.0, static_cast<double>(size - 1));
    // Snap queries that land on a pixel centre up to rounding.
    const double nearest = std::round(u);
    if (std::abs(u - nearest) < 1e-9) u = nearest;
    lo = static_cast<int>(std::floor(u));
    hi = std::min(lo + 1, size - 1);
    w = u - lo;
  };
  BilinearTap t{};
  axis((x + 1.0) * 0.5 * width - 0.5, width, t.i0, t.i1, t.wx);
  axis((1.0 - y) * 0.5 * height - 0.5, height, t.j0, t.j1, t.wy);
  return t;
}

std::size_t ForegroundMask::count() const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), std::uint8_t{1}));
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "FOF files are little-endian; big-endian hosts need byte swapping");

constexpr std::array<char, 4> fof_magic = {'F', 'O', 'F', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(const unsigned char* bytes) {
  std::uint32_t v;
  std::memcpy(&v, bytes, sizeof v);
  return v;
}

}  // namespace

void write_fof(const FofGridf& fof, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write FOF file " + path.string());
  out.write(fof_magic.data(), fof_magic.size());
  put_u32(out, static_cast<std::uint32_t>(fof.width()));
  put_u32(out, static_cast<std::uint32_t>(fof.height()));
  put_u32(out, static_cast<std::uint32_t>(fof.channels()));
  const auto& m = fof.coefficients();
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(float)));
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

FofGridf read_fof(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open FOF file " + path.string());
  std::array<unsigned char, fof_header_bytes> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size())) {
    throw FormatError(path.string() + ": truncated FOF header");
  }
  if (std::memcmp(header.data(), fof_magic.data(), fof_magic.size()) != 0) {
    throw FormatError(path.string() + ": bad FOF magic");
  }
  const std::uint32_t width = get_u32(header.data() + 4);
  const std::uint32_t height = get_u32(header.data() + 8);
  const std::uint32_t channels = get_u32(header.data() + 12);
  if (width == 0 || height == 0) throw FormatError(path.string() + ": zero FOF dimension");
  if (channels < 3 || channels % 2 == 0) {
    throw FormatError(path.string() + ": channel count must be odd and >= 3");
  }
  constexpr auto int_max = static_cast<std::uint64_t>(std::numeric_limits<int>::max());
  if (width > int_max || height > int_max || channels > int_max) {
    throw FormatError(path.string() + ": FOF dimension overflow");
  }
  const std::uint64_t pixels = static_cast<std::uint64_t>(width) * height;
  if (pixels > int_max || pixels > std::numeric_limits<std::uint64_t>::max() / channels / 4) {
    throw FormatError(path.string() + ": FOF dimension overflow");
  }
  const std::uint64_t payload = pixels * channels * sizeof(float);
  const std::uint64_t size = std::filesystem::file_size(path);
  if (size < fof_header_bytes + payload) throw FormatError(path.string() + ": truncated FOF payload");
  if (size > fof_header_bytes + payload) throw FormatError(path.string() + ": trailing bytes after FOF payload");

  FofGridf::Matrix m(static_cast<Eigen::Index>(pixels), static_cast<Eigen::Index>(channels));
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(payload));
  if (in.gcount() != static_cast<std::streamsize>(payload)) {
    throw FormatError(path.string() + ": truncated FOF payload");
  }
  return FofGridf(static_cast<int>(width), static_cast<int>(height),
                  static_cast<int>((channels - 1) / 2), std::move(m));
}

}  // namespace fof
