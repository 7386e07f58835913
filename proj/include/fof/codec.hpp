#pragma once

#include "fof/raster.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace fof {

// Fourier occupancy coefficients --------------------------------------------
//
// A view ray's occupancy f(z) on [-1, 1] is expanded as
//
//   f(z) ~ a0/2 + sum_{n=1..N} a_n cos(n pi z) + b_n sin(n pi z)
//
// and stored per pixel as the 2N+1 vector [a0, a1, b1, ..., aN, bN].

inline constexpr int channel_count(int order) { return 2 * order + 1; }

/// Channels are laid out pixel-major (row j * W + i), channel-fastest; the
/// backing matrix is exactly the payload of the FOF file format.
template <typename Scalar>
class FofGrid {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  FofGrid() = default;
  FofGrid(int width, int height, int order)
      : FofGrid(width, height, order,
                Matrix::Zero(static_cast<Eigen::Index>(width) * height, channel_count(order))) {}
  FofGrid(int width, int height, int order, Matrix coefficients)
      : width_(width), height_(height), order_(order), coefficients_(std::move(coefficients)) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("FOF dimensions must be positive");
    if (order < 1) throw std::invalid_argument("FOF order must be >= 1");
    if (coefficients_.rows() != static_cast<Eigen::Index>(width) * height ||
        coefficients_.cols() != channel_count(order)) {
      throw std::invalid_argument("FOF coefficient matrix has the wrong shape");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int order() const { return order_; }
  int channels() const { return channel_count(order_); }
  Eigen::Index pixels() const { return coefficients_.rows(); }
  Eigen::Index pixel_index(int i, int j) const { return static_cast<Eigen::Index>(j) * width_ + i; }

  const Matrix& coefficients() const { return coefficients_; }
  Matrix& coefficients() { return coefficients_; }

  auto pixel(int i, int j) const { return coefficients_.row(pixel_index(i, j)); }
  auto pixel(int i, int j) { return coefficients_.row(pixel_index(i, j)); }

  template <typename Other>
  FofGrid<Other> cast() const {
    return FofGrid<Other>(width_, height_, order_, coefficients_.template cast<Other>());
  }

  friend bool operator==(const FofGrid& l, const FofGrid& r) {
    return l.width_ == r.width_ && l.height_ == r.height_ && l.order_ == r.order_ &&
           l.coefficients_ == r.coefficients_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int order_ = 0;
  Matrix coefficients_;
};

using FofGridd = FofGrid<double>;
using FofGridf = FofGrid<float>;

template <typename Scalar>
using BasisVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// sin(pi t) with exact period reduction: integer t gives exactly 0 and
/// half-integer t exactly +-1.
template <typename Scalar>
Scalar sin_pi(Scalar t) {
  Scalar r = std::remainder(t, Scalar(2));  // [-1, 1], exact
  if (r > Scalar(0.5)) {
    r = Scalar(1) - r;
  } else if (r < Scalar(-0.5)) {
    r = Scalar(-1) - r;
  }
  return std::sin(std::numbers::pi_v<Scalar> * r);
}

/// cos(pi t), reduced the same way.
template <typename Scalar>
Scalar cos_pi(Scalar t) {
  return sin_pi(Scalar(0.5) - std::abs(std::remainder(t, Scalar(2))));
}

/// [1/2, cos(pi z), sin(pi z), ..., cos(N pi z), sin(N pi z)]. z outside
/// [-1, 1] evaluates the periodic extension.
template <typename Scalar = double>
BasisVector<Scalar> basis_vector(Scalar z, int order) {
  if (order < 1) throw std::invalid_argument("order must be >= 1");
  BasisVector<Scalar> b(channel_count(order));
  b(0) = Scalar(0.5);
  for (int n = 1; n <= order; ++n) {
    const Scalar t = Scalar(n) * z;
    b(2 * n - 1) = cos_pi(t);
    b(2 * n) = sin_pi(t);
  }
  return b;
}

/// Endpoint-inclusive z samples z_k = -1 + 2k/(K-1).
inline double z_sample(int k, int samples) { return -1.0 + 2.0 * k / (samples - 1); }

/// (2N+1) x K matrix whose columns are basis_vector(z_k).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> basis_matrix(int order, int samples) {
  if (samples < 2) throw std::invalid_argument("z sample count must be >= 2");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(channel_count(order), samples);
  for (int k = 0; k < samples; ++k) {
    m.col(k) = basis_vector<Scalar>(static_cast<Scalar>(z_sample(k, samples)), order);
  }
  return m;
}

/// Closed-form coefficients of one interval set:
///   a0 = sum(z' - z)
///   a_n = sum(sin(n pi z') - sin(n pi z)) / (n pi)
///   b_n = sum(cos(n pi z) - cos(n pi z')) / (n pi)
/// Each coefficient depends only on its own n, so lower orders are exact
/// prefixes of higher ones.
Eigen::VectorXd encode_interval_set(const IntervalSet& set, int order);

FofGridd encode_intervals(const LayeredIntervalGrid& grid, int order);

/// Squared L2 truncation error of the order-N series against the exact
/// occupancy over one period: a0 - a0^2/2 - sum_{n<=N}(a_n^2 + b_n^2).
double truncation_error_l2(const IntervalSet& set, int order);

/// Value of the truncated series for one coefficient vector.
inline double evaluate_series(const Eigen::VectorXd& coefficients, double z) {
  const int order = static_cast<int>((coefficients.size() - 1) / 2);
  return basis_vector<double>(z, order).dot(coefficients);
}

// Sampling -------------------------------------------------------------------

/// Bilinear weights of (x, y) against pixel centres, clamped at the borders.
struct BilinearTap {
  int i0, i1, j0, j1;
  double wx, wy;  // weight of i1 / j1
};
BilinearTap bilinear_tap(double x, double y, int width, int height);

/// Bilinearly interpolated coefficient vector at continuous (x, y).
template <typename Scalar>
BasisVector<Scalar> coefficients_at(const FofGrid<Scalar>& fof, double x, double y) {
  const BilinearTap t = bilinear_tap(x, y, fof.width(), fof.height());
  const auto wx = static_cast<Scalar>(t.wx);
  const auto wy = static_cast<Scalar>(t.wy);
  const Scalar one(1);
  BasisVector<Scalar> top = (one - wx) * fof.pixel(t.i0, t.j0).transpose() +
                            wx * fof.pixel(t.i1, t.j0).transpose();
  BasisVector<Scalar> bottom = (one - wx) * fof.pixel(t.i0, t.j1).transpose() +
                               wx * fof.pixel(t.i1, t.j1).transpose();
  if (wy == Scalar(0)) return top;
  return (one - wy) * top + wy * bottom;
}

/// Continuous reconstruction F(x, y, z) = b(z) . C(x, y).
template <typename Scalar>
Scalar decode_at(const FofGrid<Scalar>& fof, double x, double y, double z) {
  return basis_vector<Scalar>(static_cast<Scalar>(z), fof.order()).dot(coefficients_at(fof, x, y));
}

/// Sampled occupancy over a W x H x K lattice. Pixel p = j * W + i holds row
/// p of `values`; column k is depth z_k = -1 + 2k/(K-1).
template <typename Scalar>
struct OccupancyGrid {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  int width = 0;
  int height = 0;
  int depth = 0;
  Matrix values;

  Scalar operator()(int i, int j, int k) const {
    return values(static_cast<Eigen::Index>(j) * width + i, k);
  }
};

/// All columns at once: one (W*H) x (2N+1) by (2N+1) x K product.
template <typename Scalar>
OccupancyGrid<Scalar> decode_occupancy(const FofGrid<Scalar>& fof, int samples) {
  if (samples < 2) throw std::invalid_argument("z sample count must be >= 2");
  OccupancyGrid<Scalar> grid;
  grid.width = fof.width();
  grid.height = fof.height();
  grid.depth = samples;
  grid.values.noalias() = fof.coefficients() * basis_matrix<Scalar>(fof.order(), samples);
  return grid;
}

// Field operations -----------------------------------------------------------

/// Keeps the first 2N'+1 channels.
template <typename Scalar>
FofGrid<Scalar> truncate_channels(const FofGrid<Scalar>& fof, int order) {
  if (order < 1 || order > fof.order()) {
    throw std::invalid_argument("truncation order must lie in [1, " +
                                std::to_string(fof.order()) + "]");
  }
  return FofGrid<Scalar>(fof.width(), fof.height(), order,
                         fof.coefficients().leftCols(channel_count(order)));
}

/// Per-channel bilinear resampling at the target pixel centres.
template <typename Scalar>
FofGrid<Scalar> resize_fof(const FofGrid<Scalar>& fof, int width, int height) {
  if (width < 1 || height < 1) throw std::invalid_argument("resize target must be >= 1x1");
  if (width == fof.width() && height == fof.height()) return fof;
  FofGrid<Scalar> out(width, height, fof.order());
  for (int j = 0; j < height; ++j) {
    const double y = 1.0 - 2.0 * (j + 0.5) / height;
    for (int i = 0; i < width; ++i) {
      const double x = 2.0 * (i + 0.5) / width - 1.0;
      out.pixel(i, j) = coefficients_at(fof, x, y).transpose();
    }
  }
  return out;
}

/// W x H foreground flags, row-major like FofGrid pixels.
struct ForegroundMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> flags;

  bool operator()(int i, int j) const {
    return flags[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(i)] != 0;
  }
  std::size_t count() const;
};

/// Pixel is foreground iff the max-abs of its coefficients exceeds threshold.
template <typename Scalar>
ForegroundMask foreground_mask(const FofGrid<Scalar>& fof, double threshold = 1e-9) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("mask threshold must be >= 0");
  ForegroundMask mask{fof.width(), fof.height(),
                      std::vector<std::uint8_t>(static_cast<std::size_t>(fof.pixels()), 0)};
  for (Eigen::Index p = 0; p < fof.pixels(); ++p) {
    const double peak = static_cast<double>(fof.coefficients().row(p).cwiseAbs().maxCoeff());
    mask.flags[static_cast<std::size_t>(p)] = peak > threshold ? 1 : 0;
  }
  return mask;
}

/// Mean over masked pixels of the L1 norm of the coefficient difference.
template <typename Scalar>
double fof_l1(const FofGrid<Scalar>& pred, const FofGrid<Scalar>& gt, const ForegroundMask& mask) {
  if (pred.width() != gt.width() || pred.height() != gt.height() || pred.order() != gt.order() ||
      mask.width != gt.width() || mask.height != gt.height()) {
    throw std::invalid_argument("fof_l1 operands have mismatched dimensions");
  }
  double total = 0.0;
  std::size_t count = 0;
  for (Eigen::Index p = 0; p < gt.pixels(); ++p) {
    if (!mask.flags[static_cast<std::size_t>(p)]) continue;
    total += static_cast<double>((pred.coefficients().row(p) - gt.coefficients().row(p))
                                     .cwiseAbs()
                                     .sum());
    ++count;
  }
  if (count == 0) throw std::invalid_argument("fof_l1 needs a non-empty mask");
  return total / static_cast<double>(count);
}

/// Per-channel RMS over masked pixels.
template <typename Scalar>
Eigen::VectorXd masked_channel_rms(const FofGrid<Scalar>& fof, const ForegroundMask& mask) {
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(fof.channels());
  std::size_t count = 0;
  for (Eigen::Index p = 0; p < fof.pixels(); ++p) {
    if (!mask.flags[static_cast<std::size_t>(p)]) continue;
    sum_sq += fof.coefficients().row(p).transpose().template cast<double>().cwiseAbs2();
    ++count;
  }
  if (count == 0) return sum_sq;
  return (sum_sq / static_cast<double>(count)).cwiseSqrt();
}

/// Adds N(0, (level * rms_c)^2) to channel c of every masked pixel, where
/// rms_c is the channel's RMS over the mask. Unmasked pixels are untouched.
template <typename Scalar>
FofGrid<Scalar> add_relative_noise(const FofGrid<Scalar>& fof, double level, std::uint64_t seed,
                                   const ForegroundMask& mask) {
  if (!(level >= 0.0)) throw std::invalid_argument("noise level must be >= 0");
  if (mask.width != fof.width() || mask.height != fof.height()) {
    throw std::invalid_argument("noise mask does not match the FOF dimensions");
  }
  FofGrid<Scalar> out = fof;
  if (level == 0.0) return out;
  const Eigen::VectorXd sigma = level * masked_channel_rms(fof, mask);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index p = 0; p < fof.pixels(); ++p) {
    if (!mask.flags[static_cast<std::size_t>(p)]) continue;
    for (int c = 0; c < fof.channels(); ++c) {
      out.coefficients()(p, c) += static_cast<Scalar>(sigma(c) * gauss(rng));
    }
  }
  return out;
}

// File format ----------------------------------------------------------------
//
// Little-endian: "FOF1", u32 W, u32 H, u32 C (odd, >= 3), then W*H*C float32
// values, pixel-major (row-major pixels), channel-fastest.

inline constexpr std::size_t fof_header_bytes = 16;

void write_fof(const FofGridf& fof, const std::filesystem::path& path);
FofGridf read_fof(const std::filesystem::path& path);

/// Double-precision grids are narrowed to float32 on write.
inline void write_fof(const FofGridd& fof, const std::filesystem::path& path) {
  write_fof(fof.cast<float>(), path);
}

}  // namespace fof
