#include "dgc/synth.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

namespace dgc {

void validate(const MaternSpec& s) {
  if (!(s.sigma > 0.0) || !(s.xi1 > 0.0) || !(s.xi2 > 0.0))
    throw InvalidArgument("Matern: sigma and correlation lengths must be positive");
  if (s.nu != 0.5 && s.nu != 1.5 && s.nu != 2.5 && s.nu != 3.5)
    throw InvalidArgument("Matern: nu must be one of 0.5, 1.5, 2.5, 3.5");
}

double matern_correlation(double h, double nu) {
  h = std::abs(h);
  const double e = std::exp(-h);
  if (nu == 0.5) return e;
  if (nu == 1.5) return (1.0 + h) * e;
  if (nu == 2.5) return (1.0 + h + h * h / 3.0) * e;
  if (nu == 3.5) return (1.0 + h + 0.4 * h * h + h * h * h / 15.0) * e;
  throw InvalidArgument("Matern: unsupported nu");
}

double matern_cov(double r1, double r2, const MaternSpec& spec) {
  const double h = std::sqrt(r1 * r1 / (spec.xi1 * spec.xi1) + r2 * r2 / (spec.xi2 * spec.xi2));
  return spec.sigma * spec.sigma * matern_correlation(h, spec.nu);
}

namespace {

// Smallest n' >= n with no prime factor above 5.
Index smooth_size(Index n) {
  for (Index m = std::max<Index>(n, 1);; ++m) {
    Index k = m;
    for (Index p : {2, 3, 5})
      while (k % p == 0) k /= p;
    if (k == 1) return m;
  }
}

using Complex = std::complex<double>;

// In-place unnormalized forward 2D DFT of a row-major buffer.
void fft2(std::vector<Complex>& data, Index rows, Index cols) {
  Eigen::FFT<double> fft;
  std::vector<Complex> in(static_cast<std::size_t>(std::max(rows, cols)));
  std::vector<Complex> out;
  for (Index r = 0; r < rows; ++r) {
    in.assign(data.begin() + r * cols, data.begin() + (r + 1) * cols);
    fft.fwd(out, in);
    std::copy(out.begin(), out.end(), data.begin() + r * cols);
  }
  in.resize(static_cast<std::size_t>(rows));
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) in[static_cast<std::size_t>(r)] = data[static_cast<std::size_t>(r * cols + c)];
    fft.fwd(out, in);
    for (Index r = 0; r < rows; ++r) data[static_cast<std::size_t>(r * cols + c)] = out[static_cast<std::size_t>(r)];
  }
}

// Spectrum of the block-circulant covariance built from wrapped lags on the torus.
std::vector<Complex> embedding_spectrum(Index ext_rows, Index ext_cols, const MaternSpec& spec) {
  std::vector<Complex> base(static_cast<std::size_t>(ext_rows * ext_cols));
  for (Index r = 0; r < ext_rows; ++r) {
    const double lag_y = static_cast<double>(std::min(r, ext_rows - r));
    for (Index c = 0; c < ext_cols; ++c) {
      const double lag_x = static_cast<double>(std::min(c, ext_cols - c));
      base[static_cast<std::size_t>(r * ext_cols + c)] = matern_cov(lag_x, lag_y, spec);
    }
  }
  fft2(base, ext_rows, ext_cols);
  return base;
}

}  // namespace

MaternFieldGenerator::MaternFieldGenerator(Index rows, Index cols, const MaternSpec& spec)
    : rows_(rows), cols_(cols), spec_(spec) {
  validate(spec);
  if (rows < 1 || cols < 1) throw InvalidArgument("generate_field: dimensions must be positive");
  // Grow the torus until the embedding spectrum is non-negative.
  const double reach = std::max(spec.xi1, spec.xi2);
  std::vector<Complex> base;
  double max_ev = 0.0, min_ev = 0.0;
  for (double factor = 8.0;; factor *= 2.0) {
    const auto pad = static_cast<Index>(std::ceil(factor * reach));
    ext_rows_ = smooth_size(std::max(2 * (rows - 1), rows + 2 * pad));
    ext_cols_ = smooth_size(std::max(2 * (cols - 1), cols + 2 * pad));
    base = embedding_spectrum(ext_rows_, ext_cols_, spec);
    max_ev = 0.0;
    min_ev = 0.0;
    for (const auto& v : base) {
      max_ev = std::max(max_ev, v.real());
      min_ev = std::min(min_ev, v.real());
    }
    if (min_ev >= -1e-10 * max_ev) break;
    if (factor >= 64.0) {
      std::ostringstream msg;
      msg << "circulant embedding is not non-negative definite (min eigenvalue " << min_ev << ", max " << max_ev
          << ", padding " << pad << "); increase the padding or reduce the correlation lengths";
      throw Error(msg.str());
    }
  }
  const double norm = static_cast<double>(ext_rows_ * ext_cols_);
  sqrt_spectrum_.resize(ext_rows_, ext_cols_);
  for (Index r = 0; r < ext_rows_; ++r)
    for (Index c = 0; c < ext_cols_; ++c)
      sqrt_spectrum_(r, c) = std::sqrt(std::max(0.0, base[static_cast<std::size_t>(r * ext_cols_ + c)].real()) / norm);
}

Raster MaternFieldGenerator::operator()(Rng& rng) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Complex> buf(static_cast<std::size_t>(ext_rows_ * ext_cols_));
  for (Index r = 0; r < ext_rows_; ++r)
    for (Index c = 0; c < ext_cols_; ++c) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      buf[static_cast<std::size_t>(r * ext_cols_ + c)] = sqrt_spectrum_(r, c) * Complex(re, im);
    }
  fft2(buf, ext_rows_, ext_cols_);
  GridArray<double> values(rows_, cols_);
  for (Index r = 0; r < rows_; ++r)
    for (Index c = 0; c < cols_; ++c) values(r, c) = spec_.mean + buf[static_cast<std::size_t>(r * ext_cols_ + c)].real();
  return Raster::fully_sampled(std::move(values));
}

Raster generate_field(Index rows, Index cols, const MaternSpec& spec, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return MaternFieldGenerator(rows, cols, spec)(rng);
}

namespace {

Holdout collect(const Raster& original, Raster sample) {
  Holdout h;
  h.removed.reserve(static_cast<std::size_t>(sample.n_missing()));
  for (Index r = 0; r < sample.rows(); ++r)
    for (Index c = 0; c < sample.cols(); ++c)
      if (!sample.is_sampled(r, c) && original.is_sampled(r, c)) h.removed.push_back({r, c});
  h.truth.resize(static_cast<Index>(h.removed.size()));
  for (std::size_t i = 0; i < h.removed.size(); ++i)
    h.truth(static_cast<Index>(i)) = original.value(h.removed[i].row, h.removed[i].col);
  h.sample = std::move(sample);
  return h;
}

}  // namespace

Holdout random_thin(const Raster& grid, double p_percent, std::uint64_t seed) {
  if (!(p_percent > 0.0 && p_percent < 100.0)) throw InvalidArgument("random_thin: p must be in (0, 100)");
  const auto n_remove = static_cast<Index>(std::floor(p_percent * static_cast<double>(grid.size()) / 100.0));

  std::vector<Index> candidates;
  candidates.reserve(static_cast<std::size_t>(grid.n_sampled()));
  for (Index i = 0; i < grid.size(); ++i)
    if (grid.is_sampled(i / grid.cols(), i % grid.cols())) candidates.push_back(i);
  if (n_remove > static_cast<Index>(candidates.size()))
    throw InvalidArgument("random_thin: more cells to remove than sampled cells");

  Rng rng = make_rng(seed);
  // partial Fisher-Yates: the first n_remove entries are the removed cells
  for (Index i = 0; i < n_remove; ++i) {
    std::uniform_int_distribution<Index> pick(i, static_cast<Index>(candidates.size()) - 1);
    std::swap(candidates[static_cast<std::size_t>(i)], candidates[static_cast<std::size_t>(pick(rng))]);
  }
  Raster sample = grid;
  for (Index i = 0; i < n_remove; ++i) {
    const Index k = candidates[static_cast<std::size_t>(i)];
    sample.set_missing(k / grid.cols(), k % grid.cols());
  }
  return collect(grid, std::move(sample));
}

Holdout block_remove(const Raster& grid, Cell origin, Index width, Index height) {
  if (width < 1 || height < 1) throw InvalidArgument("block_remove: block must be at least 1x1");
  if (origin.row < 0 || origin.col < 0 || origin.row + height > grid.rows() || origin.col + width > grid.cols())
    throw InvalidArgument("block_remove: block exceeds grid bounds");
  Raster sample = grid;
  for (Index r = origin.row; r < origin.row + height; ++r)
    for (Index c = origin.col; c < origin.col + width; ++c) sample.set_missing(r, c);
  return collect(grid, std::move(sample));
}

}  // namespace dgc
