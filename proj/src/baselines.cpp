#include "dgc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

namespace dgc {

namespace {

struct Candidate {
  Index d2;
  Cell cell;

  bool operator<(const Candidate& o) const {
    return std::tie(d2, cell.row, cell.col) < std::tie(o.d2, o.cell.row, o.cell.col);
  }
};

int vote(const LabelArray& labels, const std::vector<Cell>& neighbors, std::size_t k, std::vector<int>& counts) {
  std::fill(counts.begin(), counts.end(), 0);
  for (std::size_t i = 0; i < k; ++i) ++counts[static_cast<std::size_t>(labels(neighbors[i].row, neighbors[i].col))];
  // max_element returns the first maximum, i.e. the smallest tied label
  return static_cast<int>(std::max_element(counts.begin() + 1, counts.end()) - counts.begin());
}

std::vector<Cell> prediction_cells(const Mask& mask) {
  std::vector<Cell> out;
  for (Index r = 0; r < mask.rows(); ++r)
    for (Index c = 0; c < mask.cols(); ++c)
      if (!mask(r, c)) out.push_back({r, c});
  return out;
}

}  // namespace

std::vector<Cell> nearest_cells(const Mask& available, Cell q, int k) {
  std::vector<Candidate> found;
  const Index rows = available.rows(), cols = available.cols();
  const Index max_ring = std::max(rows, cols);
  const auto consider = [&](Index r, Index c) {
    if (r < 0 || c < 0 || r >= rows || c >= cols || !available(r, c)) return;
    const Index dr = r - q.row, dc = c - q.col;
    found.push_back({dr * dr + dc * dc, {r, c}});
  };
  consider(q.row, q.col);
  for (Index l = 1; l <= max_ring; ++l) {
    for (Index t = -l; t <= l; ++t) {
      consider(q.row - l, q.col + t);
      consider(q.row + l, q.col + t);
    }
    for (Index t = -l + 1; t <= l - 1; ++t) {
      consider(q.row + t, q.col - l);
      consider(q.row + t, q.col + l);
    }
    // cells beyond ring l are at distance >= l + 1
    if (static_cast<int>(found.size()) >= k) {
      std::nth_element(found.begin(), found.begin() + (k - 1), found.end());
      if (found[static_cast<std::size_t>(k - 1)].d2 < (l + 1) * (l + 1)) break;
    }
  }
  std::sort(found.begin(), found.end());
  if (static_cast<int>(found.size()) > k) found.resize(static_cast<std::size_t>(k));
  std::vector<Cell> out;
  out.reserve(found.size());
  for (const auto& f : found) out.push_back(f.cell);
  return out;
}

void validate(const KnnConfig& cfg) {
  if (cfg.k_candidates.empty()) throw InvalidArgument("KNN: no k candidates");
  for (int k : cfg.k_candidates)
    if (k < 1) throw InvalidArgument("KNN: k must be >= 1");
  if (cfg.cv_folds < 2) throw InvalidArgument("KNN: need at least 2 folds");
}

Eigen::VectorXi knn_predict(const ClassField& field, int k) {
  if (k < 1) throw InvalidArgument("KNN: k must be >= 1");
  if (field.size() - field.n_prediction() < k) throw InvalidArgument("KNN: fewer sampled cells than k");
  const auto cells = prediction_cells(field.mask());
  Eigen::VectorXi out(static_cast<Index>(cells.size()));
  std::vector<int> counts(static_cast<std::size_t>(field.n_classes()) + 1);
  for (std::size_t p = 0; p < cells.size(); ++p) {
    const auto nb = nearest_cells(field.mask(), cells[p], k);
    out(static_cast<Index>(p)) = vote(field.labels(), nb, nb.size(), counts);
  }
  return out;
}

KnnResult knn_classify(const ClassField& field, const KnnConfig& cfg, Rng& rng) {
  validate(cfg);
  const int k_max = *std::max_element(cfg.k_candidates.begin(), cfg.k_candidates.end());
  const Index n_sampled = field.size() - field.n_prediction();
  if (n_sampled < k_max) throw InvalidArgument("KNN: fewer sampled cells (" + std::to_string(n_sampled) +
                                               ") than the largest k (" + std::to_string(k_max) + ")");

  std::vector<Cell> sampled;
  sampled.reserve(static_cast<std::size_t>(n_sampled));
  for (Index r = 0; r < field.rows(); ++r)
    for (Index c = 0; c < field.cols(); ++c)
      if (field.is_sampled(r, c)) sampled.push_back({r, c});
  std::shuffle(sampled.begin(), sampled.end(), rng);

  const int folds = std::min<int>(cfg.cv_folds, static_cast<int>(sampled.size()));
  std::vector<double> err_sum(cfg.k_candidates.size(), 0.0);
  std::vector<int> counts(static_cast<std::size_t>(field.n_classes()) + 1);
  for (int f = 0; f < folds; ++f) {
    Mask train = field.mask();
    std::vector<Cell> held;
    for (std::size_t i = static_cast<std::size_t>(f); i < sampled.size(); i += static_cast<std::size_t>(folds)) {
      held.push_back(sampled[i]);
      train(sampled[i].row, sampled[i].col) = false;
    }
    if (train.count() < k_max) throw InvalidArgument("KNN: training fold smaller than the largest k");
    std::vector<int> wrong(cfg.k_candidates.size(), 0);
    for (const Cell& h : held) {
      const auto nb = nearest_cells(train, h, k_max);
      for (std::size_t i = 0; i < cfg.k_candidates.size(); ++i) {
        const auto k = static_cast<std::size_t>(cfg.k_candidates[i]);
        if (vote(field.labels(), nb, k, counts) != field.label(h)) ++wrong[i];
      }
    }
    for (std::size_t i = 0; i < wrong.size(); ++i) err_sum[i] += static_cast<double>(wrong[i]) / held.size();
  }

  KnnResult res;
  res.cv_error.resize(cfg.k_candidates.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < err_sum.size(); ++i) {
    res.cv_error[i] = err_sum[i] / folds;
    if (res.cv_error[i] < res.cv_error[best]) best = i;
  }
  res.k = cfg.k_candidates[best];
  res.labels = knn_predict(field, res.k);
  return res;
}

Eigen::VectorXd nn_interpolate(const Raster& grid) {
  if (grid.n_sampled() == 0) throw InvalidArgument("nn_interpolate: no sampled cells");
  const auto cells = grid.missing_cells();
  Eigen::VectorXd out(static_cast<Index>(cells.size()));
  for (std::size_t p = 0; p < cells.size(); ++p) {
    const Cell nb = nearest_cells(grid.mask(), cells[p], 1).front();
    out(static_cast<Index>(p)) = grid.value(nb.row, nb.col);
  }
  return out;
}

Eigen::VectorXd idw_interpolate(const Raster& grid, double power, std::optional<double> radius) {
  if (!(power > 0.0)) throw InvalidArgument("idw_interpolate: power must be positive");
  if (radius && !(*radius > 0.0)) throw InvalidArgument("idw_interpolate: radius must be positive");
  const auto cells = grid.missing_cells();
  std::vector<Cell> sampled;
  for (Index r = 0; r < grid.rows(); ++r)
    for (Index c = 0; c < grid.cols(); ++c)
      if (grid.is_sampled(r, c)) sampled.push_back({r, c});

  Eigen::VectorXd out(static_cast<Index>(cells.size()));
  for (std::size_t p = 0; p < cells.size(); ++p) {
    const Cell q = cells[p];
    double num = 0.0, den = 0.0;
    const auto add = [&](Cell s) {
      const double dr = static_cast<double>(s.row - q.row), dc = static_cast<double>(s.col - q.col);
      const double d2 = dr * dr + dc * dc;
      if (radius && d2 > *radius * *radius) return;
      const double w = std::pow(d2, -0.5 * power);
      num += w * grid.value(s.row, s.col);
      den += w;
    };
    if (radius) {
      const auto reach = static_cast<Index>(std::floor(*radius));
      for (Index r = std::max<Index>(0, q.row - reach); r <= std::min(grid.rows() - 1, q.row + reach); ++r)
        for (Index c = std::max<Index>(0, q.col - reach); c <= std::min(grid.cols() - 1, q.col + reach); ++c)
          if (grid.is_sampled(r, c)) add({r, c});
    } else {
      for (const Cell& s : sampled) add(s);
    }
    if (den == 0.0)
      throw InvalidArgument("idw_interpolate: no sampled cell within radius of cell (" + std::to_string(q.row) + ", " +
                            std::to_string(q.col) + ")");
    out(static_cast<Index>(p)) = num / den;
  }
  return out;
}

}  // namespace dgc
