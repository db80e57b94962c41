#include "dgc/mrass.hpp"

#include <algorithm>
#include <vector>

namespace dgc {

void validate(const MrassConfig& cfg) {
  if (cfg.m_max < 3 || cfg.m_max % 2 == 0) throw InvalidArgument("m_max must be an odd integer >= 3");
}

namespace {

// Label tallies over a growing stencil; `touched` lists labels with a non-zero count.
struct Tally {
  std::vector<int> counts;
  std::vector<int> touched;

  explicit Tally(int n_classes) : counts(static_cast<std::size_t>(n_classes) + 1, 0) {}

  void add(int label) {
    if (counts[label]++ == 0) touched.push_back(label);
  }

  void clear() {
    for (int q : touched) counts[q] = 0;
    touched.clear();
  }

  // Labels sharing the highest count, ascending.
  std::vector<int> leaders() const {
    int best = 0;
    for (int q : touched) best = std::max(best, counts[q]);
    std::vector<int> out;
    for (int q : touched)
      if (counts[q] == best) out.push_back(q);
    std::sort(out.begin(), out.end());
    return out;
  }
};

}  // namespace

ClassField mrass_initialize(const ClassField& field, const MrassConfig& cfg, Rng& rng) {
  validate(cfg);
  LabelArray labels = field.labels();
  const auto& mask = field.mask();
  const Index rows = field.rows(), cols = field.cols();
  Tally tally(field.n_classes());

  const auto visit = [&](Index r, Index c) {
    if (r >= 0 && c >= 0 && r < rows && c < cols && mask(r, c)) tally.add(field.label(r, c));
  };

  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      if (mask(r, c)) continue;
      tally.clear();
      std::vector<int> tied;
      bool assigned = false;
      for (Index l = 1; 2 * l + 1 <= cfg.m_max; ++l) {
        // ring at Chebyshev distance l
        for (Index k = -l; k <= l; ++k) {
          visit(r - l, c + k);
          visit(r + l, c + k);
        }
        for (Index k = -l + 1; k <= l - 1; ++k) {
          visit(r + k, c - l);
          visit(r + k, c + l);
        }
        if (tally.touched.empty()) continue;
        tied = tally.leaders();
        if (tied.size() == 1) {
          labels(r, c) = tied.front();
          assigned = true;
          break;
        }
      }
      if (assigned) continue;
      if (tied.empty()) {
        std::uniform_int_distribution<int> pick(1, field.n_classes());
        labels(r, c) = pick(rng);
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
        labels(r, c) = tied[pick(rng)];
      }
    }
  }
  return ClassField(std::move(labels), mask, field.n_classes());
}

}  // namespace dgc
