#include "dgc/grid.hpp"

namespace dgc {

ClassField::ClassField(LabelArray labels, Mask mask, int n_classes)
    : labels_(std::move(labels)), mask_(std::move(mask)), n_classes_(n_classes) {
  if (n_classes_ < 1) throw InvalidArgument("ClassField: need at least 1 class");
  if (labels_.rows() != mask_.rows() || labels_.cols() != mask_.cols())
    throw InvalidArgument("ClassField: mask shape differs from label shape");
  for (Index r = 0; r < rows(); ++r) {
    for (Index c = 0; c < cols(); ++c) {
      const int q = labels_(r, c);
      const bool ok = mask_(r, c) ? (q >= 1 && q <= n_classes_) : (q >= 0 && q <= n_classes_);
      if (!ok)
        throw InvalidArgument("ClassField: label " + std::to_string(q) + " out of range at (" +
                              std::to_string(r) + ", " + std::to_string(c) + ")");
    }
  }
}

void ClassField::set_label(Cell cell, int label) {
  if (mask_(cell.row, cell.col)) throw InvalidArgument("ClassField::set_label: cell is sampled");
  if (label < 1 || label > n_classes_) throw InvalidArgument("ClassField::set_label: label out of range");
  labels_(cell.row, cell.col) = label;
}

bool ClassField::fully_labeled() const {
  return (labels_ >= 1).all() && (labels_ <= n_classes_).all();
}

std::vector<Cell> ClassField::prediction_cells() const {
  std::vector<Cell> out;
  out.reserve(static_cast<std::size_t>(n_prediction()));
  for (Index r = 0; r < rows(); ++r)
    for (Index c = 0; c < cols(); ++c)
      if (!mask_(r, c)) out.push_back({r, c});
  return out;
}

}  // namespace dgc
