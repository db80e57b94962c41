#pragma once

#include "dgc/grid.hpp"
#include "dgc/rng.hpp"

namespace dgc {

/// Majority rule with adaptable stencil size.
struct MrassConfig {
  int m_max = 7;  // odd, >= 3
};

void validate(const MrassConfig& cfg);

/// Assigns a label to every prediction cell from the sampled cells around it.
///
/// Stencils of edge m = 3, 5, ..., m_max centered at the cell are scanned in
/// order, and the first one holding a unique most frequent sampled label wins.
/// A tie that persists up to m_max is broken uniformly among the tied labels;
/// an m_max stencil without sampled cells draws uniformly from 1..N_c. Only
/// sampled cells vote. Cells are visited in row-major order, and `rng` is
/// consumed only for random assignments.
ClassField mrass_initialize(const ClassField& field, const MrassConfig& cfg, Rng& rng);

}  // namespace dgc
