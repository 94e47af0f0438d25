#pragma once

#include <string>

#include "coopmitl/mitl.hpp"

namespace coopmitl::plan {

/// Normal form used as the planner's state key: constants folded, double
/// negations removed, and/or flattened, deduplicated and sorted by text.
mitl::Formula simplify(const mitl::Formula& f);

/// Residual obligation for the next position: (w, j) |= f exactly when
/// (w, j + 1) |= progress(f, symbol_j, t_{j+1} - t_j).
mitl::Formula progress(const mitl::Formula& f, const PropositionSet& symbol, double delta);

/// True when no until/eventually/always below f has an unbounded interval.
bool is_bounded(const mitl::Formula& f);

/// Planner fragment: a conjunction whose members are bounded formulas or
/// G[a,inf) over a bounded body. On failure, `reason` (if given) says why.
bool in_fragment(const mitl::Formula& f, std::string* reason = nullptr);

/// Throws UnsupportedFragment unless in_fragment(f).
void require_fragment(const mitl::Formula& f);

}  // namespace coopmitl::plan
