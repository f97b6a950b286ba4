#pragma once

#include <string>
#include <vector>

#include "cwm/harness/harness.hpp"

namespace cwm::eval {

/// Intrinsic stress-test table: one block per negative category plus the
/// combined row set, one row per system, four metric columns.
std::string render_intrinsic_table(
    const std::vector<harness::IntrinsicReport>& reports);

/// Filter characterization table: retention at each K plus safety
/// margin, grouped by condition.
std::string render_filter_table(
    const std::vector<harness::FilterReport>& reports);

}  // namespace cwm::eval
