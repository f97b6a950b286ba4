#include "cwm/eval/tables.hpp"

#include <cstdio>

namespace cwm::eval {

namespace {

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

std::string pad(const std::string& text, std::size_t width) {
  std::string out = text;
  while (out.size() < width) out.push_back(' ');
  return out;
}

}  // namespace

std::string render_intrinsic_table(
    const std::vector<harness::IntrinsicReport>& reports) {
  static const std::vector<std::pair<std::string, std::string>> categories = {
      {harness::kCategoryRejection, "rejection-only"},
      {harness::kCategoryCrossTask, "cross-task"},
      {harness::kCategoryMinimalEdit, "minimal-edit"},
      {harness::kCategoryCombined, "combined"},
  };

  std::string out = "intrinsic discrimination stress test\n";
  for (const auto& [key, label] : categories) {
    std::size_t instances = 0;
    for (const auto& report : reports) {
      const auto it = report.categories.find(key);
      if (it != report.categories.end()) instances = it->second.instances;
    }
    out += "\n" + label + " (n=" + std::to_string(instances) + ")\n";
    out += pad("system", 12) + pad("p@1", 9) + pad("mrr", 9) + pad("auc", 9) +
           "score-gap\n";
    for (const auto& report : reports) {
      const auto it = report.categories.find(key);
      if (it == report.categories.end()) continue;
      const MetricBundle& b = it->second;
      out += pad(report.system, 12) + pad(fmt("%.4f", b.p_at_1), 9) +
             pad(fmt("%.4f", b.mrr), 9) + pad(fmt("%.4f", b.auc), 9) +
             fmt("%+.4f", b.score_gap) + "\n";
    }
  }
  return out;
}

std::string render_filter_table(
    const std::vector<harness::FilterReport>& reports) {
  std::string out = "teacher-forced filter characterization\n\n";
  out += pad("condition", 12) + pad("system", 12);
  if (!reports.empty()) {
    for (const auto& [k, v] : reports.front().garr) {
      out += pad("garr@" + std::to_string(k), 9);
    }
  }
  out += pad("margin", 9) + pad("excl", 7) + "steps\n";
  for (const auto& report : reports) {
    out += pad(report.condition, 12) + pad(report.system, 12);
    for (const auto& [k, v] : report.garr) {
      out += pad(fmt("%.4f", v), 9);
    }
    out += pad(fmt("%+.3f", report.safety_margin), 9) +
           pad(fmt("%.3f", report.exclusion_rate), 7) +
           std::to_string(report.steps) + "\n";
  }
  return out;
}

}  // namespace cwm::eval
