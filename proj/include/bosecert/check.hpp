#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace bosecert {

// One verified statement: a computed value, its residual against the reference and the
// tolerance it was judged by.
struct CheckRecord {
  std::string check_id;
  std::string anchor;
  nlohmann::json inputs = nlohmann::json::object();
  double value = 0.0;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;

  bool operator==(const CheckRecord&) const = default;
};

struct IdentityReport {
  std::vector<CheckRecord> records;

  bool pass() const {
    for (const auto& r : records)
      if (!r.pass)
        return false;
    return true;
  }
  double max_residual() const {
    double m = 0.0;
    for (const auto& r : records)
      m = std::max(m, r.residual);
    return m;
  }
  const CheckRecord* find(const std::string& id) const {
    for (const auto& r : records)
      if (r.check_id == id)
        return &r;
    return nullptr;
  }
  // Adds a record that passes when residual <= tol.
  CheckRecord& add(std::string id, std::string anchor, double value, double residual, double tol,
                   nlohmann::json inputs = nlohmann::json::object()) {
    records.push_back({std::move(id), std::move(anchor), std::move(inputs), value, residual, tol,
                       residual <= tol});
    return records.back();
  }
};

} // namespace bosecert
