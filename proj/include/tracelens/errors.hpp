// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tracelens {

// Every failure surfaced by the library carries one of these codes. The
// kebab-case names are part of the CLI contract (`error: <code>: <detail>`).
enum class Errc {
  malformed_node_id,
  bad_envelope,
  store_corrupt,
  mixed_metrics,
  catalog_conflict,
  unknown_node,
  unknown_rack,
  empty_input,
  degenerate_distribution,
  wrong_grouping,
  empty_spec,
  payload_mismatch,
  ragged_rows,
  overlapping_periods,
  bad_config,
  io_error,
};

constexpr const char* errc_name(Errc c) {
  switch (c) {
    case Errc::malformed_node_id: return "malformed-node-id";
    case Errc::bad_envelope: return "bad-envelope";
    case Errc::store_corrupt: return "store-corrupt";
    case Errc::mixed_metrics: return "mixed-metrics";
    case Errc::catalog_conflict: return "catalog-conflict";
    case Errc::unknown_node: return "unknown-node";
    case Errc::unknown_rack: return "unknown-rack";
    case Errc::empty_input: return "empty-input";
    case Errc::degenerate_distribution: return "degenerate-distribution";
    case Errc::wrong_grouping: return "wrong-grouping";
    case Errc::empty_spec: return "empty-spec";
    case Errc::payload_mismatch: return "payload-mismatch";
    case Errc::ragged_rows: return "ragged-rows";
    case Errc::overlapping_periods: return "overlapping-periods";
    case Errc::bad_config: return "bad-config";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

// Exit code classes: mistakes in user-supplied configuration exit 2, problems
// with the data itself exit 1.
constexpr int errc_exit_code(Errc c) {
  switch (c) {
    case Errc::malformed_node_id:
    case Errc::catalog_conflict:
    case Errc::unknown_node:
    case Errc::unknown_rack:
    case Errc::wrong_grouping:
    case Errc::overlapping_periods:
    case Errc::bad_config:
      return 2;
    default:
      return 1;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
        code_(code),
        detail_(std::move(detail)) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

// Optional warning sink. Operations that can proceed past a defect (skipped
// series, empty period side, collapsed duplicates) report through this
// instead of failing.
struct Warnings {
  std::vector<std::string> items;
  void add(std::string msg) { items.push_back(std::move(msg)); }
  bool empty() const { return items.empty(); }
};

inline void warn(Warnings* sink, std::string msg) {
  if (sink != nullptr) sink->add(std::move(msg));
}

}  // namespace tracelens
