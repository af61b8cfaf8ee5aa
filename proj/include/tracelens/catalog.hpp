// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tracelens/analysis.hpp"
#include "tracelens/config.hpp"
#include "tracelens/trace_model.hpp"

// Rack/node/class topology and selection resolution.

namespace tracelens {

// Racks 30-34 hold the GPU (ML) nodes; everything else observed in a trace
// is treated as a generic CPU rack unless a catalog file says otherwise.
inline constexpr int kDefaultMlRacks[] = {30, 31, 32, 33, 34};

class Catalog {
 public:
  Catalog(std::vector<NodeRef> nodes, std::map<int, NodeClass> class_of_rack)
      : nodes_(std::move(nodes)), class_of_rack_(std::move(class_of_rack)) {
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    for (const NodeRef& n : nodes_) {
      if (class_of_rack_.find(n.rack) == class_of_rack_.end()) {
        throw Error(Errc::catalog_conflict,
                    "node " + n.raw + " belongs to rack " +
                        std::to_string(n.rack) + " which has no class");
      }
    }
  }

  // Default topology: the given nodes, with racks 30-34 classed ML and every
  // other observed rack classed Generic.
  static Catalog from_nodes(std::vector<NodeRef> observed) {
    std::map<int, NodeClass> classes;
    for (const NodeRef& n : observed) {
      bool ml = std::find(std::begin(kDefaultMlRacks), std::end(kDefaultMlRacks),
                          n.rack) != std::end(kDefaultMlRacks);
      classes[n.rack] = ml ? NodeClass::ML : NodeClass::Generic;
    }
    return Catalog(std::move(observed), std::move(classes));
  }

  // Catalog file: one `[rack.N]` section per rack with `class` and `nodes`
  // (node count; ids run r{N}n1..r{N}n{count}).
  static Catalog load(const std::filesystem::path& path) {
    ConfigFile cfg = ConfigFile::parse_file(path);
    return from_config(cfg);
  }

  static Catalog from_config(const ConfigFile& cfg) {
    std::vector<NodeRef> nodes;
    std::map<int, NodeClass> classes;
    for (const auto& [section, keys] : cfg.ordered_sections()) {
      if (section.rfind("rack.", 0) != 0) continue;
      const std::string rack_text = section.substr(5);
      int rack = 0;
      try {
        std::size_t used = 0;
        rack = std::stoi(rack_text, &used);
        if (used != rack_text.size() || rack < 0) throw std::invalid_argument(rack_text);
      } catch (const std::exception&) {
        throw Error(Errc::bad_config, cfg.origin() + ": bad rack section [" +
                                          section + "]");
      }
      auto cls_it = keys.find("class");
      if (cls_it == keys.end()) {
        throw Error(Errc::bad_config, cfg.origin() + ": [" + section +
                                          "] is missing its class");
      }
      auto cls = parse_node_class(cls_it->second);
      if (!cls) {
        throw Error(Errc::bad_config, cfg.origin() + ": [" + section +
                                          "] class must be generic or ml");
      }
      if (classes.find(rack) != classes.end()) {
        throw Error(Errc::catalog_conflict,
                    "rack " + std::to_string(rack) + " assigned two classes");
      }
      classes[rack] = *cls;
      std::int64_t count = 0;
      if (auto it = keys.find("nodes"); it != keys.end()) {
        try {
          std::size_t used = 0;
          count = std::stoll(it->second, &used);
          if (used != it->second.size() || count < 0) {
            throw std::invalid_argument(it->second);
          }
        } catch (const std::exception&) {
          throw Error(Errc::bad_config, cfg.origin() + ": [" + section +
                                            "] has a bad node count");
        }
      }
      for (std::int64_t i = 1; i <= count; ++i) {
        nodes.push_back(NodeRef::make(rack, static_cast<int>(i)));
      }
    }
    if (classes.empty()) {
      throw Error(Errc::bad_config,
                  cfg.origin() + ": catalog defines no racks");
    }
    return Catalog(std::move(nodes), std::move(classes));
  }

  const std::vector<NodeRef>& nodes() const { return nodes_; }
  const std::map<int, NodeClass>& class_of_rack() const {
    return class_of_rack_;
  }

  bool has_rack(int rack) const {
    return class_of_rack_.find(rack) != class_of_rack_.end();
  }
  bool has_node(const NodeRef& n) const {
    return std::binary_search(nodes_.begin(), nodes_.end(), n);
  }

  NodeClass rack_class(int rack) const {
    auto it = class_of_rack_.find(rack);
    if (it == class_of_rack_.end()) {
      throw Error(Errc::unknown_rack, "r" + std::to_string(rack));
    }
    return it->second;
  }

  NodeClass node_class(const NodeRef& n) const {
    if (!has_node(n)) throw Error(Errc::unknown_node, n.raw);
    return rack_class(n.rack);
  }

  std::vector<int> generic_racks() const { return racks_of(NodeClass::Generic); }
  std::vector<int> ml_racks() const { return racks_of(NodeClass::ML); }

  std::vector<NodeRef> nodes_in_rack(int rack) const {
    std::vector<NodeRef> out;
    for (const NodeRef& n : nodes_) {
      if (n.rack == rack) out.push_back(n);
    }
    return out;
  }

  std::vector<NodeRef> nodes_in_class(NodeClass cls) const {
    std::vector<NodeRef> out;
    for (const NodeRef& n : nodes_) {
      if (class_of_rack_.at(n.rack) == cls) out.push_back(n);
    }
    return out;
  }

 private:
  std::vector<int> racks_of(NodeClass cls) const {
    std::vector<int> out;
    for (const auto& [rack, c] : class_of_rack_) {
      if (c == cls) out.push_back(rack);
    }
    return out;  // map iteration is already ascending
  }

  std::vector<NodeRef> nodes_;  // sorted by (rack, node)
  std::map<int, NodeClass> class_of_rack_;
};

// A user selection. At most one of {nodes, racks} may be set; a class
// restriction may combine with either.
struct Selection {
  std::optional<std::vector<NodeRef>> nodes;
  std::optional<std::vector<int>> racks;
  std::optional<NodeClass> node_class;

  bool empty() const {
    return !nodes.has_value() && !racks.has_value() && !node_class.has_value();
  }
};

// Resolves a selection to concrete nodes in (rack, node) order. The empty
// selection resolves to every cataloged node.
inline std::vector<NodeRef> resolve(const Selection& selection,
                                    const Catalog& catalog) {
  if (selection.nodes.has_value() && selection.racks.has_value()) {
    throw Error(Errc::bad_config,
                "select either nodes or racks, not both");
  }

  std::vector<NodeRef> out;
  if (selection.nodes.has_value()) {
    for (const NodeRef& n : *selection.nodes) {
      if (!catalog.has_node(n)) throw Error(Errc::unknown_node, n.raw);
      // take the catalog's canonical spelling
      out.push_back(*std::lower_bound(catalog.nodes().begin(),
                                      catalog.nodes().end(), n));
    }
  } else if (selection.racks.has_value()) {
    std::set<int> racks(selection.racks->begin(), selection.racks->end());
    for (int r : racks) {
      if (!catalog.has_rack(r)) {
        throw Error(Errc::unknown_rack, "r" + std::to_string(r));
      }
    }
    for (const NodeRef& n : catalog.nodes()) {
      if (racks.count(n.rack) > 0) out.push_back(n);
    }
  } else {
    out = catalog.nodes();
  }

  if (selection.node_class.has_value()) {
    std::vector<NodeRef> filtered;
    for (const NodeRef& n : out) {
      if (catalog.rack_class(n.rack) == *selection.node_class) {
        filtered.push_back(n);
      }
    }
    out = std::move(filtered);
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::map<int, std::vector<double>> group_by_rack(
    std::span<const TimeSeries> series_set, const Catalog& catalog) {
  return group_by_rack_nodes(series_set, catalog.nodes());
}

}  // namespace tracelens
