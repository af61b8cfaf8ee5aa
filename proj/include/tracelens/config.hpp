// Copyright 2026 the tracelens authors. All rights reserved.
// Use of this source code is governed by the Apache-2.0 license
// that can be found in the LICENSE file.

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tracelens/errors.hpp"

// Minimal TOML-like key/value reader used for catalogs and run configuration.
// Supported syntax:
//
//   # comment
//   [section.name]
//   key = "quoted string"
//   other = bare_token_or_number
//
// Keys before any section header land in the "" section. That is the whole
// grammar; nothing else from TOML is recognized.

namespace tracelens {

class ConfigFile {
 public:
  using Section = std::map<std::string, std::string>;

  static ConfigFile parse(std::string_view text, std::string origin = "<config>") {
    ConfigFile cfg;
    cfg.origin_ = std::move(origin);
    cfg.ordered_.push_back({"", {}});
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      std::string_view line = text.substr(
          pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
      pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
      ++line_no;

      line = strip(line);
      if (line.empty() || line[0] == '#' || line[0] == ';') continue;

      if (line.front() == '[') {
        if (line.back() != ']' || line.size() < 3) {
          cfg.fail(line_no, "malformed section header");
        }
        std::string name(strip(line.substr(1, line.size() - 2)));
        if (name.empty()) cfg.fail(line_no, "empty section name");
        // duplicate headers stay separate entries so loaders can object
        cfg.ordered_.push_back({std::move(name), {}});
        continue;
      }

      std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) {
        cfg.fail(line_no, "expected key = value");
      }
      std::string key(strip(line.substr(0, eq)));
      std::string_view value = strip(line.substr(eq + 1));
      if (key.empty()) cfg.fail(line_no, "empty key");
      if (!value.empty() && (value.front() == '"' || value.front() == '\'')) {
        if (value.size() < 2 || value.back() != value.front()) {
          cfg.fail(line_no, "unterminated quoted value");
        }
        value = value.substr(1, value.size() - 2);
      } else {
        // bare values run until a trailing comment
        std::size_t hash = value.find(" #");
        if (hash != std::string_view::npos) value = strip(value.substr(0, hash));
      }
      cfg.ordered_.back().second[key] = std::string(value);
    }
    for (const auto& [name, keys] : cfg.ordered_) {
      if (name.empty() && keys.empty()) continue;
      for (const auto& [k, v] : keys) cfg.sections_[name][k] = v;
      cfg.sections_[name];
    }
    return cfg;
  }

  static ConfigFile parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
      throw Error(Errc::io_error, "cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
  }

  const std::string* find(const std::string& section,
                          const std::string& key) const {
    auto sit = sections_.find(section);
    if (sit == sections_.end()) return nullptr;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return nullptr;
    return &kit->second;
  }

  std::string get_string(const std::string& section, const std::string& key,
                         std::string fallback = {}) const {
    const std::string* v = find(section, key);
    return v != nullptr ? *v : fallback;
  }

  std::optional<std::int64_t> get_int(const std::string& section,
                                      const std::string& key) const {
    const std::string* v = find(section, key);
    if (v == nullptr) return std::nullopt;
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size()) {
      throw Error(Errc::bad_config, origin_ + ": key '" + section + "." + key +
                                        "' is not an integer: '" + *v + "'");
    }
    return out;
  }

  std::optional<double> get_double(const std::string& section,
                                   const std::string& key) const {
    const std::string* v = find(section, key);
    if (v == nullptr) return std::nullopt;
    try {
      std::size_t used = 0;
      double out = std::stod(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return out;
    } catch (const std::exception&) {
      throw Error(Errc::bad_config, origin_ + ": key '" + section + "." + key +
                                        "' is not a number: '" + *v + "'");
    }
  }

  // merged view, last declaration wins
  const std::map<std::string, Section>& sections() const { return sections_; }
  // declaration order, duplicate headers preserved
  const std::vector<std::pair<std::string, Section>>& ordered_sections() const {
    return ordered_;
  }
  const std::string& origin() const { return origin_; }

 private:
  static std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                          s.front() == '\r')) {
      s.remove_prefix(1);
    }
    while (!s.empty() &&
           (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
      s.remove_suffix(1);
    }
    return s;
  }

  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    throw Error(Errc::bad_config,
                origin_ + ":" + std::to_string(line) + ": " + what);
  }

  std::string origin_;
  std::map<std::string, Section> sections_;
  std::vector<std::pair<std::string, Section>> ordered_;
};

}  // namespace tracelens
