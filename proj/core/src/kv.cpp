// Copyright 2026 The tagcl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tagcl/kv.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "tagcl/graph.hpp"

namespace tagcl {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KvEntries parse_kv_text(const std::string& text, const std::string& source_name) {
  KvEntries entries;
  std::unordered_set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(source_name + ":" + std::to_string(line_no) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ValidationError(source_name + ":" + std::to_string(line_no) + ": empty key");
    if (!seen.insert(key).second)
      throw ValidationError(source_name + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

KvEntries parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kv_text(buf.str(), path);
}

void write_kv_file(const std::string& path, const KvEntries& entries) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot open file for writing");
  for (const auto& [k, v] : entries) out << k << "=" << v << "\n";
  if (!out) throw ValidationError(path + ": write failed");
}

}  // namespace tagcl
