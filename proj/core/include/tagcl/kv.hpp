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

#ifndef TAGCL_KV_HPP_
#define TAGCL_KV_HPP_

#include <string>
#include <utility>
#include <vector>

namespace tagcl {

// key=value config lines, '#' comments, order preserving. Duplicate keys are
// rejected so a typo cannot silently shadow an earlier setting.
using KvEntries = std::vector<std::pair<std::string, std::string>>;

KvEntries parse_kv_text(const std::string& text, const std::string& source_name);
KvEntries parse_kv_file(const std::string& path);
void write_kv_file(const std::string& path, const KvEntries& entries);

}  // namespace tagcl

#endif  // TAGCL_KV_HPP_
