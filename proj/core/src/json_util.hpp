// ----------------------------------------------------------------------------
// Copyright 2026 The ArgueLab Authors
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
// ----------------------------------------------------------------------------

#pragma once

#include <json.hpp>
#include <string>
#include <string_view>

#include "argue/error.hpp"
#include "argue/numerics.hpp"

// Shared (private) JSON helpers. nlohmann serializes doubles with the
// shortest round-tripping representation, so dump/parse is bit-exact.
namespace argue::detail {

using json = nlohmann::json;

inline json parse_json(std::string_view text, ErrorKind on_error, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(on_error, what + ": " + e.what());
  }
}

inline json to_json(const Vector& v) { return json(v.values()); }

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto s = m.row_span(r);
    rows.push_back(std::vector<double>(s.begin(), s.end()));
  }
  return rows;
}

inline Vector vector_from_json(const json& j) { return Vector(j.get<std::vector<double>>()); }

inline Matrix matrix_from_json(const json& j, std::size_t cols_if_empty = 0) {
  std::vector<Vector> rows;
  for (const auto& r : j) rows.push_back(vector_from_json(r));
  if (rows.empty()) return Matrix(0, cols_if_empty);
  return Matrix::from_rows(rows);
}

// Converts nlohmann access errors into a single library error kind.
template <typename F>
auto guarded(ErrorKind kind, const std::string& what, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const json::exception& e) {
    fail(kind, what + ": " + e.what());
  }
}

inline std::string dump(const json& j, int indent = 1) { return j.dump(indent) + "\n"; }

}  // namespace argue::detail
