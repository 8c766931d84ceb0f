// Copyright 2026 The GAC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File helpers shared by the structured formats: whole-file reads, atomic
// writes (temp file + rename) and typed JSON field access with error messages
// that name the offending field.

#ifndef GAC_IO_HPP
#define GAC_IO_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "gac/error.hpp"
#include "json.hpp"

namespace gac {

using Json = nlohmann::json;

inline constexpr std::string_view kFormatVersion = "1";

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::kIo, "cannot read '" + path.string() + "'");
  return ss.str();
}

// Writes to a sibling temp file and renames it over `path`, so readers never
// observe a partially written file.
inline void write_file_atomic(const std::filesystem::path& path,
                              std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, "cannot write '" + path.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      fail(ErrorKind::kIo, "cannot write '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::kIo, "cannot rename into '" + path.string() + "'");
  }
}

inline Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::kParse, std::string(what) + ": " + e.what());
  }
}

inline Json read_json(const std::filesystem::path& path) {
  return parse_json(read_file(path), path.string());
}

inline void write_json_atomic(const std::filesystem::path& path,
                              const Json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

namespace json_field {

inline const Json& require(const Json& obj, const char* key,
                           std::string_view context) {
  if (!obj.is_object() || !obj.contains(key)) {
    fail(ErrorKind::kParse,
         std::string(context) + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

inline std::string string(const Json& obj, const char* key,
                          std::string_view context) {
  const Json& v = require(obj, key, context);
  if (!v.is_string()) {
    fail(ErrorKind::kParse,
         std::string(context) + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

inline std::int64_t integer(const Json& obj, const char* key,
                            std::string_view context) {
  const Json& v = require(obj, key, context);
  if (!v.is_number_integer()) {
    fail(ErrorKind::kParse,
         std::string(context) + ": field '" + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

inline double number(const Json& obj, const char* key,
                     std::string_view context) {
  const Json& v = require(obj, key, context);
  if (!v.is_number()) {
    fail(ErrorKind::kParse,
         std::string(context) + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

// Accepts a missing field, or "format_version": "1".
inline void check_version(const Json& obj, std::string_view context) {
  if (!obj.is_object()) {
    fail(ErrorKind::kParse, std::string(context) + ": expected an object");
  }
  if (!obj.contains("format_version")) return;
  const Json& v = obj.at("format_version");
  if (!v.is_string() || v.get<std::string>() != kFormatVersion) {
    fail(ErrorKind::kParse, std::string(context) +
                                ": unsupported format_version (expected \"" +
                                std::string(kFormatVersion) + "\")");
  }
}

}  // namespace json_field
}  // namespace gac

#endif  // GAC_IO_HPP
