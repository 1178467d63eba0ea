/*
 * Copyright 2026 The bemlab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace bemlab::csv {

/// Buffered line-oriented writer. Throws on open or write failure.
class Writer {
 public:
  explicit Writer(const std::filesystem::path& path);
  ~Writer();
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void write_header(const std::vector<std::string>& columns);
  /// Appends `line` followed by a newline.
  void write_line(std::string_view line);
  void close();
  std::uint64_t lines_written() const { return lines_; }

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  std::string buffer_;
  std::uint64_t lines_ = 0;
  void flush();
};

/// Streaming CSV reader with schema check and located error messages.
///
/// Cells are unquoted; the files produced by this project never contain
/// commas inside values.
class Reader {
 public:
  /// Opens `path` and checks that its header equals `expected_columns`.
  Reader(const std::filesystem::path& path, const std::vector<std::string>& expected_columns);
  ~Reader();
  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  /// Advances to the next data row and splits it. Returns false at EOF.
  bool next_row();
  /// Advances past the next data row without splitting it.
  bool skip_row();

  std::size_t size() const { return fields_.size(); }
  std::string_view text(std::size_t col) const;
  double number(std::size_t col) const;
  std::int64_t integer(std::size_t col) const;

  /// 1-based line number in the file of the current row (header is line 1).
  std::uint64_t line_number() const { return line_no_; }
  /// 0-based index of the current data row.
  std::uint64_t row_index() const { return line_no_ - 2; }
  const std::filesystem::path& path() const { return path_; }

  [[noreturn]] void fail(std::size_t col, const std::string& what) const;

 private:
  bool next_line(std::string_view& line);

  std::filesystem::path path_;
  std::vector<std::string> columns_;
  std::FILE* file_ = nullptr;
  std::vector<char> buffer_;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
  bool eof_ = false;
  std::string carry_;
  bool carry_used_ = false;
  std::uint64_t line_no_ = 0;
  std::vector<std::string_view> fields_;
};

std::vector<std::string> split(std::string_view line, char sep = ',');
std::string join(const std::vector<std::string>& parts, char sep = ',');

/// Counts data lines (excluding the header) without parsing them.
std::uint64_t count_data_lines(const std::filesystem::path& path);

}  // namespace bemlab::csv
