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

#include "bemlab/csv.hpp"

#include <charconv>
#include <cstring>

#include "bemlab/common.hpp"

namespace bemlab::csv {

namespace {
constexpr std::size_t kBufferSize = 1 << 22;
}

Writer::Writer(const std::filesystem::path& path) : path_(path) {
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) throw std::runtime_error("cannot open for writing: " + path.string());
  buffer_.reserve(kBufferSize + 4096);
}

Writer::~Writer() {
  if (file_) {
    try {
      close();
    } catch (...) {
    }
  }
}

void Writer::flush() {
  if (buffer_.empty()) return;
  if (std::fwrite(buffer_.data(), 1, buffer_.size(), file_) != buffer_.size())
    throw std::runtime_error("write failed: " + path_.string());
  buffer_.clear();
}

void Writer::write_header(const std::vector<std::string>& columns) { write_line(join(columns)); }

void Writer::write_line(std::string_view line) {
  buffer_.append(line);
  buffer_.push_back('\n');
  ++lines_;
  if (buffer_.size() >= kBufferSize) flush();
}

void Writer::close() {
  if (!file_) return;
  flush();
  const int rc = std::fclose(file_);
  file_ = nullptr;
  if (rc != 0) throw std::runtime_error("close failed: " + path_.string());
}

Reader::Reader(const std::filesystem::path& path, const std::vector<std::string>& expected_columns)
    : path_(path), columns_(expected_columns) {
  file_ = std::fopen(path.c_str(), "rb");
  if (!file_) throw ParseError(path.string() + ": missing or unreadable file");
  buffer_.resize(kBufferSize);
  std::string_view header;
  if (!next_line(header)) throw ParseError(path.string() + ": empty file, expected header");
  const auto got = split(header);
  if (got != columns_) {
    throw ParseError(path.string() + ": header mismatch; expected '" + join(columns_) + "' got '" +
                     std::string(header) + "'");
  }
}

Reader::~Reader() {
  if (file_) std::fclose(file_);
}

bool Reader::next_line(std::string_view& line) {
  if (carry_used_) {
    carry_.clear();
    carry_used_ = false;
  }
  for (;;) {
    if (begin_ < end_) {
      const char* start = buffer_.data() + begin_;
      const void* nl = std::memchr(start, '\n', end_ - begin_);
      if (nl) {
        const auto len = static_cast<std::size_t>(static_cast<const char*>(nl) - start);
        begin_ += len + 1;
        ++line_no_;
        if (carry_.empty()) {
          line = std::string_view(start, len);
        } else {
          carry_.append(start, len);
          line = carry_;
          carry_used_ = true;
        }
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        return true;
      }
      carry_.append(start, end_ - begin_);
      begin_ = end_;
    }
    if (eof_) {
      if (carry_.empty()) return false;
      ++line_no_;
      line = carry_;
      carry_used_ = true;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      return true;
    }
    const std::size_t n = std::fread(buffer_.data(), 1, buffer_.size(), file_);
    begin_ = 0;
    end_ = n;
    if (n < buffer_.size()) eof_ = true;
  }
}

bool Reader::next_row() {
  std::string_view line;
  fields_.clear();
  do {
    if (!next_line(line)) return false;
  } while (line.empty());
  std::size_t pos = 0;
  for (;;) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      fields_.push_back(line.substr(pos));
      break;
    }
    fields_.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  if (fields_.size() != columns_.size()) {
    throw ParseError(path_.string() + ": line " + std::to_string(line_no_) + ": expected " +
                     std::to_string(columns_.size()) + " columns, got " + std::to_string(fields_.size()));
  }
  return true;
}

bool Reader::skip_row() {
  std::string_view line;
  do {
    if (!next_line(line)) return false;
  } while (line.empty());
  return true;
}

void Reader::fail(std::size_t col, const std::string& what) const {
  const std::string name = col < columns_.size() ? columns_[col] : std::to_string(col);
  throw ParseError(path_.string() + ": line " + std::to_string(line_no_) + ", column '" + name + "': " + what);
}

std::string_view Reader::text(std::size_t col) const {
  if (col >= fields_.size()) fail(col, "column out of range");
  return fields_[col];
}

double Reader::number(std::size_t col) const {
  const auto s = text(col);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    fail(col, "non-numeric value '" + std::string(s) + "'");
  return v;
}

std::int64_t Reader::integer(std::size_t col) const {
  const auto s = text(col);
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    fail(col, "non-integer value '" + std::string(s) + "'");
  return v;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const auto i = line.find(sep, pos);
    if (i == std::string_view::npos) {
      out.emplace_back(line.substr(pos));
      return out;
    }
    out.emplace_back(line.substr(pos, i - pos));
    pos = i + 1;
  }
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

std::uint64_t count_data_lines(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw ParseError(path.string() + ": missing or unreadable file");
  std::vector<char> buf(kBufferSize);
  std::uint64_t lines = 0;
  bool last_newline = true;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) {
    const char* p = buf.data();
    const char* end = p + n;
    while ((p = static_cast<const char*>(std::memchr(p, '\n', static_cast<std::size_t>(end - p))))) {
      ++lines;
      ++p;
    }
    last_newline = buf[n - 1] == '\n';
  }
  std::fclose(f);
  if (!last_newline) ++lines;
  return lines == 0 ? 0 : lines - 1;
}

}  // namespace bemlab::csv
