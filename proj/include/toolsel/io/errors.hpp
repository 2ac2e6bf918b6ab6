#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "toolsel/core/error.hpp"

namespace toolsel::io {

class HeaderMismatch : public FormatError {
 public:
  HeaderMismatch(std::size_t column, std::string expected, std::string found);
  std::size_t column() const { return column_; }
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::size_t column_;
  std::string expected_;
  std::string found_;
};

class ValueOutOfRange : public FormatError {
 public:
  ValueOutOfRange(std::size_t line, std::string column, std::string value);
  std::size_t line() const { return line_; }
  const std::string& column() const { return column_; }
  const std::string& value() const { return value_; }

 private:
  std::size_t line_;
  std::string column_;
  std::string value_;
};

class TruncatedFile : public FormatError {
 public:
  TruncatedFile(const std::string& path, std::uint64_t expected_bytes, std::uint64_t actual_bytes);
  std::uint64_t expected_bytes() const { return expected_; }
  std::uint64_t actual_bytes() const { return actual_; }

 private:
  std::uint64_t expected_;
  std::uint64_t actual_;
};

class UnknownItem : public FormatError {
 public:
  UnknownItem(const std::string& context, std::uint64_t item_id);
  std::uint64_t item_id() const { return item_id_; }

 private:
  std::uint64_t item_id_;
};

class ShapeError : public FormatError {
 public:
  ShapeError(std::size_t layer, const std::string& detail);
  std::size_t layer() const { return layer_; }

 private:
  std::size_t layer_;
};

}  // namespace toolsel::io
