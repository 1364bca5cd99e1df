#pragma once

#include <stdexcept>
#include <string>

namespace hop {

enum class errc {
  invalid_dimension,
  invalid_value,
  insufficient_data,
  dimension_mismatch,
  domain_error,
  parameter_error,
  size_error,
  numeric_error,
  parse_error,
  io_error,
  key_mismatch,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_dimension: return "E_DIMENSION";
    case errc::invalid_value: return "E_VALUE";
    case errc::insufficient_data: return "E_INSUFFICIENT_DATA";
    case errc::dimension_mismatch: return "E_DIM_MISMATCH";
    case errc::domain_error: return "E_DOMAIN";
    case errc::parameter_error: return "E_PARAMETER";
    case errc::size_error: return "E_SIZE";
    case errc::numeric_error: return "E_NUMERIC";
    case errc::parse_error: return "E_PARSE";
    case errc::io_error: return "E_IO";
    case errc::key_mismatch: return "E_KEY_MISMATCH";
  }
  return "E_UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  errc code() const { return code_; }
  const char* code_name() const { return errc_name(code_); }

 private:
  errc code_;
};

class InsufficientDataError : public Error {
 public:
  InsufficientDataError(long long required, const std::string& msg)
      : Error(errc::insufficient_data, msg), required_min(required) {}
  long long required_min;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& msg)
      : Error(errc::parse_error, msg), line(line), column(column) {}
  int line;
  int column;
};

}  // namespace hop
