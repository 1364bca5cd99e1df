#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hop/error.hpp"
#include "hop/power.hpp"
#include "hop/spatial.hpp"

namespace hop {

enum class ReportFormat { table, json, csv };

inline ReportFormat report_format_from_name(const std::string& name) {
  if (name == "table") return ReportFormat::table;
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  throw Error(errc::parameter_error, "unknown format: " + name);
}

// ---------------------------------------------------------------------------
// Grid files: two header lines, then |T| whitespace/comma-separated values in
// row-major order (last axis fastest).
//
//   dims: 21,21
//   kind: continuous
//   0.13 -1.2 ...

namespace detail {

inline std::vector<int> parse_int_list(const std::string& text, int line_no) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(tok, &pos);
      while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
      if (pos != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ParseError(line_no, 1, "expected integer list, got '" + text + "'");
    }
  }
  return out;
}

}  // namespace detail

inline GridData load_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line) || line.rfind("dims:", 0) != 0)
    throw ParseError(1, 1, "expected header line 'dims: e1,e2[,e3]'");
  const std::vector<int> extents = detail::parse_int_list(line.substr(5), 1);
  if (extents.size() != 2 && extents.size() != 3)
    throw ParseError(1, 1, "dims must list 2 or 3 extents");
  GridData grid;
  grid.dims = extents.size() == 2 ? GridDims::d2(extents[0], extents[1])
                                  : GridDims::d3(extents[0], extents[1], extents[2]);

  if (!std::getline(in, line) || line.rfind("kind:", 0) != 0)
    throw ParseError(2, 1, "expected header line 'kind: continuous|integer'");
  std::string kind = line.substr(5);
  kind.erase(0, kind.find_first_not_of(" \t"));
  kind.erase(kind.find_last_not_of(" \t\r") + 1);
  if (kind == "continuous")
    grid.kind = ValueKind::continuous;
  else if (kind == "integer")
    grid.kind = ValueKind::integer;
  else
    throw ParseError(2, 1, "kind must be 'continuous' or 'integer', got '" + kind + "'");

  const std::int64_t expected = grid.dims.cardinality();
  grid.values.reserve(static_cast<std::size_t>(expected));
  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t col = 0;
    while (col < line.size()) {
      while (col < line.size() &&
             (std::isspace(static_cast<unsigned char>(line[col])) || line[col] == ','))
        ++col;
      if (col >= line.size()) break;
      const std::size_t start = col;
      while (col < line.size() &&
             !std::isspace(static_cast<unsigned char>(line[col])) && line[col] != ',')
        ++col;
      const std::string tok = line.substr(start, col - start);
      try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        if (!std::isfinite(v)) throw std::invalid_argument(tok);
        grid.values.push_back(v);
      } catch (const std::exception&) {
        throw ParseError(line_no, static_cast<int>(start + 1),
                         "non-numeric token '" + tok + "'");
      }
    }
  }
  if (static_cast<std::int64_t>(grid.values.size()) != expected)
    throw ParseError(line_no, 1,
                     "expected " + std::to_string(expected) + " values, found " +
                         std::to_string(grid.values.size()));
  return grid;
}

inline void save_grid(const GridData& grid, const std::filesystem::path& path) {
  grid.validate();
  std::ofstream out(path);
  if (!out) throw Error(errc::io_error, "cannot write " + path.string());
  out << "dims: ";
  for (int i = 0; i < grid.dims.k; ++i) out << (i ? "," : "") << grid.dims.ext[i];
  out << "\nkind: "
      << (grid.kind == ValueKind::integer ? "integer" : "continuous") << "\n";
  const int per_line = grid.dims.k == 2 ? grid.dims.ext[1] : grid.dims.ext[2];
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    if (grid.kind == ValueKind::integer) {
      out << static_cast<long long>(grid.values[i]);
    } else {
      char buf[32];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), grid.values[i]);
      out.write(buf, ptr - buf);
    }
    out << ((static_cast<int>(i) % per_line == per_line - 1) ? '\n' : ' ');
  }
}

// ---------------------------------------------------------------------------
// PPM (P3/P6, maxval 255) to RGB frequency cube: each pixel's channels are
// quantized to `bits` by floor division, and the cube counts pixels per
// quantized color.

namespace detail {

inline int ppm_next_int(std::istream& in, const char* what) {
  // skips whitespace and '#' comments
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v;
  if (!(in >> v)) throw Error(errc::parse_error, std::string("ppm: missing ") + what);
  return v;
}

}  // namespace detail

inline GridData ppm_to_rgb_cube(const std::filesystem::path& path, int bits) {
  if (bits < 1 || bits > 8)
    throw Error(errc::parameter_error, "rgb cube bits must be in 1..8");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());

  std::string magic;
  in >> magic;
  if (magic != "P3" && magic != "P6")
    throw Error(errc::parse_error, "ppm: unsupported magic '" + magic + "'");
  const int width = detail::ppm_next_int(in, "width");
  const int height = detail::ppm_next_int(in, "height");
  const int maxval = detail::ppm_next_int(in, "maxval");
  if (width < 1 || height < 1)
    throw Error(errc::parse_error, "ppm: bad dimensions");
  if (maxval != 255) throw Error(errc::parse_error, "ppm: maxval must be 255");

  const int side = 1 << bits;
  const int shift = 8 - bits;
  GridData cube;
  cube.dims = GridDims::d3(side, side, side);
  cube.kind = ValueKind::integer;
  cube.values.assign(static_cast<std::size_t>(cube.dims.cardinality()), 0.0);

  const std::int64_t pixels = static_cast<std::int64_t>(width) * height;
  if (magic == "P6") in.get();  // single whitespace after maxval
  for (std::int64_t p = 0; p < pixels; ++p) {
    int rgb[3];
    if (magic == "P3") {
      for (int& c : rgb) c = detail::ppm_next_int(in, "pixel value");
    } else {
      unsigned char buf[3];
      in.read(reinterpret_cast<char*>(buf), 3);
      if (!in) throw Error(errc::parse_error, "ppm: truncated pixel data");
      for (int i = 0; i < 3; ++i) rgb[i] = buf[i];
    }
    for (int c : rgb)
      if (c < 0 || c > 255) throw Error(errc::parse_error, "ppm: pixel out of range");
    const std::array<int, 3> cell = {rgb[0] >> shift, rgb[1] >> shift, rgb[2] >> shift};
    cube.values[static_cast<std::size_t>(linear_index(cell, cube.dims))] += 1.0;
  }
  return cube;
}

// ---------------------------------------------------------------------------
// Report emission. The table format mirrors the per-delay blocks of the HOP
// reports in print; JSON carries full precision and a stable schema.

namespace detail {

inline std::string fixed3(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  std::string s = os.str();
  if (s == "-0.000") s = "0.000";
  return s;
}

// shortest decimal string that round-trips to the same double
inline std::string shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline nlohmann::json to_json(const HopReport& r) {
  nlohmann::json j;
  j["type"] = "hop_report";
  j["curve"] = r.curve_tag;
  j["seed"] = r.seed;
  j["kind"] = r.kind == ValueKind::integer ? "integer" : "continuous";
  j["dims"] = nlohmann::json::array();
  for (int i = 0; i < r.dims.k; ++i) j["dims"].push_back(r.dims.ext[i]);
  j["delays"] = nlohmann::json::array();
  for (const auto& dr : r.delays) {
    nlohmann::json d;
    d["d"] = dr.d;
    d["ok"] = dr.ok;
    if (!dr.ok) {
      d["error"] = dr.error;
    } else {
      d["n"] = dr.n;
      d["freq"] = dr.freq.p;
      d["tests"] = nlohmann::json::array();
      for (const auto& t : dr.tests) {
        nlohmann::json tj;
        tj["name"] = statistic_name(t.stat);
        tj["raw"] = t.raw;
        tj["scaled"] = t.scaled;
        tj["pvalue"] = t.pvalue;
        if (t.null_dist == TestResult::Null::quadratic_form) {
          tj["null"] = "qf";
        } else {
          tj["null"] = "normal";
          tj["var"] = t.null_var;
        }
        d["tests"].push_back(tj);
      }
    }
    j["delays"].push_back(d);
  }
  return j;
}

inline nlohmann::json to_json(const SopResult& r) {
  return nlohmann::json{{"type", "sop_result"},
                        {"tau_tilde", r.tau_tilde},
                        {"pvalue", r.pvalue},
                        {"n_squares", r.n_squares},
                        {"mc_reps", r.mc_reps}};
}

inline nlohmann::json to_json(const SacfResult& r) {
  return nlohmann::json{
      {"type", "sacf_result"}, {"rho", r.rho}, {"pvalue", r.pvalue}, {"lag", r.lag}};
}

inline nlohmann::json to_json(const PowerTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [key, cell] : t.cells)
    rows.push_back({{"test", test_id_name(key.test)},
                    {"delay", key.delay},
                    {"rate", cell.rate},
                    {"se", cell.se},
                    {"reps", cell.reps}});
  nlohmann::json j;
  j["type"] = "power_table";
  j["rows"] = rows;
  j["failed_replications"] = t.errors.size();
  return j;
}

// Checks the documented hop_report schema; used by tests and by consumers of
// the JSON output.
inline bool validate_report_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) return false;
  const std::string type = j["type"];
  if (type == "hop_report") {
    if (!j.contains("dims") || !j["dims"].is_array()) return false;
    if (!j.contains("curve") || !j["curve"].is_string()) return false;
    if (!j.contains("delays") || !j["delays"].is_array()) return false;
    for (const auto& d : j["delays"]) {
      if (!d.is_object() || !d.contains("d") || !d.contains("ok")) return false;
      if (d["ok"].get<bool>()) {
        if (!d.contains("freq") || !d["freq"].is_array() || d["freq"].size() != 6)
          return false;
        if (!d.contains("tests") || !d["tests"].is_array() || d["tests"].size() != 7)
          return false;
        for (const auto& t : d["tests"])
          if (!t.contains("name") || !t.contains("raw") || !t.contains("scaled") ||
              !t.contains("pvalue") || !t.contains("null"))
            return false;
      } else if (!d.contains("error")) {
        return false;
      }
    }
    return true;
  }
  if (type == "sop_result")
    return j.contains("tau_tilde") && j.contains("pvalue") && j.contains("n_squares");
  if (type == "sacf_result")
    return j.contains("rho") && j.contains("pvalue") && j.contains("lag");
  if (type == "power_table") return j.contains("rows") && j["rows"].is_array();
  return false;
}

inline std::string emit_report(const HopReport& r, ReportFormat format) {
  if (format == ReportFormat::json) return to_json(r).dump(2) + "\n";
  std::ostringstream os;
  if (format == ReportFormat::csv) {
    os << "delay,n,name,raw,scaled,pvalue\n";
    for (const auto& dr : r.delays) {
      if (!dr.ok) {
        os << dr.d << ",,error,\"" << dr.error << "\",,\n";
        continue;
      }
      for (const auto& t : dr.tests)
        os << dr.d << ',' << dr.n << ',' << statistic_name(t.stat) << ','
           << detail::shortest(t.raw) << ',' << detail::shortest(t.scaled) << ','
           << detail::shortest(t.pvalue) << '\n';
    }
    return os.str();
  }

  os << "HOP report (" << r.curve_tag << " curve), dims ";
  for (int i = 0; i < r.dims.k; ++i) os << (i ? "x" : "") << r.dims.ext[i];
  os << ", |T| = " << r.dims.cardinality() << ", kind "
     << (r.kind == ValueKind::integer ? "integer" : "continuous") << ", seed " << r.seed
     << "\n";
  for (const auto& dr : r.delays) {
    os << "\nd=" << dr.d;
    if (!dr.ok) {
      os << "  error: " << dr.error << "\n";
      continue;
    }
    os << "  p^ = (";
    for (int i = 0; i < 6; ++i) os << (i ? ", " : "") << detail::fixed3(dr.freq.p[i]);
    os << ")  n = " << dr.n << "\n";
    for (const auto& t : dr.tests) os << std::setw(9) << statistic_name(t.stat);
    os << "\n";
    for (const auto& t : dr.tests) os << std::setw(9) << detail::fixed3(t.raw);
    os << "\n";
    for (const auto& t : dr.tests)
      os << std::setw(9) << ("(" + detail::fixed3(t.pvalue) + ")");
    os << "\n";
  }
  return os.str();
}

inline std::string emit_report(const SopResult& r, ReportFormat format) {
  if (format == ReportFormat::json) return to_json(r).dump(2) + "\n";
  std::ostringstream os;
  if (format == ReportFormat::csv) {
    os << "statistic,value,pvalue,n_squares,mc_reps\n";
    os << "sop_tau," << detail::shortest(r.tau_tilde) << ',' << detail::shortest(r.pvalue)
       << ',' << r.n_squares << ',' << r.mc_reps << '\n';
    return os.str();
  }
  os << "SOP tau~ = " << detail::fixed3(r.tau_tilde) << "  (" << detail::fixed3(r.pvalue)
     << ")  [" << r.n_squares << " squares, " << r.mc_reps << " null draws]\n";
  return os.str();
}

inline std::string emit_report(const SacfResult& r, ReportFormat format) {
  if (format == ReportFormat::json) return to_json(r).dump(2) + "\n";
  std::ostringstream os;
  if (format == ReportFormat::csv) {
    os << "statistic,value,pvalue,lag\n";
    os << "sacf," << detail::shortest(r.rho) << ',' << detail::shortest(r.pvalue) << ",\"";
    for (std::size_t i = 0; i < r.lag.size(); ++i) os << (i ? "," : "") << r.lag[i];
    os << "\"\n";
    return os.str();
  }
  os << "SACF rho(1) = " << detail::fixed3(r.rho) << "  (" << detail::fixed3(r.pvalue)
     << ")\n";
  return os.str();
}

inline std::string emit_report(const PowerTable& t, ReportFormat format) {
  if (format == ReportFormat::json) return to_json(t).dump(2) + "\n";
  std::ostringstream os;
  if (format == ReportFormat::csv) {
    os << "test,delay,rate,se,reps\n";
    for (const auto& [key, cell] : t.cells)
      os << test_id_name(key.test) << ',' << key.delay << ',' << detail::shortest(cell.rate)
         << ',' << detail::shortest(cell.se) << ',' << cell.reps << '\n';
    return os.str();
  }
  os << std::setw(9) << "test" << std::setw(7) << "delay" << std::setw(8) << "rate"
     << std::setw(9) << "se" << std::setw(7) << "reps" << "\n";
  for (const auto& [key, cell] : t.cells) {
    std::ostringstream se;
    se << std::fixed << std::setprecision(4) << cell.se;
    os << std::setw(9) << test_id_name(key.test) << std::setw(7) << key.delay
       << std::setw(8) << detail::fixed3(cell.rate) << std::setw(9) << se.str()
       << std::setw(7) << cell.reps << "\n";
  }
  if (!t.errors.empty()) os << t.errors.size() << " replications failed\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Study files: a small strict TOML subset ([sections], key = value, numbers,
// strings, booleans, flat arrays, # comments).

namespace detail {

struct TomlValue {
  std::variant<double, bool, std::string, std::vector<double>, std::vector<std::string>>
      v;
  int line = 0;
};

inline std::string toml_trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline TomlValue toml_parse_scalar(const std::string& raw, int line) {
  const std::string t = toml_trim(raw);
  if (t.empty()) throw ParseError(line, 1, "empty value");
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"')
      throw ParseError(line, 1, "unterminated string");
    return {t.substr(1, t.size() - 2), line};
  }
  if (t == "true") return {true, line};
  if (t == "false") return {false, line};
  try {
    std::size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(t);
    return {v, line};
  } catch (const std::exception&) {
    throw ParseError(line, 1, "cannot parse value '" + t + "'");
  }
}

inline TomlValue toml_parse_value(const std::string& raw, int line) {
  const std::string t = toml_trim(raw);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') throw ParseError(line, 1, "unterminated array");
    const std::string inner = t.substr(1, t.size() - 2);
    std::vector<double> nums;
    std::vector<std::string> strs;
    bool has_str = false, has_num = false;
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (toml_trim(item).empty()) continue;
      TomlValue sv = toml_parse_scalar(item, line);
      if (std::holds_alternative<std::string>(sv.v)) {
        strs.push_back(std::get<std::string>(sv.v));
        has_str = true;
      } else if (std::holds_alternative<double>(sv.v)) {
        nums.push_back(std::get<double>(sv.v));
        has_num = true;
      } else {
        throw ParseError(line, 1, "array elements must be numbers or strings");
      }
    }
    if (has_str && has_num)
      throw ParseError(line, 1, "mixed array element types");
    if (has_str) return {strs, line};
    return {nums, line};
  }
  return toml_parse_scalar(t, line);
}

inline std::map<std::string, TomlValue> toml_parse(std::istream& in) {
  std::map<std::string, TomlValue> out;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // strip comments outside strings
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_str = !in_str;
      if (line[i] == '#' && !in_str) {
        line = line.substr(0, i);
        break;
      }
    }
    const std::string t = toml_trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError(line_no, 1, "unterminated section header");
      section = toml_trim(t.substr(1, t.size() - 2));
      if (section.empty()) throw ParseError(line_no, 1, "empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, 1, "expected key = value");
    const std::string key = toml_trim(t.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, 1, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (out.count(full)) throw ParseError(line_no, 1, "duplicate key " + full);
    out[full] = toml_parse_value(t.substr(eq + 1), line_no);
  }
  return out;
}

}  // namespace detail

// Parses a declarative study file into a StudySpec.
inline StudySpec load_study(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());
  auto kv = detail::toml_parse(in);

  auto take = [&](const std::string& key) -> const detail::TomlValue* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto need = [&](const std::string& key) -> const detail::TomlValue& {
    auto* v = take(key);
    if (!v) throw Error(errc::parse_error, path.string() + ": missing key " + key);
    return *v;
  };
  auto as_num = [&](const detail::TomlValue& v, const std::string& key) {
    if (!std::holds_alternative<double>(v.v))
      throw ParseError(v.line, 1, key + " must be a number");
    return std::get<double>(v.v);
  };
  auto as_str = [&](const detail::TomlValue& v, const std::string& key) {
    if (!std::holds_alternative<std::string>(v.v))
      throw ParseError(v.line, 1, key + " must be a string");
    return std::get<std::string>(v.v);
  };
  auto as_nums = [&](const detail::TomlValue& v, const std::string& key) {
    if (!std::holds_alternative<std::vector<double>>(v.v))
      throw ParseError(v.line, 1, key + " must be an array of numbers");
    return std::get<std::vector<double>>(v.v);
  };

  StudySpec spec;
  spec.dgp.family = dgp_family_from_name(as_str(need("dgp.family"), "dgp.family"));
  const auto extents = as_nums(need("dgp.extents"), "dgp.extents");
  if (extents.size() == 2)
    spec.dgp.dims = GridDims::d2(static_cast<int>(extents[0]), static_cast<int>(extents[1]));
  else if (extents.size() == 3)
    spec.dgp.dims = GridDims::d3(static_cast<int>(extents[0]), static_cast<int>(extents[1]),
                                 static_cast<int>(extents[2]));
  else
    throw Error(errc::parse_error, "dgp.extents must have 2 or 3 entries");

  if (auto* v = take("dgp.coeffs")) spec.dgp.coeffs = as_nums(*v, "dgp.coeffs");
  if (auto* v = take("dgp.exponents")) {
    for (double e : as_nums(*v, "dgp.exponents"))
      spec.dgp.exponents.push_back(static_cast<int>(e));
  }
  if (auto* v = take("dgp.lambda")) spec.dgp.lambda = as_num(*v, "dgp.lambda");
  if (auto* v = take("dgp.burn")) spec.dgp.burn = static_cast<int>(as_num(*v, "dgp.burn"));
  if (auto* v = take("dgp.margin"))
    spec.dgp.margin = static_cast<int>(as_num(*v, "dgp.margin"));
  if (auto* v = take("dgp.grf_cap"))
    spec.dgp.grf_cap = static_cast<std::size_t>(as_num(*v, "dgp.grf_cap"));
  const auto* frac = take("dgp.ao_fraction");
  const auto* mag = take("dgp.ao_magnitude");
  if (frac || mag) {
    if (!frac || !mag)
      throw Error(errc::parse_error, "ao_fraction and ao_magnitude must come together");
    spec.dgp.contamination =
        Contamination{as_num(*frac, "dgp.ao_fraction"), as_num(*mag, "dgp.ao_magnitude")};
  }

  const auto& tests = need("study.tests");
  if (!std::holds_alternative<std::vector<std::string>>(tests.v))
    throw ParseError(tests.line, 1, "study.tests must be an array of strings");
  for (const auto& name : std::get<std::vector<std::string>>(tests.v))
    spec.tests.push_back(test_id_from_name(name));

  if (auto* v = take("study.delays"))
    for (double d : as_nums(*v, "study.delays")) spec.delays.push_back(static_cast<int>(d));
  if (auto* v = take("study.level")) spec.level = as_num(*v, "study.level");
  if (auto* v = take("study.reps")) spec.reps = static_cast<int>(as_num(*v, "study.reps"));
  if (auto* v = take("study.seed"))
    spec.master_seed = static_cast<std::uint64_t>(as_num(*v, "study.seed"));
  if (auto* v = take("study.sop_mc_reps"))
    spec.sop_mc_reps = static_cast<int>(as_num(*v, "study.sop_mc_reps"));

  static const std::vector<std::string> known = {
      "dgp.family", "dgp.extents", "dgp.coeffs", "dgp.exponents", "dgp.lambda",
      "dgp.burn", "dgp.margin", "dgp.grf_cap", "dgp.ao_fraction", "dgp.ao_magnitude",
      "study.tests", "study.delays", "study.level", "study.reps", "study.seed",
      "study.sop_mc_reps"};
  for (const auto& [key, val] : kv)
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ParseError(val.line, 1, "unknown key " + key);

  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// Shipped reference rows for the appendix power tables (gilbert columns).

struct ReferenceRow {
  std::string table;  // e.g. "A.1"
  std::string dgp;    // e.g. "2D-1.2"
  std::array<int, 3> n{};  // paper grid label (n1, n2[, n3]); n3 = 0 in 2D
  int delay = 0;
  std::string stat;  // "H" or "tau"
  double power = 0.0;
};

inline std::vector<ReferenceRow> load_reference_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());
  std::vector<ReferenceRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.rfind("table,", 0) == 0) continue;
    std::stringstream ss(line);
    std::string tok;
    ReferenceRow r;
    try {
      std::getline(ss, r.table, ',');
      std::getline(ss, r.dgp, ',');
      std::getline(ss, tok, ',');
      r.n[0] = std::stoi(tok);
      std::getline(ss, tok, ',');
      r.n[1] = std::stoi(tok);
      std::getline(ss, tok, ',');
      r.n[2] = tok.empty() ? 0 : std::stoi(tok);
      std::getline(ss, tok, ',');
      r.delay = std::stoi(tok);
      std::getline(ss, r.stat, ',');
      std::getline(ss, tok, ',');
      r.power = std::stod(tok);
    } catch (const std::exception&) {
      throw ParseError(line_no, 1, "bad reference row: " + line);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace hop
