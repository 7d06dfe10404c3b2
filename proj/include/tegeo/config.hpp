#pragma once

// Sectioned key-value model files: reading, canonical writing and
// translation into a Model. See docs/config-format.md.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tegeo/verify.hpp"

namespace tegeo {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  /// 1-based source line, 0 when the problem is not tied to one line.
  int line() const { return line_; }

 private:
  int line_;
};

/// An expression string with its component indices and source line.
struct ExpressionEntry {
  std::vector<int> indices;
  std::string source;
  int line = 0;
};

struct ModelConfig {
  int dim = 0;
  std::vector<std::string> coordinates;
  std::vector<ExpressionEntry> guards;
  int metric_unit_power = 2;
  std::vector<ExpressionEntry> metric;  // upper triangle, indices (l, m) with l <= m
  std::string connection_kind = "levi-civita";
  std::vector<ExpressionEntry> connection;  // (l, nu, m) for linear, (l, nu) for general
  SampleSpec sampling;
  Tolerances tolerances;
  int line_dim = 0;
  int line_kind = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view text, int line, const std::string& what) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(line, "invalid " + what + ": '" + std::string(text) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string unquote(std::string_view v, int line) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"') {
    throw ConfigError(line, "expected a double-quoted expression");
  }
  const std::string_view inner = v.substr(1, v.size() - 2);
  if (inner.find('"') != std::string_view::npos) throw ConfigError(line, "stray quote in expression");
  if (trim(inner).empty()) throw ConfigError(line, "empty expression");
  return std::string(inner);
}

/// Parses "<prefix>_<i>_<j>..." into indices; returns false if the key
/// does not have the prefix.
inline bool index_key(std::string_view key, std::string_view prefix, std::vector<int>& indices, int line) {
  if (key.substr(0, prefix.size()) != prefix || key.size() <= prefix.size() || key[prefix.size()] != '_') {
    return false;
  }
  indices.clear();
  std::string_view rest = key.substr(prefix.size() + 1);
  while (true) {
    const auto us = rest.find('_');
    const std::string_view part = rest.substr(0, us);
    if (part.empty() || (part.size() > 1 && part[0] == '0')) throw ConfigError(line, "malformed index in key '" + std::string(key) + "'");
    indices.push_back(parse_number<int>(part, line, "index"));
    if (us == std::string_view::npos) break;
    rest = rest.substr(us + 1);
  }
  return true;
}

inline Interval parse_interval(std::string_view v, int line) {
  const auto parts = split_commas(v);
  if (parts.size() != 2) throw ConfigError(line, "interval needs two comma-separated bounds");
  Interval i{parse_number<double>(parts[0], line, "bound"), parse_number<double>(parts[1], line, "bound")};
  if (!(i.lo <= i.hi)) throw ConfigError(line, "interval lower bound exceeds upper bound");
  return i;
}

inline bool valid_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace detail

/// Reads a model file. Structural problems throw ConfigError with the line.
inline ModelConfig parse_config(std::string_view text) {
  using namespace detail;
  ModelConfig c;
  std::string section;
  std::vector<std::string> seen_sections;
  std::vector<std::string> seen_keys;
  std::vector<std::pair<int, Interval>> xs, vs;
  std::vector<int> xs_lines, vs_lines;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const std::vector<std::string> known{"chart", "metric", "connection", "sampling", "tolerances"};
      if (std::find(known.begin(), known.end(), section) == known.end()) {
        throw ConfigError(line_no, "unknown section [" + section + "]");
      }
      if (std::find(seen_sections.begin(), seen_sections.end(), section) != seen_sections.end()) {
        throw ConfigError(line_no, "duplicate section [" + section + "]");
      }
      seen_sections.push_back(section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    if (section.empty()) throw ConfigError(line_no, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    const std::string qualified = section + "." + key;
    if (key != "guard") {
      if (std::find(seen_keys.begin(), seen_keys.end(), qualified) != seen_keys.end()) {
        throw ConfigError(line_no, "duplicate key '" + key + "'");
      }
      seen_keys.push_back(qualified);
    }
    std::vector<int> idx;

    if (section == "chart") {
      if (key == "dim") {
        c.dim = parse_number<int>(value, line_no, "dimension");
        c.line_dim = line_no;
      } else if (key == "coordinates") {
        for (auto name : split_commas(value)) {
          if (!valid_name(name)) throw ConfigError(line_no, "invalid coordinate name '" + std::string(name) + "'");
          c.coordinates.emplace_back(name);
        }
      } else if (key == "guard") {
        c.guards.push_back({{}, unquote(value, line_no), line_no});
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [chart]");
      }
    } else if (section == "metric") {
      if (key == "unit_power") {
        c.metric_unit_power = parse_number<int>(value, line_no, "unit power");
      } else if (index_key(key, "g", idx, line_no)) {
        if (idx.size() != 2) throw ConfigError(line_no, "metric keys take two indices");
        if (idx[0] > idx[1]) throw ConfigError(line_no, "give the metric by its upper triangle (g_l_m with l <= m)");
        c.metric.push_back({idx, unquote(value, line_no), line_no});
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [metric]");
      }
    } else if (section == "connection") {
      if (key == "kind") {
        if (value != "levi-civita" && value != "linear" && value != "general") {
          throw ConfigError(line_no, "connection kind must be levi-civita, linear or general");
        }
        c.connection_kind = std::string(value);
        c.line_kind = line_no;
      } else if (index_key(key, "K", idx, line_no)) {
        c.connection.push_back({idx, unquote(value, line_no), line_no});
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [connection]");
      }
    } else if (section == "sampling") {
      if (key == "points") {
        c.sampling.points = parse_number<int>(value, line_no, "point count");
        if (c.sampling.points < 1) throw ConfigError(line_no, "point count must be >= 1");
      } else if (key == "seed") {
        c.sampling.seed = parse_number<std::uint64_t>(value, line_no, "seed");
      } else if (index_key(key, "x", idx, line_no) && idx.size() == 1) {
        xs.emplace_back(idx[0], parse_interval(value, line_no));
        xs_lines.push_back(line_no);
      } else if (index_key(key, "v", idx, line_no) && idx.size() == 1) {
        vs.emplace_back(idx[0], parse_interval(value, line_no));
        vs_lines.push_back(line_no);
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [sampling]");
      }
    } else if (section == "tolerances") {
      Tolerances& t = c.tolerances;
      double* target = key == "residual"            ? &t.residual
                       : key == "nondegeneracy"     ? &t.nondegeneracy
                       : key == "fd_step"           ? &t.fd_step
                       : key == "fd_relative"       ? &t.fd_relative
                       : key == "fd_pass_fraction"  ? &t.fd_pass_fraction
                       : key == "max_skip_fraction" ? &t.max_skip_fraction
                                                    : nullptr;
      if (!target) throw ConfigError(line_no, "unknown key '" + key + "' in [tolerances]");
      *target = parse_number<double>(value, line_no, key);
      if (!(*target > 0.0)) throw ConfigError(line_no, key + " must be positive");
    }
  }

  if (c.line_dim == 0) throw ConfigError(0, "missing [chart] dim");
  if (c.dim < 3) throw ConfigError(c.line_dim, "chart dimension must be >= 3");
  if (!c.coordinates.empty() && static_cast<int>(c.coordinates.size()) != c.dim) {
    throw ConfigError(c.line_dim, "coordinates must list one name per dimension");
  }
  auto boxes = [&](std::vector<std::pair<int, Interval>>& in, const std::vector<int>& lines,
                   std::vector<Interval>& out, const char* what) {
    if (in.empty()) return;
    out.assign(static_cast<std::size_t>(c.dim), Interval{});
    std::vector<bool> got(static_cast<std::size_t>(c.dim), false);
    for (std::size_t i = 0; i < in.size(); ++i) {
      const int k = in[i].first;
      if (k < 0 || k >= c.dim) throw ConfigError(lines[i], std::string(what) + " index out of range");
      out[static_cast<std::size_t>(k)] = in[i].second;
      got[static_cast<std::size_t>(k)] = true;
    }
    if (std::find(got.begin(), got.end(), false) != got.end()) {
      throw ConfigError(lines.front(), std::string("give a ") + what + " interval for every coordinate or none");
    }
  };
  boxes(xs, xs_lines, c.sampling.base_box, "x");
  boxes(vs, vs_lines, c.sampling.velocity_box, "v");

  auto by_index = [](const ExpressionEntry& a, const ExpressionEntry& b) { return a.indices < b.indices; };
  std::stable_sort(c.metric.begin(), c.metric.end(), by_index);
  std::stable_sort(c.connection.begin(), c.connection.end(), by_index);
  return c;
}

/// Canonical text of a model: fixed section and key order, expressions
/// quoted verbatim, numbers in shortest round-trip form.
inline std::string emit_config(const ModelConfig& c) {
  using detail::format_double;
  std::ostringstream o;
  auto join = [](const std::vector<int>& idx) {
    std::string s;
    for (int i : idx) s += "_" + std::to_string(i);
    return s;
  };
  o << "# tegeo model\n";
  o << "[chart]\n";
  o << "dim = " << c.dim << "\n";
  if (!c.coordinates.empty()) {
    o << "coordinates = ";
    for (std::size_t i = 0; i < c.coordinates.size(); ++i) o << (i ? ", " : "") << c.coordinates[i];
    o << "\n";
  }
  for (const auto& g : c.guards) o << "guard = \"" << g.source << "\"\n";
  o << "\n[metric]\n";
  o << "unit_power = " << c.metric_unit_power << "\n";
  for (const auto& e : c.metric) o << "g" << join(e.indices) << " = \"" << e.source << "\"\n";
  o << "\n[connection]\n";
  o << "kind = " << c.connection_kind << "\n";
  for (const auto& e : c.connection) o << "K" << join(e.indices) << " = \"" << e.source << "\"\n";
  o << "\n[sampling]\n";
  o << "points = " << c.sampling.points << "\n";
  o << "seed = " << c.sampling.seed << "\n";
  for (std::size_t i = 0; i < c.sampling.base_box.size(); ++i) {
    o << "x_" << i << " = " << format_double(c.sampling.base_box[i].lo) << ", "
      << format_double(c.sampling.base_box[i].hi) << "\n";
  }
  for (std::size_t i = 0; i < c.sampling.velocity_box.size(); ++i) {
    o << "v_" << i << " = " << format_double(c.sampling.velocity_box[i].lo) << ", "
      << format_double(c.sampling.velocity_box[i].hi) << "\n";
  }
  const Tolerances& t = c.tolerances;
  o << "\n[tolerances]\n";
  o << "residual = " << format_double(t.residual) << "\n";
  o << "nondegeneracy = " << format_double(t.nondegeneracy) << "\n";
  o << "fd_step = " << format_double(t.fd_step) << "\n";
  o << "fd_relative = " << format_double(t.fd_relative) << "\n";
  o << "fd_pass_fraction = " << format_double(t.fd_pass_fraction) << "\n";
  o << "max_skip_fraction = " << format_double(t.max_skip_fraction) << "\n";
  return o.str();
}

namespace detail {

inline Expression parse_entry(const ExpressionEntry& e, int dim) {
  try {
    return parse(e.source, dim);
  } catch (const ParseError& err) {
    throw ConfigError(e.line, std::string(err.what()) + " in \"" + e.source + "\"");
  }
}

inline void check_range(const ExpressionEntry& e, int dim, std::size_t arity, const char* what) {
  if (e.indices.size() != arity) {
    throw ConfigError(e.line, std::string(what) + " keys take " + std::to_string(arity) + " indices");
  }
  for (int i : e.indices) {
    if (i < 0 || i >= dim) throw ConfigError(e.line, std::string(what) + " index out of range");
  }
}

}  // namespace detail

/// Builds the chart, metric and connection. Expressions that do not parse
/// or violate a field invariant throw ConfigError with the source line.
inline Model build_model(const ModelConfig& c) {
  using detail::parse_entry;
  const int n = c.dim;
  try {
    std::vector<Expression> guards;
    for (const auto& g : c.guards) {
      Expression e = parse_entry(g, n);
      if (e.uses_velocity()) throw ConfigError(g.line, "guards may only depend on coordinates");
      guards.push_back(std::move(e));
    }
    Chart chart(n, c.coordinates, guards);

    std::vector<Expression> g(static_cast<std::size_t>(n * n), Expression(0.0, n));
    for (const auto& e : c.metric) {
      detail::check_range(e, n, 2, "metric");
      Expression ex = parse_entry(e, n);
      if (ex.uses_velocity()) throw ConfigError(e.line, "metric components may not use velocity symbols");
      g[static_cast<std::size_t>(e.indices[0] * n + e.indices[1])] = ex;
      g[static_cast<std::size_t>(e.indices[1] * n + e.indices[0])] = ex;
    }
    MetricField metric(n, std::move(g), c.metric_unit_power);

    auto connection = [&]() -> ConnectionField {
      if (c.connection_kind == "levi-civita") {
        if (!c.connection.empty()) {
          throw ConfigError(c.connection.front().line, "a levi-civita connection takes no coefficients");
        }
        return levi_civita(metric);
      }
      const bool linear = c.connection_kind == "linear";
      const std::size_t arity = linear ? 3 : 2;
      std::vector<Expression> k(linear ? static_cast<std::size_t>(n * n * n) : static_cast<std::size_t>(n * n),
                                Expression(0.0, n));
      for (const auto& e : c.connection) {
        detail::check_range(e, n, arity, linear ? "linear connection" : "general connection");
        Expression ex = parse_entry(e, n);
        if (linear && ex.uses_velocity()) {
          throw ConfigError(e.line, "linear connection coefficients may not use velocity symbols");
        }
        std::size_t flat = 0;
        for (int i : e.indices) flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
        k[flat] = std::move(ex);
      }
      if (linear) return LinearConnection(n, std::move(k));
      return GeneralConnection(n, std::move(k));
    }();
    return {std::move(chart), std::move(metric), std::move(connection)};
  } catch (const FieldError& e) {
    throw ConfigError(0, e.what());
  }
}

}  // namespace tegeo
