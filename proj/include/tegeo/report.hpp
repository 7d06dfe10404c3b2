#pragma once

// Human-readable and machine-readable serialization of verification
// reports. See docs/report-schema.md.

#include <openssl/evp.h>

#include "json.hpp"

#include <array>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tegeo/verify.hpp"

namespace tegeo {

inline constexpr std::string_view kReportSchema = "tegeo-report/1";

/// Git blob object id: SHA-1 of "blob <size>\0" followed by the content.
inline std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest.data(), &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

namespace detail {

inline nlohmann::ordered_json point_json(const TangentPoint& p) {
  return nlohmann::ordered_json{{"x", p.x}, {"v", p.xdot}};
}

inline const char* comparison_name(Comparison c) { return c == Comparison::Below ? "below" : "above"; }

}  // namespace detail

/// Machine-readable report. Keys appear in a fixed order.
inline nlohmann::ordered_json report_json(const Report& r, const std::string& config_hash) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = kReportSchema;
  j["config_sha1"] = config_hash;
  ordered_json meta;
  meta["dim"] = r.dim;
  meta["coordinates"] = r.coordinates;
  meta["connection_kind"] = r.connection_kind;
  meta["seed"] = r.spec.seed;
  meta["points_requested"] = r.spec.points;
  meta["points_evaluated"] = r.points_evaluated;
  meta["points_skipped"] = r.skipped.size();
  meta["valid"] = r.valid;
  meta["tolerances"] = ordered_json{{"residual", r.tolerances.residual},
                                    {"nondegeneracy", r.tolerances.nondegeneracy},
                                    {"fd_step", r.tolerances.fd_step},
                                    {"fd_relative", r.tolerances.fd_relative},
                                    {"fd_pass_fraction", r.tolerances.fd_pass_fraction},
                                    {"max_skip_fraction", r.tolerances.max_skip_fraction}};
  j["metadata"] = meta;

  ordered_json sections = ordered_json::array();
  for (const auto& s : r.sections) {
    ordered_json checks = ordered_json::array();
    for (const auto& c : s.checks) {
      ordered_json cj;
      cj["name"] = c.name;
      cj["value"] = c.value;
      cj["tolerance"] = c.tolerance;
      cj["comparison"] = detail::comparison_name(c.comparison);
      cj["pass"] = c.pass;
      cj["unit_power"] = c.unit_power;
      cj["worst_point"] = c.worst_point ? detail::point_json(*c.worst_point) : ordered_json(nullptr);
      checks.push_back(cj);
    }
    sections.push_back(ordered_json{{"name", s.name}, {"pass", s.pass}, {"skipped", s.skipped}, {"checks", checks}});
  }
  j["sections"] = sections;

  ordered_json verdicts = ordered_json::array();
  for (const auto& v : r.verdicts) {
    ordered_json members = ordered_json::array();
    for (const auto& m : v.members) members.push_back(ordered_json{{"name", m.name}, {"holds", m.holds}});
    verdicts.push_back(ordered_json{{"id", v.id}, {"members", members}, {"consistent", v.consistent}});
  }
  j["verdicts"] = verdicts;

  ordered_json skipped = ordered_json::array();
  for (const auto& s : r.skipped) {
    skipped.push_back(ordered_json{{"index", s.index}, {"point", detail::point_json(s.point)}, {"reason", s.reason}});
  }
  j["skipped"] = skipped;
  j["notes"] = r.notes;
  j["outcome"] = r.outcome();
  j["exit_code"] = r.exit_code();
  return j;
}

inline std::string report_machine(const Report& r, const std::string& config_hash) {
  return report_json(r, config_hash).dump(2) + "\n";
}

/// Human-readable report.
inline std::string report_text(const Report& r, const std::string& config_hash) {
  using detail::format_double;
  std::ostringstream o;
  o << "tegeo verification report\n";
  o << "config sha1: " << config_hash << "\n";
  o << "chart: dim " << r.dim << " (";
  for (std::size_t i = 0; i < r.coordinates.size(); ++i) o << (i ? ", " : "") << r.coordinates[i];
  o << "), connection " << r.connection_kind << "\n";
  o << "sampling: seed " << r.spec.seed << ", " << r.points_evaluated << "/" << r.spec.points
    << " points evaluated, " << r.skipped.size() << " skipped" << (r.valid ? "" : " (report invalid)") << "\n";
  for (const auto& s : r.sections) {
    o << "\n[" << s.name << "] " << (s.pass ? "PASS" : "FAIL");
    if (s.skipped) o << " (" << s.skipped << " points skipped)";
    o << "\n";
    for (const auto& c : s.checks) {
      o << "  " << (c.pass ? "ok  " : "FAIL") << " " << c.name << " = " << format_double(c.value)
        << (c.comparison == Comparison::Below ? " < " : " >= ") << format_double(c.tolerance);
      if (c.worst_point && !c.pass) o << " at " << describe(*c.worst_point);
      o << "\n";
    }
  }
  o << "\n";
  for (const auto& v : r.verdicts) {
    o << "verdict " << v.id << ": " << (v.consistent ? "consistent" : "INCONSISTENT") << " (";
    for (std::size_t i = 0; i < v.members.size(); ++i) {
      o << (i ? ", " : "") << v.members[i].name << " " << (v.members[i].holds ? "holds" : "fails");
    }
    o << ")\n";
  }
  for (const auto& s : r.skipped) o << "skipped point " << s.index << ": " << s.reason << "\n";
  for (const auto& n : r.notes) o << "note: " << n << "\n";
  o << "outcome: " << r.outcome() << "\n";
  return o.str();
}

}  // namespace tegeo
