#pragma once

// Text formats.
//
//   tensor:  {"order": m, "dim": n, "entries": [[i1, ..., im, value], ...]}
//            1-based indices, unlisted entries are zero, duplicates rejected.
//   vector:  a JSON array of n reals (whitespace/comma separated also read).
//   meta:    {"problem", "n", "seed", "scale", "shift"?, "known_solutions"?}
//   trace:   CSV  k,res2,resinf,mono_violation,eps_fallback,ms

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "mteq/error.hpp"
#include "mteq/problems.hpp"
#include "mteq/solvers.hpp"
#include "mteq/tensor.hpp"

namespace mteq::io {

using nlohmann::json;

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '+')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::ParseError, "not a number: '" + std::string(s) + "'");
  return v;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

// --- tensor -----------------------------------------------------------------

inline json tensor_to_json(const DenseTensor& t) {
  json entries = json::array();
  std::vector<std::size_t> idx(t.order());
  for (std::size_t lin = 0; lin < t.size(); ++lin) {
    if (t.flat(lin) == 0.0) continue;
    t.unravel(lin, idx);
    json rec = json::array();
    for (std::size_t k : idx) rec.push_back(k + 1);
    rec.push_back(t.flat(lin));
    entries.push_back(std::move(rec));
  }
  return {{"order", t.order()}, {"dim", t.dim()}, {"entries", std::move(entries)}};
}

inline DenseTensor tensor_from_json(const json& j) {
  try {
    const auto order = j.at("order").get<std::int64_t>();
    const auto dim = j.at("dim").get<std::int64_t>();
    if (order < 2 || order > 6) throw Error(ErrorCode::ParseError, "order must be in [2, 6]");
    if (dim < 1 || dim > 500) throw Error(ErrorCode::ParseError, "dim must be in [1, 500]");
    DenseTensor t(static_cast<std::size_t>(order), static_cast<std::size_t>(dim));
    std::set<std::size_t> seen;
    std::vector<std::size_t> idx(t.order());
    for (const auto& rec : j.at("entries")) {
      if (!rec.is_array() || rec.size() != t.order() + 1)
        throw Error(ErrorCode::ParseError, "entry record needs order + 1 fields");
      for (std::size_t k = 0; k < t.order(); ++k) {
        const auto i = rec[k].get<std::int64_t>();
        if (i < 1 || i > dim) throw Error(ErrorCode::ParseError, "index out of range in entry " + rec.dump());
        idx[k] = static_cast<std::size_t>(i - 1);
      }
      const double v = rec[t.order()].get<double>();
      if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, "non-finite value");
      const std::size_t lin = t.linear_index(idx);
      if (!seen.insert(lin).second) throw Error(ErrorCode::ParseError, "duplicate entry " + rec.dump());
      t.flat(lin) = v;
    }
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

inline DenseTensor parse_tensor(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return tensor_from_json(j);
}

inline DenseTensor load_tensor(const std::filesystem::path& path) { return parse_tensor(read_file(path)); }

inline void save_tensor(const std::filesystem::path& path, const DenseTensor& t) {
  write_file(path, tensor_to_json(t).dump() + "\n");
}

// --- vectors ----------------------------------------------------------------

inline std::string format_vector(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s + "]";
}

/// JSON array, or a plain list separated by commas and/or whitespace.
inline Vector parse_vector(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    try {
      const json j = json::parse(text);
      Vector v = j.get<Vector>();
      for (double x : v)
        if (!std::isfinite(x)) throw Error(ErrorCode::ParseError, "non-finite vector entry");
      return v;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, e.what());
    }
  }
  Vector v;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) v.push_back(parse_double(token));
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r')
      flush();
    else
      token += c;
  }
  flush();
  for (double x : v)
    if (!std::isfinite(x)) throw Error(ErrorCode::ParseError, "non-finite vector entry");
  return v;
}

inline Vector load_vector(const std::filesystem::path& path) { return parse_vector(read_file(path)); }

inline void save_vector(const std::filesystem::path& path, std::span<const double> v) {
  write_file(path, format_vector(v) + "\n");
}

/// "zero", an inline comma list, or a path to a vector file.
inline Vector parse_x0(const std::string& spec, std::size_t n) {
  Vector x;
  if (spec.empty() || spec == "zero") {
    x.assign(n, 0.0);
  } else if (std::filesystem::exists(spec)) {
    x = load_vector(spec);
  } else {
    x = parse_vector(spec);
  }
  if (x.size() != n)
    throw Error(ErrorCode::DimensionMismatch,
                "x0 has " + std::to_string(x.size()) + " entries, expected " + std::to_string(n));
  return x;
}

// --- instance metadata --------------------------------------------------------

inline json meta_to_json(const ProblemInstance& inst) {
  json j = {{"problem", std::string(to_string(inst.meta.problem))},
            {"n", inst.meta.n},
            {"seed", inst.meta.seed},
            {"scale", inst.meta.scale},
            {"order", inst.tensor.order()}};
  if (inst.meta.shift) j["shift"] = *inst.meta.shift;
  if (!inst.known_solutions.empty()) j["known_solutions"] = inst.known_solutions;
  return j;
}

struct InstancePaths {
  std::filesystem::path tensor;
  std::filesystem::path rhs;
  std::filesystem::path meta;
};

inline InstancePaths instance_paths(const std::filesystem::path& prefix) {
  const std::string p = prefix.string();
  return {p + ".tensor.json", p + ".rhs.json", p + ".meta.json"};
}

inline InstancePaths save_instance(const std::filesystem::path& prefix, const ProblemInstance& inst) {
  const InstancePaths paths = instance_paths(prefix);
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
  save_tensor(paths.tensor, inst.tensor);
  save_vector(paths.rhs, inst.rhs);
  write_file(paths.meta, meta_to_json(inst).dump(2) + "\n");
  return paths;
}

// --- traces -------------------------------------------------------------------

inline constexpr const char* kTraceHeader = "k,res2,resinf,mono_violation,eps_fallback,ms";

inline void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
  out << kTraceHeader << '\n';
  auto row = [&](const IterationRecord& r) {
    out << r.k << ',' << format_double(r.res2) << ',' << format_double(r.resinf) << ','
        << format_double(r.mono_violation) << ',' << (r.eps_fallback ? 1 : 0) << ',' << format_double(r.ms)
        << '\n';
  };
  row(trace.initial);
  for (const auto& r : trace.records) row(r);
}

inline void save_trace_csv(const std::filesystem::path& path, const IterationTrace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  write_file(path, os.str());
}

}  // namespace mteq::io
