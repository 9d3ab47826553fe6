// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

#include "cdt/instance_io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cdt {

namespace {

using nlohmann::json;

std::string number(double x) {
  if (!std::isfinite(x)) throw ValidationError("write_instance: non-finite value");
  if (x == 0.0 && std::signbit(x)) return "-0.0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void put_vector(std::string& out, const Vector& v) {
  out += '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += number(v(i));
  }
  out += ']';
}

void put_matrix(std::string& out, const Matrix& m) {
  out += '[';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += ",\n    ";
    put_vector(out, m.row(i).transpose());
  }
  out += ']';
}

double as_double(const json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError("instance file: " + what + " is not a number");
  return j.get<double>();
}

Vector as_vector(const json& j, Eigen::Index n, const std::string& what) {
  if (!j.is_array()) throw ParseError("instance file: " + what + " is not an array");
  if (static_cast<Eigen::Index>(j.size()) != n)
    throw ValidationError("instance file: " + what + " has length " +
                          std::to_string(j.size()) + ", expected " + std::to_string(n));
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = as_double(j[static_cast<std::size_t>(i)], what);
  return v;
}

Matrix as_matrix(const json& j, Eigen::Index n, const std::string& what) {
  if (!j.is_array()) throw ParseError("instance file: " + what + " is not an array");
  if (static_cast<Eigen::Index>(j.size()) != n)
    throw ValidationError("instance file: " + what + " has " + std::to_string(j.size()) +
                          " rows, expected " + std::to_string(n));
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    m.row(i) = as_vector(j[static_cast<std::size_t>(i)], n, what + " row").transpose();
  return m;
}

const json& field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(std::string("instance file: missing key \"") + key + "\"");
  return *it;
}

}  // namespace

std::string serialize_instance(const CdtInstance& inst, const InstanceMeta& meta) {
  std::string out = "{\n  \"n\": " + std::to_string(inst.n()) + ",\n  \"Q\": ";
  put_matrix(out, inst.Q());
  out += ",\n  \"q\": ";
  put_vector(out, inst.q());
  out += ",\n  \"A\": ";
  put_matrix(out, inst.A());
  out += ",\n  \"a\": ";
  put_vector(out, inst.a());
  out += ",\n  \"a0\": " + number(inst.a0());
  if (!meta.empty()) {
    out += ",\n  \"meta\": {";
    const char* sep = "";
    if (meta.name) {
      out += sep;
      out += "\"name\": " + json(*meta.name).dump();
      sep = ", ";
    }
    if (meta.seed) {
      out += sep;
      out += "\"seed\": " + std::to_string(*meta.seed);
      sep = ", ";
    }
    if (meta.known_optimum) {
      out += sep;
      out += "\"known_optimum\": " + number(*meta.known_optimum);
    }
    out += '}';
  }
  out += "\n}\n";
  return out;
}

InstanceFile parse_instance(std::string_view text, bool require_interior) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("instance file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("instance file: top level is not an object");

  const json& jn = field(doc, "n");
  if (!jn.is_number_integer() || jn.get<long long>() < 1)
    throw ValidationError("instance file: n must be a positive integer");
  const auto n = static_cast<Eigen::Index>(jn.get<long long>());

  InstanceMeta meta;
  if (auto it = doc.find("meta"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("instance file: meta is not an object");
    if (auto f = it->find("name"); f != it->end()) {
      if (!f->is_string()) throw ParseError("instance file: meta.name is not a string");
      meta.name = f->get<std::string>();
    }
    if (auto f = it->find("seed"); f != it->end()) {
      if (!f->is_number_unsigned()) throw ParseError("instance file: meta.seed is not an unsigned integer");
      meta.seed = f->get<std::uint64_t>();
    }
    if (auto f = it->find("known_optimum"); f != it->end())
      meta.known_optimum = as_double(*f, "meta.known_optimum");
  }

  InstanceFile file{CdtInstance(as_matrix(field(doc, "Q"), n, "Q"),
                                as_vector(field(doc, "q"), n, "q"),
                                as_matrix(field(doc, "A"), n, "A"),
                                as_vector(field(doc, "a"), n, "a"),
                                as_double(field(doc, "a0"), "a0")),
                    std::move(meta)};
  if (require_interior) require_interior_assumption(file.instance);
  return file;
}

InstanceFile read_instance_file(const std::filesystem::path& path, bool require_interior) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open instance file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str(), require_interior);
}

CdtInstance read_instance(const std::filesystem::path& path) {
  return read_instance_file(path).instance;
}

void write_instance(const CdtInstance& inst, const std::filesystem::path& path,
                    const InstanceMeta& meta) {
  const std::string text = serialize_instance(inst, meta);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush()) throw Error("write failed: " + path.string());
}

}  // namespace cdt
