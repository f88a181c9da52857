// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrtlab/errors.hpp"

namespace qrtlab::expcli {

inline constexpr const char* kVersion = "qrtlab 0.1.0";

// Shortest round-trip representation; fixed across platforms with IEEE doubles.
inline std::string format_number(double x) {
  if (std::isnan(x)) throw NumericError("NaN in output");
  if (std::isinf(x)) throw NumericError("infinite value in output");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row) {
    require(row.size() == header_.size(), "CSV row width does not match header");
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string str() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << "\n";
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return os.str();
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Column-oriented view of a CSV file written by CsvTable.
struct CsvData {
  std::vector<std::string> header;
  std::map<std::string, std::vector<std::string>> columns;
  std::size_t n_rows = 0;

  bool has(const std::string& c) const { return columns.count(c) > 0; }

  std::vector<double> numeric(const std::string& c) const {
    auto it = columns.find(c);
    if (it == columns.end()) throw SchemaError("column '" + c + "' not found in CSV");
    std::vector<double> out;
    for (const auto& s : it->second) out.push_back(s.empty() ? std::nan("") : std::stod(s));
    return out;
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("csv: cannot read '" + path.string() + "'");
  CsvData d;
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw SchemaError("csv: file is empty");
  d.header = split_csv_line(line);
  for (const auto& h : d.header) d.columns[h];
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != d.header.size()) throw SchemaError("csv: ragged row " + std::to_string(d.n_rows + 1));
    for (std::size_t i = 0; i < cells.size(); ++i) d.columns[d.header[i]].push_back(cells[i]);
    ++d.n_rows;
  }
  if (d.n_rows == 0) throw SchemaError("csv: no data rows");
  return d;
}

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

inline std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

struct RunManifest {
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  double wall_seconds = 0.0;
  int workers = 1;
  std::vector<std::string> outputs;
  std::map<std::string, std::string> digests;
  nlohmann::json summary = nlohmann::json::object();

  void add_output(const std::filesystem::path& p) {
    outputs.push_back(p.filename().string());
    digests[p.filename().string()] = sha256_file(p);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["config"] = config;
    j["seed"] = seed;
    j["version"] = version;
    j["wall_seconds"] = wall_seconds;
    j["workers"] = workers;
    j["outputs"] = outputs;
    j["digests"] = digests;
    j["summary"] = summary;
    return j;
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    out << to_json().dump(2) << "\n";
  }
};

}  // namespace qrtlab::expcli
