// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#include "coaxres/trace_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coaxres/errors.hpp"

namespace coaxres {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const std::string& path, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size()) {
    std::ostringstream os;
    os << path << ":" << line << ": expected a number, got '" << tok << "'";
    throw IoError(os.str());
  }
  return v;
}

void check_monotonic(const SweepResult& sweep, const std::string& path) {
  try {
    validate(sweep);
  } catch (const ValidationError& e) {
    throw IoError(path + ": " + e.what());
  }
}

SweepResult read_s1p(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  SweepResult sweep;
  double unit_scale = 0.0;
  int line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto bang = line.find('!');
    if (bang != std::string::npos) line.erase(bang);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    if (line[line.find_first_not_of(" \t")] == '#') {
      const auto toks = split_ws(line.substr(line.find('#') + 1));
      std::ostringstream os;
      os << path << ":" << line_no << ": malformed option line";
      if (toks.size() != 5) throw IoError(os.str());
      const std::string unit = lower(toks[0]);
      if (unit == "hz") {
        unit_scale = 1.0;
      } else if (unit == "khz") {
        unit_scale = 1e3;
      } else if (unit == "mhz") {
        unit_scale = 1e6;
      } else if (unit == "ghz") {
        unit_scale = 1e9;
      } else {
        throw IoError(os.str() + " (unknown frequency unit '" + toks[0] + "')");
      }
      if (lower(toks[1]) != "s" || lower(toks[3]) != "r") {
        throw IoError(os.str());
      }
      if (lower(toks[2]) != "ri") {
        throw IoError(os.str() + " (only the RI data format is supported)");
      }
      parse_double(toks[4], path, line_no);
      continue;
    }

    if (unit_scale == 0.0) {
      std::ostringstream os;
      os << path << ":" << line_no << ": data before the '#' option line";
      throw IoError(os.str());
    }
    const auto toks = split_ws(line);
    if (toks.size() != 3) {
      std::ostringstream os;
      os << path << ":" << line_no << ": expected 3 columns, got "
         << toks.size();
      throw IoError(os.str());
    }
    sweep.freqs_hz.push_back(parse_double(toks[0], path, line_no) * unit_scale);
    sweep.s11.emplace_back(parse_double(toks[1], path, line_no),
                           parse_double(toks[2], path, line_no));
  }
  if (unit_scale == 0.0) {
    throw IoError(path + ": missing '#' option line");
  }
  sweep.meta["source"] = path;
  sweep.meta["format"] = "touchstone-s1p";
  check_monotonic(sweep, path);
  return sweep;
}

SweepResult read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "freq_hz,s11_re,s11_im") {
    throw IoError(path + ":1: expected header 'freq_hz,s11_re,s11_im'");
  }

  SweepResult sweep;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> toks;
    std::string tok;
    std::istringstream is(line);
    while (std::getline(is, tok, ',')) toks.push_back(tok);
    if (toks.size() != 3) {
      std::ostringstream os;
      os << path << ":" << line_no << ": expected 3 columns, got "
         << toks.size();
      throw IoError(os.str());
    }
    sweep.freqs_hz.push_back(parse_double(toks[0], path, line_no));
    sweep.s11.emplace_back(parse_double(toks[1], path, line_no),
                           parse_double(toks[2], path, line_no));
  }
  sweep.meta["source"] = path;
  sweep.meta["format"] = "csv";
  check_monotonic(sweep, path);
  return sweep;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    if (!out) throw IoError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TraceFormat trace_format_from_path(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot));
  if (ext == ".s1p") return TraceFormat::touchstone_s1p;
  if (ext == ".csv") return TraceFormat::csv;
  throw ValidationError("cannot infer trace format from '" + path +
                        "' (expected .s1p or .csv)");
}

SweepResult read_trace(const std::string& path, TraceFormat format) {
  return format == TraceFormat::touchstone_s1p ? read_s1p(path) : read_csv(path);
}

SweepResult read_trace(const std::string& path) {
  return read_trace(path, trace_format_from_path(path));
}

void write_trace(const SweepResult& sweep, const std::string& path,
                 TraceFormat format) {
  validate(sweep);
  std::ostringstream os;
  if (format == TraceFormat::touchstone_s1p) {
    for (const auto& [key, value] : sweep.meta) {
      os << "! " << key << " = " << value << "\n";
    }
    os << "# Hz S RI R 50\n";
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      os << num17(sweep.freqs_hz[i]) << ' ' << num17(sweep.s11[i].real())
         << ' ' << num17(sweep.s11[i].imag()) << "\n";
    }
  } else {
    os << "freq_hz,s11_re,s11_im\n";
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      os << num17(sweep.freqs_hz[i]) << ',' << num17(sweep.s11[i].real())
         << ',' << num17(sweep.s11[i].imag()) << "\n";
    }
  }
  atomic_write(path, os.str());
}

void write_trace(const SweepResult& sweep, const std::string& path) {
  write_trace(sweep, path, trace_format_from_path(path));
}

}  // namespace coaxres
