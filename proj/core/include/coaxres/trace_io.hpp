// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef COAXRES_TRACE_IO_HPP
#define COAXRES_TRACE_IO_HPP

#include <string>

#include "coaxres/sweep_result.hpp"

namespace coaxres {

enum class TraceFormat { touchstone_s1p, csv };

// Picks the format from the file extension (.s1p / .csv, case-insensitive).
TraceFormat trace_format_from_path(const std::string& path);

// Reads a one-port trace. Touchstone v1 (header "# <unit> S RI R <z>",
// '!' comments, Hz/kHz/MHz/GHz units) or CSV with the exact header
// "freq_hz,s11_re,s11_im". Frequencies are returned in Hz.
SweepResult read_trace(const std::string& path, TraceFormat format);
SweepResult read_trace(const std::string& path);

// Writes a trace. The s1p header is exactly "# Hz S RI R 50"; numbers carry
// 17 significant digits. Writes are atomic (temp file + rename).
void write_trace(const SweepResult& sweep, const std::string& path,
                 TraceFormat format);
void write_trace(const SweepResult& sweep, const std::string& path);

}  // namespace coaxres

#endif  // COAXRES_TRACE_IO_HPP
