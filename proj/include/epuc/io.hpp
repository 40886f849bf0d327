#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "epuc/core.hpp"

namespace epuc::io {

/// A validated tensor plus optional true labels.
struct Dataset {
  SampleTensor tensor;
  std::optional<std::vector<std::size_t>> labels;
};

enum class Format { kJsonl, kBinary };

/// One JSON object per line: {"id": str, "label": int (optional), "samples": [[K] x S]}.
/// Either every record has a label or none does. Blank lines are skipped.
Dataset read_jsonl(std::istream& in);
void write_jsonl(std::ostream& out, const SampleTensor& tensor, const std::vector<std::size_t>* labels);

/// "EPUC", version byte 1, little-endian u32 N, S, K, flag byte (bit 0 =
/// labels), N*S*K little-endian f64 input-major then pass-major, then N u32
/// labels when flagged. Ids are not stored.
Dataset read_binary(std::istream& in);
void write_binary(std::ostream& out, const SampleTensor& tensor, const std::vector<std::size_t>* labels);

/// Dispatches on the leading magic bytes.
Dataset ingest(const std::filesystem::path& path);
void save(const std::filesystem::path& path, const Dataset& data, Format format);

/// "%.9g", the format of every floating-point value the tools emit.
std::string format_double(double x);

/// x rounded to what format_double prints.
double round9(double x);

/// Minimal RFC 4180 CSV: fields quoted only when they contain , " or newlines.
std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws ParseError when missing.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace epuc::io
