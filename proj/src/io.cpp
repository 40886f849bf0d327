#include "epuc/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "epuc/errors.hpp"

namespace epuc::io {
namespace {

using nlohmann::json;

constexpr std::array<char, 4> kMagic = {'E', 'P', 'U', 'C'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 1 + 3 * 4 + 1;

std::uint32_t load_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t load_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

void store_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), b.size());
}

void store_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (std::size_t i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), b.size());
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffu) throw DimensionError(std::string(what) + " does not fit the binary header");
  return static_cast<std::uint32_t>(v);
}

// Re-raises a tensor validation failure with the record it came from.
[[noreturn]] void rethrow_with_record(const SimplexError& e, const std::vector<std::size_t>& lines,
                                      const std::vector<std::string>& ids) {
  std::string where = "record " + std::to_string(e.input());
  if (e.input() < lines.size()) where += " (line " + std::to_string(lines[e.input()]) + ")";
  if (e.input() < ids.size()) where += " id '" + ids[e.input()] + "'";
  throw SimplexError(e.input(), e.pass(), e.row_sum(), where + ": " + e.what());
}

}  // namespace

Dataset read_jsonl(std::istream& in) {
  std::vector<double> values;
  std::vector<std::string> ids;
  std::vector<std::size_t> labels;
  std::vector<std::size_t> lines;
  std::optional<bool> labelled;
  std::size_t S = 0, K = 0;
  std::size_t line_no = 0;
  std::string line;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& why) -> ParseError {
      return ParseError("line " + std::to_string(line_no) + ": " + why, line_no);
    };
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw fail(std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) throw fail("record is not an object");
    if (!rec.contains("id") || !rec["id"].is_string()) throw fail("missing string field 'id'");
    if (!rec.contains("samples") || !rec["samples"].is_array()) throw fail("missing array field 'samples'");

    const bool has_label = rec.contains("label") && !rec["label"].is_null();
    if (labelled && *labelled != has_label) throw fail("labels must be given for every record or for none");
    labelled = has_label;
    if (has_label) {
      const auto& l = rec["label"];
      if (!l.is_number_integer() || l.get<std::int64_t>() < 0) throw fail("'label' must be a nonnegative integer");
      labels.push_back(l.get<std::size_t>());
    }

    const auto& samples = rec["samples"];
    if (lines.empty()) {
      S = samples.size();
      K = S == 0 || !samples[0].is_array() ? 0 : samples[0].size();
    }
    if (samples.size() != S) {
      throw fail("record has " + std::to_string(samples.size()) + " passes, expected " + std::to_string(S));
    }
    for (const auto& row : samples) {
      if (!row.is_array() || row.size() != K) throw fail("every pass must be an array of " + std::to_string(K) + " numbers");
      for (const auto& v : row) {
        if (!v.is_number()) throw fail("non-numeric probability");
        values.push_back(v.get<double>());
      }
    }
    ids.push_back(rec["id"].get<std::string>());
    lines.push_back(line_no);
  }
  if (in.bad()) throw ParseError("read error", line_no);
  if (lines.empty()) throw ParseError("no records", line_no);

  try {
    Dataset d{SampleTensor::validate(std::move(values), lines.size(), S, K, ids), std::nullopt};
    if (labelled.value_or(false)) d.labels = std::move(labels);
    return d;
  } catch (const SimplexError& e) {
    rethrow_with_record(e, lines, ids);
  }
}

void write_jsonl(std::ostream& out, const SampleTensor& tensor, const std::vector<std::size_t>* labels) {
  for (std::size_t i = 0; i < tensor.n_inputs(); ++i) {
    out << "{\"id\":" << json(tensor.id(i)).dump();
    if (labels != nullptr) out << ",\"label\":" << labels->at(i);
    out << ",\"samples\":[";
    for (std::size_t s = 0; s < tensor.n_samples(); ++s) {
      out << (s == 0 ? "[" : ",[");
      for (std::size_t k = 0; k < tensor.n_classes(); ++k) {
        if (k != 0) out << ',';
        // Shortest round-trip representation.
        out << json(tensor.at(i, s, k)).dump();
      }
      out << ']';
    }
    out << "]}\n";
  }
}

Dataset read_binary(std::istream& in) {
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (bytes.size() < kHeaderBytes) throw ParseError("binary file shorter than its header", bytes.size());
  for (std::size_t i = 0; i < kMagic.size(); ++i) {
    if (bytes[i] != static_cast<unsigned char>(kMagic[i])) throw ParseError("bad magic bytes", i);
  }
  if (bytes[4] != kVersion) throw ParseError("unsupported format version " + std::to_string(bytes[4]), 4);
  const std::size_t N = load_u32(&bytes[5]);
  const std::size_t S = load_u32(&bytes[9]);
  const std::size_t K = load_u32(&bytes[13]);
  const std::uint8_t flags = bytes[17];
  if ((flags & ~1u) != 0) throw ParseError("unknown flag bits", 17);
  const bool has_labels = (flags & 1u) != 0;

  const std::size_t count = N * S * K;
  const std::size_t expected = kHeaderBytes + 8 * count + (has_labels ? 4 * N : 0);
  if (bytes.size() != expected) {
    throw ParseError("header declares " + std::to_string(N) + "x" + std::to_string(S) + "x" + std::to_string(K) +
                         " (" + std::to_string(expected) + " bytes) but file has " + std::to_string(bytes.size()),
                     std::min(bytes.size(), expected));
  }
  std::vector<double> values(count);
  std::size_t off = kHeaderBytes;
  for (std::size_t i = 0; i < count; ++i, off += 8) values[i] = std::bit_cast<double>(load_u64(&bytes[off]));
  std::optional<std::vector<std::size_t>> labels;
  if (has_labels) {
    labels.emplace(N);
    for (std::size_t i = 0; i < N; ++i, off += 4) (*labels)[i] = load_u32(&bytes[off]);
  }
  return Dataset{SampleTensor::validate(std::move(values), N, S, K), std::move(labels)};
}

void write_binary(std::ostream& out, const SampleTensor& tensor, const std::vector<std::size_t>* labels) {
  out.write(kMagic.data(), kMagic.size());
  out.put(static_cast<char>(kVersion));
  store_u32(out, checked_u32(tensor.n_inputs(), "N"));
  store_u32(out, checked_u32(tensor.n_samples(), "S"));
  store_u32(out, checked_u32(tensor.n_classes(), "K"));
  out.put(labels != nullptr ? 1 : 0);
  for (double v : tensor.values()) store_u64(out, std::bit_cast<std::uint64_t>(v));
  if (labels != nullptr) {
    for (std::size_t y : *labels) store_u32(out, checked_u32(y, "label"));
  }
}

Dataset ingest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  const bool binary = in.gcount() == 4 && head == kMagic;
  in.clear();
  in.seekg(0);
  return binary ? read_binary(in) : read_jsonl(in);
}

void save(const std::filesystem::path& path, const Dataset& data, Format format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string(), 0);
  const auto* labels = data.labels ? &*data.labels : nullptr;
  if (format == Format::kBinary) {
    write_binary(out, data.tensor, labels);
  } else {
    write_jsonl(out, data.tensor, labels);
  }
}

std::string format_double(double x) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.9g", x);
  return buf.data();
}

double round9(double x) { return std::strtod(format_double(x).c_str(), nullptr); }

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i != 0) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ParseError("CSV column '" + name + "' not found", 0);
}

CsvTable read_csv(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool row_has_content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        row_has_content = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_has_content || !field.empty()) {
          record.push_back(std::move(field));
          records.push_back(std::move(record));
        }
        field.clear();
        record.clear();
        row_has_content = false;
        break;
      default:
        field += c;
        row_has_content = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field", text.size());
  if (row_has_content || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  CsvTable t;
  if (records.empty()) return t;
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size()) {
      throw ParseError("CSV row " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                           " fields, header has " + std::to_string(t.header.size()),
                       r + 1);
    }
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  return read_csv(in);
}

}  // namespace epuc::io
