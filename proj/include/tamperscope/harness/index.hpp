#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tamperscope/core/error.hpp"
#include "tamperscope/imaging/codec.hpp"

namespace tamperscope::harness {

namespace fs = std::filesystem;

inline constexpr std::string_view kIndexHeader =
    "imageId,imagePath,maskPath,pristineFlag";

struct IndexRow {
  std::string imageId;
  std::string imagePath;  // as written in the file
  std::string maskPath;   // empty for pristine rows
  bool pristine = false;
};

struct DatasetIndex {
  std::vector<IndexRow> rows;
  fs::path baseDir;  // relative paths resolve against this

  fs::path resolve(const std::string& p) const {
    const fs::path q(p);
    return q.is_absolute() ? q : baseDir / q;
  }
};

/// 64-bit FNV-1a, used for run ids and content digests.
inline std::uint64_t fnv1a(std::string_view data,
                           std::uint64_t h = 0xcbf29ce484222325ull) noexcept {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line,
                                               std::size_t lineNo) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  require(!quoted, ErrorKind::Parse,
          "index line " + std::to_string(lineNo) + ": unterminated quote");
  out.push_back(std::move(cur));
  return out;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline bool parse_flag(const std::string& s, std::size_t lineNo) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false" || s.empty()) return false;
  fail(ErrorKind::Parse, "index line " + std::to_string(lineNo) +
                             ": pristineFlag must be 0/1/true/false, got '" + s + "'");
}

}  // namespace detail

inline DatasetIndex parse_index(const std::string& text, fs::path baseDir = {}) {
  DatasetIndex idx;
  idx.baseDir = std::move(baseDir);
  std::istringstream in(text);
  std::string line;
  std::size_t lineNo = 0;
  bool header = false;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      if (lineNo == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
        line.erase(0, 3);
      require(line == kIndexHeader, ErrorKind::Parse,
              "index line 1: expected header '" + std::string(kIndexHeader) + "'");
      header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line, lineNo);
    require(f.size() == 4, ErrorKind::Parse,
            "index line " + std::to_string(lineNo) + ": expected 4 fields, got " +
                std::to_string(f.size()));
    IndexRow r{f[0], f[1], f[2], detail::parse_flag(f[3], lineNo)};
    const std::string at = "index line " + std::to_string(lineNo) + ": ";
    require(!r.imageId.empty(), ErrorKind::Parse, at + "empty imageId");
    require(!r.imagePath.empty(), ErrorKind::Parse, at + "empty imagePath");
    require(!(r.pristine && !r.maskPath.empty()), ErrorKind::Parse,
            at + "pristine row must not carry a maskPath");
    require(ids.insert(r.imageId).second, ErrorKind::Parse,
            at + "duplicate imageId '" + r.imageId + "'");
    idx.rows.push_back(std::move(r));
  }
  require(header, ErrorKind::Parse, "index is empty (no header)");
  return idx;
}

inline DatasetIndex load_index(const fs::path& path) {
  const auto bytes = imaging::read_file(path);
  return parse_index(std::string(bytes.begin(), bytes.end()), path.parent_path());
}

inline std::string format_index(const std::vector<IndexRow>& rows) {
  std::string out(kIndexHeader);
  out += '\n';
  for (const auto& r : rows)
    out += detail::csv_field(r.imageId) + ',' + detail::csv_field(r.imagePath) +
           ',' + detail::csv_field(r.maskPath) + ',' + (r.pristine ? "1" : "0") +
           '\n';
  return out;
}

/// Rows sorted by imageId; the processing and reporting order.
inline std::vector<IndexRow> sorted_rows(const DatasetIndex& idx) {
  auto rows = idx.rows;
  std::sort(rows.begin(), rows.end(),
            [](const IndexRow& a, const IndexRow& b) { return a.imageId < b.imageId; });
  return rows;
}

}  // namespace tamperscope::harness
