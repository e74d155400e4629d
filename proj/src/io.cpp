#include "entdyn/io.hpp"

#include <atomic>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <unistd.h>

#include "entdyn/version.hpp"

namespace entdyn {
namespace {

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote_csv(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string cell_to_csv(const Cell& cell) {
  if (std::holds_alternative<std::monostate>(cell)) return "";
  if (const double* v = std::get_if<double>(&cell)) return format_number(*v);
  const std::string& s = std::get<std::string>(cell);
  return needs_quoting(s) ? quote_csv(s) : s;
}

Cell cell_from_text(const std::string& text) {
  if (text.empty()) return std::monostate{};
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (errno == 0 && end == text.c_str() + text.size()) return v;
  return text;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"' && current.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += needs_quoting(table.columns[c]) ? quote_csv(table.columns[c]) : table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw std::invalid_argument("table row width differs from the header");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += cell_to_csv(row[c]);
    }
    out += '\n';
  }
  return out;
}

Table parse_csv(const std::string& text) {
  Table table;
  bool header = true;

  const auto consume_record = [&](std::string line, bool at_end) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && at_end) return;
    const auto fields = split_csv_line(line);
    if (header) {
      table.columns = fields;
      header = false;
      return;
    }
    if (fields.size() != table.columns.size()) {
      throw std::runtime_error("CSV row width differs from the header");
    }
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(cell_from_text(f));
    table.rows.push_back(std::move(row));
  };

  // Record boundaries are unquoted newlines; quoted fields may span lines.
  std::string record;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '"') {
      quoted = !quoted;
      record += c;
    } else if (c == '\n' && !quoted) {
      consume_record(std::move(record), i + 1 >= text.size());
      record.clear();
    } else {
      record += c;
    }
  }
  if (!record.empty()) consume_record(std::move(record), true);
  if (header) throw std::runtime_error("CSV input is empty");
  return table;
}

std::string format_table_json(const Table& table) {
  nlohmann::json doc;
  doc["columns"] = table.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw std::invalid_argument("table row width differs from the header");
    }
    nlohmann::json jrow = nlohmann::json::array();
    for (const auto& cell : row) {
      if (std::holds_alternative<std::monostate>(cell)) {
        jrow.push_back(nullptr);
      } else if (const double* v = std::get_if<double>(&cell)) {
        jrow.push_back(*v);
      } else {
        jrow.push_back(std::get<std::string>(cell));
      }
    }
    rows.push_back(std::move(jrow));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

Table parse_table_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  if (!doc.is_object() || !doc.contains("columns") || !doc.contains("rows")) {
    throw std::runtime_error("table JSON must have columns and rows");
  }
  Table table;
  for (const auto& c : doc["columns"]) table.columns.push_back(c.get<std::string>());
  for (const auto& jrow : doc["rows"]) {
    std::vector<Cell> row;
    for (const auto& cell : jrow) {
      if (cell.is_null()) row.emplace_back(std::monostate{});
      else if (cell.is_number()) row.emplace_back(cell.get<double>());
      else row.emplace_back(cell.get<std::string>());
    }
    if (row.size() != table.columns.size()) {
      throw std::runtime_error("table JSON row width differs from the header");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
  const auto parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);

  static std::atomic<unsigned> counter{0};
  const std::string tmp_name = path.filename().string() + ".tmp." +
                               std::to_string(::getpid()) + "." +
                               std::to_string(counter.fetch_add(1));
  const std::filesystem::path tmp =
      parent.empty() ? std::filesystem::path(tmp_name) : parent / tmp_name;

  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot move temporary file into place at " + path.string());
  }
}

nlohmann::json run_manifest(const std::string& subcommand, const nlohmann::json& config,
                            std::uint64_t master_seed) {
  nlohmann::json doc;
  doc["tool"] = "entdyn";
  doc["version"] = kVersion;
  doc["created_utc"] = utc_timestamp();
  doc["subcommand"] = subcommand;
  doc["config"] = config;
  doc["master_seed"] = master_seed;
  return doc;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& data_path) {
  std::filesystem::path p = data_path;
  p += ".manifest.json";
  return p;
}

void write_manifest(const std::filesystem::path& data_path, const nlohmann::json& manifest) {
  atomic_write_file(manifest_path_for(data_path), manifest.dump(2) + "\n");
}

}  // namespace entdyn
