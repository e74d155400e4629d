#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace entdyn {

// One table cell: a number, a label (e.g. a series name) or empty. Numbers
// are rendered with 17 significant digits so values survive a round trip
// through text unchanged.
using Cell = std::variant<std::monostate, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string format_number(double v);

// RFC-4180-style CSV with a header row, '\n' line ends, empty cells for
// std::monostate. Output bytes are a pure function of the table.
std::string format_csv(const Table& table);
Table parse_csv(const std::string& text);

// {"columns": [...], "rows": [[...], ...]} with native JSON numbers.
std::string format_table_json(const Table& table);
Table parse_table_json(const std::string& text);

// Write via a sibling temp file and rename, so readers never observe a
// partially written file and a failed run cannot leave a truncated one.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

// Provenance sidecar written next to every data file: tool version, creation
// time, subcommand and the fully resolved configuration including the master
// seed. Everything except created_utc is deterministic.
nlohmann::json run_manifest(const std::string& subcommand, const nlohmann::json& config,
                            std::uint64_t master_seed);

std::filesystem::path manifest_path_for(const std::filesystem::path& data_path);
void write_manifest(const std::filesystem::path& data_path, const nlohmann::json& manifest);

}  // namespace entdyn
