#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace retiomics {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by header name, -1 when absent.
    int column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text, const std::string& origin = "<string>");

std::string csv_field(const std::string& value);
std::string csv_line(const std::vector<std::string>& fields);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// write-temp-then-rename so concurrent readers never observe a partial file
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace retiomics
