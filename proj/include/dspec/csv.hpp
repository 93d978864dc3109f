#pragma once

// Pinned CSV dialect: comma separator, '.' decimal point, one header row,
// LF line endings, numbers at 12 significant digits. Golden-file tests
// depend on every one of these choices.

#include <cstdio>
#include <string>
#include <vector>

namespace dspec {

inline std::string format_number(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::vector<std::string>& add_row() { return rows.emplace_back(); }

    std::string to_string() const {
        std::string out;
        append_line(out, header);
        for (const auto& row : rows) append_line(out, row);
        return out;
    }

private:
    static void append_line(std::string& out, const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out += ',';
            append_cell(out, cells[k]);
        }
        out += '\n';
    }

    // RFC-4180 quoting, applied only when the cell needs it
    static void append_cell(std::string& out, const std::string& cell) {
        if (cell.find_first_of(",\"\n") == std::string::npos) {
            out += cell;
            return;
        }
        out += '"';
        for (char c : cell) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
    }
};

}
