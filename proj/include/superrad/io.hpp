// io.hpp - CSV rendering and atomic file output
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "superrad/domains.hpp"
#include "superrad/waveform.hpp"

namespace superrad::io {

inline constexpr int kSignificantDigits = 12;

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, v);
    return buf;
}

/// Comma-separated table with one header row.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::initializer_list<double> values) { add_row(std::vector<double>(values)); }

    void add_row(const std::vector<double>& values) {
        if (values.size() != header_.size()) throw std::invalid_argument("CsvTable: row width differs from header");
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(format_number(v));
        rows_.push_back(std::move(cells));
    }

    void add_text_row(std::vector<std::string> cells) {
        if (cells.size() != header_.size()) throw std::invalid_argument("CsvTable: row width differs from header");
        rows_.push_back(std::move(cells));
    }

    std::string str() const {
        std::string out;
        append_line(out, header_);
        for (const auto& r : rows_) append_line(out, r);
        return out;
    }

private:
    static void append_line(std::string& out, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string waveform_csv(const Waveform& w) {
    CsvTable t({"t", "amplitude", "intensity"});
    for (std::size_t i = 0; i < w.grid.n_samples; ++i) {
        const double a = w.amplitude[i];
        t.add_row({w.grid.at(i), a, a * a});
    }
    return t.str();
}

inline std::string profile_csv(const SpatialProfile& p) {
    CsvTable t({"depth_bt", "field", "im_coherence"});
    for (std::size_t i = 0; i < p.depth_b.size(); ++i) t.add_row({p.depth_b[i] * p.t_p, p.field[i], p.im_coherence[i]});
    return t.str();
}

/// Parses a numeric CSV produced by CsvTable: header plus rows of numbers.
struct ParsedCsv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) {
                std::vector<double> col;
                col.reserve(rows.size());
                for (const auto& r : rows) col.push_back(r.at(c));
                return col;
            }
        throw std::out_of_range("ParsedCsv: no column " + name);
    }
};

inline ParsedCsv parse_csv(const std::string& text) {
    ParsedCsv out;
    std::istringstream in(text);
    std::string line;
    const auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(s);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        return cells;
    };
    if (!std::getline(in, line)) return out;
    out.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& c : split(line)) row.push_back(std::stod(c));
        out.rows.push_back(std::move(row));
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes to a sibling temporary file and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace superrad::io
