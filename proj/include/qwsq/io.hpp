// io.hpp - columnar datasets and their CSV / JSON encodings.
//
// CSV layout:
//   # key=value          (one metadata line per entry, insertion order)
//   col0,col1,...        (column names)
//   v,v,...              (rows, %.17g)
// JSON carries the same fields: {"metadata": {...}, "columns": [...],
// "data": [[row], ...]}.

#pragma once

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

namespace qwsq::io {

struct Dataset {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // column-major, one vector per column

    void meta(std::string key, std::string value) { metadata.emplace_back(std::move(key), std::move(value)); }

    void add_column(std::string name, std::vector<double> values) {
        if (!data.empty() && values.size() != data.front().size())
            throw std::invalid_argument("column '" + name + "' has a different length");
        columns.push_back(std::move(name));
        data.push_back(std::move(values));
    }

    std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
};

/// 17 significant digits round-trip every double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string to_csv(const Dataset& ds) {
    std::string out;
    for (const auto& [k, v] : ds.metadata) out += "# " + k + "=" + v + "\n";
    for (std::size_t c = 0; c < ds.columns.size(); ++c) out += (c ? "," : "") + ds.columns[c];
    out += "\n";
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        for (std::size_t c = 0; c < ds.data.size(); ++c) {
            if (c) out += ',';
            out += format_double(ds.data[c][r]);
        }
        out += '\n';
    }
    return out;
}

inline std::string to_json(const Dataset& ds) {
    nlohmann::ordered_json j;
    j["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : ds.metadata) j["metadata"][k] = v;
    j["columns"] = ds.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (const auto& col : ds.data) row.push_back(col[r]);
        rows.push_back(std::move(row));
    }
    j["data"] = std::move(rows);
    return j.dump(1) + "\n";
}

/// Writes `content` to `path` through a sibling temporary and a rename, so
/// readers never see a partial file. "-" writes to stdout.
inline void write_atomic(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content << std::flush;
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot move output into place at " + path + ": " + ec.message());
    }
}

}  // namespace qwsq::io
