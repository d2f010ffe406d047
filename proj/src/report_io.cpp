#include "deduce/report_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "deduce/errors.hpp"

namespace deduce {

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("cannot write '" + path + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw DataError("failed writing '" + path + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw DataError("failed to move '" + tmp.string() + "' into place");
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& cell, const std::string& path, std::size_t line_no) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw DataError(path + ": expected a number at line " + std::to_string(line_no) +
                        ", got '" + cell + "'");
    }
    return v;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path, std::size_t min_cols) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
        if (rows.back().size() < min_cols)
            throw DataError(path + ": line " + std::to_string(rows.size()) + " has too few columns");
    }
    if (rows.size() < 2) throw DataError(path + ": expected a header and at least one row");
    return rows;
}

}  // namespace

NamedMatrix read_matrix_csv(const std::string& path) {
    auto rows = read_csv(path, 2);
    NamedMatrix out;
    out.columns.assign(rows[0].begin() + 1, rows[0].end());
    const std::size_t width = out.columns.size();
    out.values = Matrix(rows.size() - 1, width);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != width + 1)
            throw DataError(path + ": line " + std::to_string(r + 1) + " has inconsistent width");
        out.ids.push_back(rows[r][0]);
        for (std::size_t c = 0; c < width; ++c)
            out.values(r - 1, c) = parse_number(rows[r][c + 1], path, r + 1);
    }
    return out;
}

std::vector<std::pair<std::string, int>> read_label_pairs(const std::string& path) {
    auto rows = read_csv(path, 2);
    std::vector<std::pair<std::string, int>> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const double v = parse_number(rows[r][1], path, r + 1);
        out.emplace_back(rows[r][0], static_cast<int>(v));
    }
    return out;
}

LabelsByK read_labels_by_k(const std::string& path) {
    auto rows = read_csv(path, 3);
    LabelsByK out;
    // rows arrive grouped by k in write order; recover groups by k value
    std::vector<std::pair<std::size_t, std::vector<std::pair<std::string, int>>>> groups;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto k = static_cast<std::size_t>(parse_number(rows[r][1], path, r + 1));
        const int label = static_cast<int>(parse_number(rows[r][2], path, r + 1));
        if (groups.empty() || groups.back().first != k) groups.push_back({k, {}});
        groups.back().second.emplace_back(rows[r][0], label);
    }
    if (groups.empty()) throw DataError(path + ": no label rows");
    for (const auto& [id, label] : groups.front().second) out.sample_ids.push_back(id);
    for (auto& [k, pairs] : groups) {
        if (pairs.size() != out.sample_ids.size())
            throw DataError(path + ": inconsistent sample counts across k groups");
        std::vector<int> labels(pairs.size());
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (pairs[i].first != out.sample_ids[i])
                throw DataError(path + ": sample order differs between k groups");
            labels[i] = pairs[i].second;
        }
        out.per_k.emplace_back(k, std::move(labels));
    }
    return out;
}

}  // namespace deduce
