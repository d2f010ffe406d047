#include "deduce/data_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "deduce/errors.hpp"
#include "deduce/rng.hpp"

namespace deduce {

void AugmentConfig::validate() const {
    if (noise_std < 0.0) throw ConfigError("augment.noise_std must be >= 0");
    if (mask_rate < 0.0 || mask_rate >= 1.0) throw ConfigError("augment.mask_rate must be in [0, 1)");
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, delim)) out.push_back(cell);
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// missing (empty cell) is encoded as nullopt
std::optional<double> parse_cell(const std::string& raw, std::size_t line_no, std::size_t col_no,
                                 const std::string& path) {
    const std::string cell = trim(raw);
    if (cell.empty()) return std::nullopt;
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v)) {
        throw DataError(path + ": non-numeric cell '" + cell + "' at line " +
                        std::to_string(line_no) + ", column " + std::to_string(col_no + 1));
    }
    return v;
}

struct RawTable {
    std::vector<std::string> header;             // without the leading id header
    std::vector<std::string> row_ids;
    std::vector<std::vector<std::optional<double>>> cells;
};

RawTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const char delim = line.find('\t') != std::string::npos ? '\t' : ',';

    RawTable table;
    std::vector<std::string> header = split_line(line, delim);
    if (header.size() < 2) throw DataError(path + ": header must name an id column and features");
    for (std::size_t j = 1; j < header.size(); ++j) table.header.push_back(trim(header[j]));

    const std::size_t width = table.header.size();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_line(line, delim);
        if (fields.size() != width + 1) {
            throw DataError(path + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(width + 1));
        }
        table.row_ids.push_back(trim(fields[0]));
        std::vector<std::optional<double>> row(width);
        for (std::size_t j = 0; j < width; ++j)
            row[j] = parse_cell(fields[j + 1], line_no, j + 1, path);
        table.cells.push_back(std::move(row));
    }
    if (table.cells.empty()) throw DataError(path + ": no data rows");
    return table;
}

void check_unique_ids(const std::vector<std::string>& ids, const std::string& path) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second)
            throw DataError(path + ": duplicate sample id '" + id + "'");
    }
}

}  // namespace

OmicsBlock load_block(const std::string& path, const std::string& name, Orientation orientation) {
    RawTable table = read_table(path);

    OmicsBlock block;
    block.name = name;
    std::vector<std::vector<std::optional<double>>> cells;
    if (orientation == Orientation::SamplesRows) {
        block.sample_ids = std::move(table.row_ids);
        block.feature_names = std::move(table.header);
        cells = std::move(table.cells);
    } else {
        block.sample_ids = std::move(table.header);
        block.feature_names = std::move(table.row_ids);
        cells.assign(block.sample_ids.size(),
                     std::vector<std::optional<double>>(block.feature_names.size()));
        for (std::size_t f = 0; f < table.cells.size(); ++f)
            for (std::size_t s = 0; s < block.sample_ids.size(); ++s)
                cells[s][f] = table.cells[f][s];
    }
    check_unique_ids(block.sample_ids, path);

    const std::size_t n = block.sample_ids.size();
    const std::size_t d = block.feature_names.size();
    block.values = Matrix(n, d);

    // column-mean imputation for missing cells
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (cells[i][j]) {
                sum += *cells[i][j];
                ++count;
            }
        }
        if (count == 0) {
            throw DataError(path + ": column '" + block.feature_names[j] +
                            "' is entirely missing and cannot be imputed");
        }
        const double mean = sum / static_cast<double>(count);
        for (std::size_t i = 0; i < n; ++i) block.values(i, j) = cells[i][j] ? *cells[i][j] : mean;
    }
    return block;
}

void save_block(const OmicsBlock& block, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "sample_id";
    for (const auto& f : block.feature_names) out << ',' << f;
    out << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < block.sample_ids.size(); ++i) {
        out << block.sample_ids[i];
        for (std::size_t j = 0; j < block.feature_names.size(); ++j)
            out << ',' << block.values(i, j);
        out << '\n';
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

OmicsBlock standardize(const OmicsBlock& block) {
    const std::size_t n = block.values.rows();
    const std::size_t d = block.values.cols();
    if (n < 2) throw DataError("standardize: block '" + block.name + "' has fewer than 2 samples");

    OmicsBlock out = block;
    for (std::size_t j = 0; j < d; ++j) {
        bool constant = true;
        for (std::size_t i = 1; i < n && constant; ++i)
            constant = block.values(i, j) == block.values(0, j);

        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += block.values(i, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dlt = block.values(i, j) - mean;
            var += dlt * dlt;
        }
        var /= static_cast<double>(n);
        const double sigma = std::sqrt(var);

        if (constant || sigma == 0.0) {
            for (std::size_t i = 0; i < n; ++i) out.values(i, j) = 0.0;
        } else {
            for (std::size_t i = 0; i < n; ++i)
                out.values(i, j) = (block.values(i, j) - mean) / sigma;
        }
    }
    return out;
}

FusedDataset fuse(const std::vector<OmicsBlock>& blocks) {
    if (blocks.empty()) throw DataError("fuse: no blocks given");

    std::vector<std::unordered_set<std::string>> id_sets;
    for (std::size_t b = 1; b < blocks.size(); ++b)
        id_sets.emplace_back(blocks[b].sample_ids.begin(), blocks[b].sample_ids.end());

    std::vector<std::string> kept;
    for (const auto& id : blocks[0].sample_ids) {
        bool everywhere = true;
        for (const auto& ids : id_sets) {
            if (!ids.count(id)) {
                everywhere = false;
                break;
            }
        }
        if (everywhere) kept.push_back(id);
    }
    if (kept.empty()) throw DataError("fuse: sample id intersection is empty");

    std::size_t total = 0;
    for (const auto& b : blocks) total += b.values.cols();

    FusedDataset fused;
    fused.sample_ids = kept;
    fused.values = Matrix(kept.size(), total);
    std::size_t offset = 0;
    for (const auto& b : blocks) {
        std::unordered_map<std::string, std::size_t> row_of;
        row_of.reserve(b.sample_ids.size());
        for (std::size_t i = 0; i < b.sample_ids.size(); ++i) row_of[b.sample_ids[i]] = i;
        for (std::size_t i = 0; i < kept.size(); ++i) {
            const double* src = b.values.row(row_of.at(kept[i]));
            double* dst = fused.values.row(i) + offset;
            for (std::size_t j = 0; j < b.values.cols(); ++j) dst[j] = src[j];
        }
        fused.block_offsets.push_back({b.name, offset, b.values.cols()});
        offset += b.values.cols();
    }
    return fused;
}

namespace {

Matrix augment_one(const Matrix& batch, const AugmentConfig& cfg, std::uint64_t stream) {
    Rng rng(derive_seed(cfg.seed, 0xA0C, stream));
    Matrix view = batch;
    double* v = view.data();
    if (cfg.noise_std > 0.0) {
        for (std::size_t i = 0; i < view.size(); ++i) v[i] += cfg.noise_std * rng.normal();
    }
    if (cfg.mask_rate > 0.0) {
        for (std::size_t i = 0; i < view.size(); ++i) {
            if (rng.uniform01() < cfg.mask_rate) v[i] = 0.0;
        }
    }
    return view;
}

}  // namespace

std::pair<Matrix, Matrix> make_views(const Matrix& batch, const AugmentConfig& cfg) {
    cfg.validate();
    return {augment_one(batch, cfg, 1), augment_one(batch, cfg, 2)};
}

}  // namespace deduce
