#include "csv.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace sgmidas::cli {

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    throw InputError("missing column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open file");
    CsvTable table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::stringstream ss(line);
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.push_back("");
        if (line_no == 1) {
            table.header = std::move(fields);
        } else {
            if (fields.size() != table.header.size()) {
                throw InputError(path + ":" + std::to_string(line_no) + ": expected " +
                                 std::to_string(table.header.size()) + " fields, found " +
                                 std::to_string(fields.size()));
            }
            table.rows.push_back(std::move(fields));
        }
    }
    if (table.header.empty()) throw InputError(path + ": empty file");
    return table;
}

double parse_double(const CsvTable& table, std::size_t row, int col, const std::string& path) {
    const std::string& s = table.rows[row][static_cast<std::size_t>(col)];
    double value = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end) {
        throw InputError(path + ":" + std::to_string(row + 2) + ": cannot parse number '" + s + "'");
    }
    return value;
}

int parse_int(const CsvTable& table, std::size_t row, int col, const std::string& path) {
    const std::string& s = table.rows[row][static_cast<std::size_t>(col)];
    int value = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw InputError(path + ":" + std::to_string(row + 2) + ": cannot parse integer '" + s + "'");
    }
    return value;
}

TargetData read_target_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int period_col = table.column("period");
    const int value_col = table.column("value");
    if (table.rows.empty()) throw InputError(path + ": no observations");

    TargetData data;
    data.first_period = parse_int(table, 0, period_col, path);
    int expected = data.first_period;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const int period = parse_int(table, r, period_col, path);
        if (period != expected) {
            throw InputError(path + ":" + std::to_string(r + 2) + ": periods must increase by 1 (expected " +
                             std::to_string(expected) + ", found " + std::to_string(period) + ")");
        }
        data.values.push_back(parse_double(table, r, value_col, path));
        ++expected;
    }
    return data;
}

std::vector<CovariateData> read_covariates_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int id_col = table.column("series_id");
    const int period_col = table.column("period");
    const int sub_col = table.column("subperiod");
    const int value_col = table.column("value");

    std::map<std::string, std::size_t> index;
    std::vector<CovariateData> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string& id = table.rows[r][static_cast<std::size_t>(id_col)];
        const int period = parse_int(table, r, period_col, path);
        const int sub = parse_int(table, r, sub_col, path);
        const double value = parse_double(table, r, value_col, path);
        if (sub < 1) {
            throw InputError(path + ":" + std::to_string(r + 2) + ": subperiod must be >= 1");
        }
        auto it = index.find(id);
        if (it == index.end()) {
            index.emplace(id, out.size());
            CovariateData series;
            series.id = id;
            series.first_period = period;
            series.first_subperiod = sub;
            series.values.push_back(value);
            out.push_back(std::move(series));
        } else {
            out[it->second].values.push_back(value);
        }
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream outfile(path, std::ios::binary);
    if (!outfile) throw InputError(path + ": cannot open for writing");
    outfile << contents;
}

}  // namespace sgmidas::cli
