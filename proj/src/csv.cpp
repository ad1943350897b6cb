#include "carma/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace carma::io {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_path_csv(const SampledPath& path, const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw std::runtime_error("cannot open for writing: " + filename);
    out << "t";
    for (Eigen::Index j = 0; j < path.d(); ++j) out << ",y" << (j + 1);
    out << "\n";
    for (Eigen::Index i = 0; i < path.n(); ++i) {
        out << format_double(static_cast<double>(i) * path.h);
        for (Eigen::Index j = 0; j < path.d(); ++j) out << "," << format_double(path.y(i, j));
        out << "\n";
    }
}

SampledPath read_path_csv(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw std::runtime_error("cannot open for reading: " + filename);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty path file: " + filename);

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw std::runtime_error("path file needs at least 2 rows: " + filename);
    const size_t cols = rows.front().size();
    if (cols < 2) throw std::runtime_error("path file needs a t column and data: " + filename);

    SampledPath path;
    path.h = rows[1][0] - rows[0][0];
    if (path.h <= 0.0) throw std::runtime_error("path file: nonincreasing time column");
    for (size_t i = 2; i < rows.size(); ++i) {
        const double dt = rows[i][0] - rows[i - 1][0];
        if (std::abs(dt - path.h) > 1e-9 * std::max(1.0, path.h))
            throw std::runtime_error("path file: grid is not equidistant");
    }
    path.y.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols) - 1);
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw std::runtime_error("path file: ragged rows");
        for (size_t j = 1; j < cols; ++j)
            path.y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - 1)) = rows[i][j];
    }
    path.model_tag = "csv:" + filename;
    return path;
}

void write_increments_csv(const RecoveredIncrements& inc, const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw std::runtime_error("cannot open for writing: " + filename);
    out << "n,t,delta_l\n";
    for (Eigen::Index i = 0; i < inc.values.size(); ++i) {
        out << (i + 1) << "," << format_double(static_cast<double>(i + 1) * inc.h_coarse) << ","
            << format_double(inc.values(i)) << "\n";
    }
}

void write_table_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows, const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw std::runtime_error("cannot open for writing: " + filename);
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
}

}  // namespace carma::io
