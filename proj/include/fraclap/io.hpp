#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace fraclap {

// 17-significant-digit decimal rendering; fixed format so identical inputs
// reproduce byte-identical files.
std::string format_g17(double v);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

// Header lines carried by every output file: tool version, config hash, seed.
std::string file_header(const std::string& config_hash, unsigned long long seed);

class CsvWriter {
public:
    CsvWriter(std::string path, std::string header_block, std::vector<std::string> columns);
    void row(const std::vector<std::string>& cells);
    void row_numeric(const std::vector<double>& cells);
    void close();
    ~CsvWriter();

private:
    std::string path_;
    std::string buffer_;
    int n_cols_;
    bool closed_ = false;
};

// Coordinate-format text export: "i j value" per nonzero with header lines.
void export_matrix_coordinate(const std::string& path, const Eigen::MatrixXd& m,
                              const std::string& header_block, double drop_tol = 0.0);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace fraclap
