#include "fraclap/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fraclap/version.hpp"

namespace fraclap {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string file_header(const std::string& config_hash, unsigned long long seed) {
    std::ostringstream os;
    os << "# fraclap " << kVersion << "\n";
    os << "# config " << config_hash << "\n";
    os << "# seed " << seed << "\n";
    return os.str();
}

CsvWriter::CsvWriter(std::string path, std::string header_block, std::vector<std::string> columns)
    : path_(std::move(path)), n_cols_(static_cast<int>(columns.size())) {
    buffer_ = std::move(header_block);
    for (size_t i = 0; i < columns.size(); ++i) {
        buffer_ += columns[i];
        buffer_ += (i + 1 < columns.size()) ? "," : "\n";
    }
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (static_cast<int>(cells.size()) != n_cols_)
        throw std::invalid_argument("CsvWriter: column count mismatch");
    for (size_t i = 0; i < cells.size(); ++i) {
        buffer_ += cells[i];
        buffer_ += (i + 1 < cells.size()) ? "," : "\n";
    }
}

void CsvWriter::row_numeric(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(format_g17(v));
    row(s);
}

void CsvWriter::close() {
    if (closed_) return;
    write_text_file(path_, buffer_);
    closed_ = true;
}

CsvWriter::~CsvWriter() {
    try {
        close();
    } catch (...) {
    }
}

void export_matrix_coordinate(const std::string& path, const Eigen::MatrixXd& m,
                              const std::string& header_block, double drop_tol) {
    std::string out = header_block;
    out += "# rows " + std::to_string(m.rows()) + " cols " + std::to_string(m.cols()) + "\n";
    for (long i = 0; i < m.rows(); ++i)
        for (long j = 0; j < m.cols(); ++j)
            if (std::abs(m(i, j)) > drop_tol)
                out += std::to_string(i) + " " + std::to_string(j) + " " + format_g17(m(i, j)) +
                       "\n";
    write_text_file(path, out);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace fraclap
