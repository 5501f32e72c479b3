#include "paap/feature_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "paap/error.hpp"

namespace paap {

namespace {

void write_u32(std::ostream& out, uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff),
                 static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) |
           (static_cast<uint32_t>(b[3]) << 24);
}

Eigen::MatrixXd read_matrix_bin(const std::string& path, const char* magic,
                                uint32_t expected_cols) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    char m[6];
    in.read(m, 6);
    if (!in || std::memcmp(m, magic, 6) != 0)
        throw FormatError("bad magic in " + path);
    const uint32_t n = read_u32(in);
    const uint32_t cols = read_u32(in);
    if (cols != expected_cols)
        throw FormatError("expected " + std::to_string(expected_cols) +
                          " columns in " + path + ", got " +
                          std::to_string(cols));
    Eigen::MatrixXd out(n, cols);
    std::vector<float> row(cols);
    for (uint32_t i = 0; i < n; ++i) {
        in.read(reinterpret_cast<char*>(row.data()), cols * 4);
        if (!in) throw FormatError("truncated data in " + path);
        for (uint32_t j = 0; j < cols; ++j) out(i, j) = row[j];
    }
    return out;
}

void write_matrix_bin(const std::string& path, const char* magic,
                      const Eigen::MatrixXd& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(magic, 6);
    write_u32(out, static_cast<uint32_t>(m.rows()));
    write_u32(out, static_cast<uint32_t>(m.cols()));
    for (long i = 0; i < m.rows(); ++i)
        for (long j = 0; j < m.cols(); ++j) {
            const float v = static_cast<float>(m(i, j));
            char b[4];
            std::memcpy(b, &v, 4);
            out.write(b, 4);
        }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace

void write_features_csv(const std::string& path, const AcousticParamMatrix& d,
                        const std::string& config_digest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    if (!config_digest.empty()) out << "# config=" << config_digest << "\n";
    out << "frame";
    for (const auto& name : param_names()) out << "," << name;
    out << "\n";
    out.precision(9);
    for (int i = 0; i < d.n_frames(); ++i) {
        out << i;
        for (int k = 0; k < kNumParams; ++k) out << "," << d.values(i, k);
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

AcousticParamMatrix read_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);

    std::string line;
    // Skip comments, then the header row.
    do {
        if (!std::getline(in, line))
            throw FormatError("empty feature CSV: " + path);
    } while (!line.empty() && line[0] == '#');
    {
        std::ostringstream expected;
        expected << "frame";
        for (const auto& name : param_names()) expected << "," << name;
        if (line != expected.str())
            throw FormatError("unexpected feature CSV header in " + path);
    }

    std::vector<std::array<double, kNumParams>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        if (!std::getline(ss, cell, ','))
            throw FormatError("bad CSV row in " + path);
        std::array<double, kNumParams> row;
        for (int k = 0; k < kNumParams; ++k) {
            if (!std::getline(ss, cell, ','))
                throw FormatError("short CSV row in " + path);
            row[k] = std::stod(cell);
        }
        rows.push_back(row);
    }

    AcousticParamMatrix d;
    d.values.resize(static_cast<long>(rows.size()), kNumParams);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int k = 0; k < kNumParams; ++k) d.values(i, k) = rows[i][k];
    return d;
}

void write_features_bin(const std::string& path,
                        const AcousticParamMatrix& d) {
    write_matrix_bin(path, "PAAPD1", d.values);
}

AcousticParamMatrix read_features_bin(const std::string& path) {
    AcousticParamMatrix d;
    d.values = read_matrix_bin(path, "PAAPD1", kNumParams);
    return d;
}

void write_logits_bin(const std::string& path, const PhonemeLogits& p) {
    write_matrix_bin(path, "PAAPL1", p.values);
}

PhonemeLogits read_logits_bin(const std::string& path,
                              const PhonemeVocab& vocab) {
    PhonemeLogits p;
    p.values = read_matrix_bin(path, "PAAPL1", kNumPhonemeClasses);
    p.vocab = vocab;
    return p;
}

AcousticParamMatrix read_features(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
        return read_features_csv(path);
    return read_features_bin(path);
}

}  // namespace paap
