#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ecrom::io {

/// Little-endian binary writer for the artifact file formats.
class BinaryWriter {
public:
    explicit BinaryWriter(const std::string& path);
    void magic(std::string_view tag);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void f64s(const double* data, std::size_t n);
    void matrix(const Eigen::MatrixXd& m) { f64s(m.data(), std::size_t(m.size())); }
    void vector(const Eigen::VectorXd& v) { f64s(v.data(), std::size_t(v.size())); }
    void close();

private:
    std::ofstream out_;
    std::string path_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::string& path);
    /// Throws if the next bytes are not the given tag.
    void expect_magic(std::string_view tag);
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    void f64s(double* data, std::size_t n);
    Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols);
    Eigen::VectorXd vector(Eigen::Index n);

private:
    void read_raw(char* dst, std::size_t n);
    std::ifstream in_;
    std::string path_;
};

bool file_exists(const std::string& path);

}  // namespace ecrom::io
