#include "ecrom/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <filesystem>
#include <stdexcept>

namespace ecrom::io {

namespace {

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        char bytes[sizeof(T)];
        std::memcpy(bytes, &v, sizeof(T));
        std::reverse(bytes, bytes + sizeof(T));
        std::memcpy(&v, bytes, sizeof(T));
    }
    return v;
}

}  // namespace

BinaryWriter::BinaryWriter(const std::string& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
}

void BinaryWriter::magic(std::string_view tag) { out_.write(tag.data(), std::streamsize(tag.size())); }

void BinaryWriter::u32(std::uint32_t v) {
    v = to_little(v);
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void BinaryWriter::u64(std::uint64_t v) {
    v = to_little(v);
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void BinaryWriter::f64(double v) {
    v = to_little(v);
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void BinaryWriter::f64s(const double* data, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        out_.write(reinterpret_cast<const char*>(data), std::streamsize(n * sizeof(double)));
    } else {
        for (std::size_t i = 0; i < n; ++i) f64(data[i]);
    }
}

void BinaryWriter::close() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed: " + path_);
}

BinaryReader::BinaryReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw std::runtime_error("cannot open for reading: " + path);
}

void BinaryReader::read_raw(char* dst, std::size_t n) {
    in_.read(dst, std::streamsize(n));
    if (!in_) throw std::runtime_error("truncated file: " + path_);
}

void BinaryReader::expect_magic(std::string_view tag) {
    std::string got(tag.size(), '\0');
    read_raw(got.data(), got.size());
    if (got != tag) throw std::runtime_error("bad magic in " + path_ + ", expected " + std::string(tag));
}

std::uint32_t BinaryReader::u32() {
    std::uint32_t v;
    read_raw(reinterpret_cast<char*>(&v), sizeof v);
    return to_little(v);
}

std::uint64_t BinaryReader::u64() {
    std::uint64_t v;
    read_raw(reinterpret_cast<char*>(&v), sizeof v);
    return to_little(v);
}

double BinaryReader::f64() {
    double v;
    read_raw(reinterpret_cast<char*>(&v), sizeof v);
    return to_little(v);
}

void BinaryReader::f64s(double* data, std::size_t n) {
    read_raw(reinterpret_cast<char*>(data), n * sizeof(double));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < n; ++i) data[i] = to_little(data[i]);
}

Eigen::MatrixXd BinaryReader::matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    f64s(m.data(), std::size_t(m.size()));
    return m;
}

Eigen::VectorXd BinaryReader::vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    f64s(v.data(), std::size_t(n));
    return v;
}

bool file_exists(const std::string& path) { return std::filesystem::is_regular_file(path); }

}  // namespace ecrom::io
