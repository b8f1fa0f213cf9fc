#include "risura/tensor_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace risura {

namespace {

// the build targets little-endian hosts; the format is little-endian by spec
template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("ctb: truncated file");
    return v;
}

}  // namespace

void write_ctb(const std::string& path, const std::vector<NamedTensor>& records) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("ctb: cannot open for writing: " + path);
    os.write("CTB1", 4);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(records.size()));
    for (const auto& [name, t] : records) {
        if (name.size() > 0xffff) throw std::invalid_argument("ctb: record name too long");
        put<std::uint16_t>(os, static_cast<std::uint16_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        put<std::uint8_t>(os, static_cast<std::uint8_t>(t.order()));
        for (int m = 0; m < t.order(); ++m) put<std::uint64_t>(os, static_cast<std::uint64_t>(t.dim(m)));
        for (Index i = 0; i < t.size(); ++i) {
            put<double>(os, t.vec()[i].real());
            put<double>(os, t.vec()[i].imag());
        }
    }
    if (!os) throw std::runtime_error("ctb: write failed: " + path);
}

std::vector<NamedTensor> read_ctb(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("ctb: cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "CTB1", 4) != 0)
        throw std::runtime_error("ctb: bad magic in " + path);
    const auto count = get<std::uint32_t>(is);
    std::vector<NamedTensor> out;
    out.reserve(count);
    for (std::uint32_t r = 0; r < count; ++r) {
        const auto name_len = get<std::uint16_t>(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        const auto order = get<std::uint8_t>(is);
        std::vector<Index> shape;
        Index total = 1;
        for (int m = 0; m < order; ++m) {
            const auto dim = get<std::uint64_t>(is);
            shape.push_back(static_cast<Index>(dim));
            total *= static_cast<Index>(dim);
        }
        Vector v(total);
        for (Index i = 0; i < total; ++i) {
            const double re = get<double>(is);
            const double im = get<double>(is);
            v[i] = cd(re, im);
        }
        out.emplace_back(std::move(name), ComplexTensor(std::move(shape), std::move(v)));
    }
    return out;
}

ComplexTensor matrix_to_tensor(const Matrix& m) {
    Vector v(m.size());
    Index pos = 0;
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) v[pos++] = m(i, j);
    return ComplexTensor({m.rows(), m.cols()}, std::move(v));
}

Matrix tensor_to_matrix(const ComplexTensor& t) {
    if (t.order() != 2) throw std::invalid_argument("tensor_to_matrix: order-2 tensor required");
    Matrix m(t.dim(0), t.dim(1));
    Index pos = 0;
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) m(i, j) = t.vec()[pos++];
    return m;
}

}  // namespace risura
