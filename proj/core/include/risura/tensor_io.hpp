#pragma once

#include <string>
#include <utility>
#include <vector>

#include "risura/tensor.hpp"

namespace risura {

// "CTB1" container: a flat list of named complex arrays.
//
//   bytes 0..3   magic "CTB1"
//   u32          record count
//   per record:
//     u16        name length, then name bytes (no terminator)
//     u8         order (number of modes)
//     u64[order] mode sizes
//     f64 pairs  re,im per entry, first index fastest
//
// All integers and doubles are little-endian.
using NamedTensor = std::pair<std::string, ComplexTensor>;

void write_ctb(const std::string& path, const std::vector<NamedTensor>& records);
std::vector<NamedTensor> read_ctb(const std::string& path);

ComplexTensor matrix_to_tensor(const Matrix& m);
Matrix tensor_to_matrix(const ComplexTensor& t);

}  // namespace risura
