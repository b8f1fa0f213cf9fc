#include "risura/tensor.hpp"

#include <numeric>
#include <stdexcept>

namespace risura {

namespace {

Index shape_product(const std::vector<Index>& shape) {
    Index n = 1;
    for (Index s : shape) {
        if (s <= 0) throw std::invalid_argument("tensor mode sizes must be positive");
        n *= s;
    }
    return n;
}

}  // namespace

ComplexTensor::ComplexTensor(std::vector<Index> shape)
    : shape_(std::move(shape)), data_(Vector::Zero(shape_product(shape_))) {}

ComplexTensor::ComplexTensor(std::vector<Index> shape, Vector entries)
    : shape_(std::move(shape)), data_(std::move(entries)) {
    if (data_.size() != shape_product(shape_))
        throw std::invalid_argument("entry count does not match tensor shape");
}

ComplexTensor ComplexTensor::zeros(std::vector<Index> shape) {
    return ComplexTensor(std::move(shape));
}

Index ComplexTensor::linear_index(const std::vector<Index>& idx) const {
    if (idx.size() != shape_.size()) throw std::invalid_argument("index order mismatch");
    Index lin = 0;
    Index stride = 1;
    for (std::size_t m = 0; m < shape_.size(); ++m) {
        if (idx[m] < 0 || idx[m] >= shape_[m]) throw std::out_of_range("tensor index out of range");
        lin += idx[m] * stride;
        stride *= shape_[m];
    }
    return lin;
}

ComplexTensor& ComplexTensor::operator+=(const ComplexTensor& other) {
    if (shape_ != other.shape_) throw std::invalid_argument("tensor shape mismatch");
    data_ += other.data_;
    return *this;
}

ComplexTensor ComplexTensor::operator-(const ComplexTensor& other) const {
    if (shape_ != other.shape_) throw std::invalid_argument("tensor shape mismatch");
    return ComplexTensor(shape_, data_ - other.data_);
}

void KruskalFactors::validate() const {
    if (factors.empty()) throw std::invalid_argument("KruskalFactors is empty");
    const Index r = factors.front().cols();
    for (const auto& f : factors)
        if (f.cols() != r) throw std::invalid_argument("factor column counts differ");
}

Matrix unfold(const ComplexTensor& t, int mode) {
    const int d = t.order();
    if (mode < 0 || mode >= d) throw std::out_of_range("unfold: mode out of range");

    const Index rows = t.dim(mode);
    const Index cols = t.size() / rows;
    Matrix out(rows, cols);

    // Strides of the canonical (first-index-fastest) layout.
    std::vector<Index> stride(static_cast<std::size_t>(d));
    Index s = 1;
    for (int m = 0; m < d; ++m) {
        stride[static_cast<std::size_t>(m)] = s;
        s *= t.dim(m);
    }

    const Index mode_stride = stride[static_cast<std::size_t>(mode)];
    const Index inner = mode_stride;                    // product of dims below mode
    const Index outer = t.size() / (inner * rows);      // product of dims above mode

    // Column index = inner part (lower modes, fastest) then outer part.
    const Vector& v = t.vec();
    for (Index o = 0; o < outer; ++o)
        for (Index r = 0; r < rows; ++r)
            for (Index i = 0; i < inner; ++i)
                out(r, o * inner + i) = v[o * inner * rows + r * inner + i];
    return out;
}

ComplexTensor fold(const Matrix& m, int mode, const std::vector<Index>& shape) {
    const int d = static_cast<int>(shape.size());
    if (mode < 0 || mode >= d) throw std::out_of_range("fold: mode out of range");
    const Index total = shape_product(shape);
    if (m.rows() != shape[static_cast<std::size_t>(mode)] || m.rows() * m.cols() != total)
        throw std::invalid_argument("fold: matrix dimensions inconsistent with shape");

    Index inner = 1;
    for (int j = 0; j < mode; ++j) inner *= shape[static_cast<std::size_t>(j)];
    const Index rows = m.rows();
    const Index outer = total / (inner * rows);

    Vector v(total);
    for (Index o = 0; o < outer; ++o)
        for (Index r = 0; r < rows; ++r)
            for (Index i = 0; i < inner; ++i)
                v[o * inner * rows + r * inner + i] = m(r, o * inner + i);
    return ComplexTensor(shape, std::move(v));
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("khatri_rao: column-count mismatch");
    Matrix out(a.rows() * b.rows(), a.cols());
    for (Index k = 0; k < a.cols(); ++k)
        for (Index ia = 0; ia < a.rows(); ++ia)
            out.block(ia * b.rows(), k, b.rows(), 1) = a(ia, k) * b.col(k);
    return out;
}

Matrix khatri_rao_chain_excluding(const std::vector<Matrix>& factors, int skip) {
    Matrix out;
    bool first = true;
    for (int m = static_cast<int>(factors.size()) - 1; m >= 0; --m) {
        if (m == skip) continue;
        const Matrix& f = factors[static_cast<std::size_t>(m)];
        if (first) {
            out = f;
            first = false;
        } else {
            out = khatri_rao(out, f);
        }
    }
    if (first) throw std::invalid_argument("khatri_rao_chain: no factors left");
    return out;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexTensor kruskal_reconstruct(const KruskalFactors& f) {
    f.validate();
    std::vector<Index> shape;
    shape.reserve(f.factors.size());
    for (const auto& m : f.factors) shape.push_back(m.rows());

    if (f.order() == 1) {
        Vector v = f.factors.front().rowwise().sum();
        return ComplexTensor(shape, std::move(v));
    }
    const Matrix chain = khatri_rao_chain_excluding(f.factors, 0);
    const Matrix m0 = f.factors.front() * chain.transpose();
    return fold(m0, 0, shape);
}

Matrix gram_expect(const Matrix& m, const Matrix& sigma, Index rows) {
    if (sigma.rows() != sigma.cols() || sigma.rows() != m.cols())
        throw std::invalid_argument("gram_expect: dimension mismatch");
    return m.adjoint() * m + static_cast<double>(rows) * sigma;
}

}  // namespace risura
