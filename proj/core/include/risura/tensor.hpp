#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace risura {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Dense complex multiway array. Entries are stored in one canonical linear
// order: first index fastest (the column-major analog for any order).
// vec(), unfold() and fold() all share this convention.
class ComplexTensor {
  public:
    ComplexTensor() = default;
    explicit ComplexTensor(std::vector<Index> shape);
    ComplexTensor(std::vector<Index> shape, Vector entries);

    static ComplexTensor zeros(std::vector<Index> shape);

    int order() const { return static_cast<int>(shape_.size()); }
    Index dim(int mode) const { return shape_.at(static_cast<std::size_t>(mode)); }
    const std::vector<Index>& shape() const { return shape_; }
    Index size() const { return data_.size(); }

    const Vector& vec() const { return data_; }
    Vector& vec() { return data_; }

    cd& at(const std::vector<Index>& idx) { return data_[linear_index(idx)]; }
    cd at(const std::vector<Index>& idx) const { return data_[linear_index(idx)]; }

    Index linear_index(const std::vector<Index>& idx) const;

    double norm() const { return data_.norm(); }
    double squared_norm() const { return data_.squaredNorm(); }

    ComplexTensor& operator+=(const ComplexTensor& other);
    ComplexTensor operator-(const ComplexTensor& other) const;

  private:
    std::vector<Index> shape_;
    Vector data_;
};

// Ordered factor matrices of a CP (Kruskal) representation; all factors
// share the same column count.
struct KruskalFactors {
    std::vector<Matrix> factors;

    int order() const { return static_cast<int>(factors.size()); }
    Index rank() const { return factors.empty() ? 0 : factors.front().cols(); }
    void validate() const;
};

// Mode-n unfolding (0-based mode), Kolda-Bader convention: the column index
// runs over the remaining modes with lower-numbered modes varying fastest.
Matrix unfold(const ComplexTensor& t, int mode);

// Inverse of unfold for the given mode and full tensor shape.
ComplexTensor fold(const Matrix& m, int mode, const std::vector<Index>& shape);

// Column-wise Kronecker product; column k is kron(a_k, b_k) with B's row
// index varying fastest.
Matrix khatri_rao(const Matrix& a, const Matrix& b);

// Khatri-Rao chain over all factors except `skip` (pass skip < 0 to keep
// all), in descending mode order. This is exactly the chain appearing in
// the mode-`skip` unfolding identity of a Kruskal tensor.
Matrix khatri_rao_chain_excluding(const std::vector<Matrix>& factors, int skip);

Matrix kronecker(const Matrix& a, const Matrix& b);

// Dense tensor from Kruskal factors: entry (i_1,...,i_d) = sum_k prod_m F_m(i_m, k).
ComplexTensor kruskal_reconstruct(const KruskalFactors& f);

// Expected Gram of a matrix with K independent-row structure: rows of M
// share the Hermitian covariance Sigma, so E[M^H M] = M^H M + rows * Sigma.
Matrix gram_expect(const Matrix& m, const Matrix& sigma, Index rows);

}  // namespace risura
