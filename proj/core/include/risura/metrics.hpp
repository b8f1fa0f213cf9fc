#pragma once

#include <vector>

#include "risura/modem.hpp"
#include "risura/tensor.hpp"

namespace risura {

// Greedy column alignment of G_hat to G_true by maximum normalized
// correlation; each matched column gets its optimal complex scale, unmatched
// true columns are padded with zeros. Returns the aligned estimate with
// G_true's column count.
Matrix align_columns(const Matrix& g_true, const Matrix& g_hat);

// ||G_true - aligned(G_hat)||_F^2 / ||G_true||_F^2 (alignment removes the
// inherent CP permutation/scaling indeterminacy).
double nmse(const Matrix& g_true, const Matrix& g_hat);

double linear_to_db(double x);

// 1 - |sent messages recovered| / Ka, exact bit match.
double packet_error_rate(const std::vector<Bits>& sent, const std::vector<Bits>& decoded, int Ka);

// decoded messages that were never sent
int false_alarm_count(const std::vector<Bits>& sent, const std::vector<Bits>& decoded);

}  // namespace risura
