#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "coopgame/matrix.hpp"

// Inner loops of the solvers and models. Every kernel exists twice:
//
//   serial::   straightforward loops, kept as the reference implementation
//   parallel:: OpenMP versions used by the library
//
// Parallel reductions split the index range into fixed chunks (kChunk
// elements, more when each partial is a wide vector) and combine the partial
// results in chunk order, so their output does not depend on the thread count. Element-wise kernels are bit-identical
// to their serial counterparts; reductions agree to rounding.
namespace coopgame::kernels {

/// Compressed sparse rows: row k holds cols[offsets[k] .. offsets[k+1]).
struct SparseRows {
  std::span<const std::size_t> offsets;
  std::span<const std::uint32_t> cols;
  std::span<const double> values;
  std::size_t dim = 0;

  std::size_t rows() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

inline constexpr std::size_t kChunk = 1024;
// Below this many outcomes the OpenMP regions run on a single thread.
inline constexpr std::size_t kParallelThreshold = 4096;

namespace serial {

/// out(i, :) = sum_j weights(i, j) * rows(j, :), rows stored row-major N x K.
void mix_rows(const Matrix& weights, std::span<const double> rows, std::size_t width,
              std::span<double> out);

/// One sweep of p' = diag(own) pi + peers p, every block N x K row-major.
void fixed_point_step(std::span<const double> own, const Matrix& peers, std::span<const double> pi,
                      std::span<const double> p, std::size_t width, std::span<double> out);

/// out(k) = <features(k, :), theta>.
void logits(const SparseRows& features, std::span<const double> theta, std::span<double> out);

/// out(f) = sum_k probs(k) * features(k, f).
void moments(const SparseRows& features, std::span<const double> probs, std::span<double> out);

/// log sum_k exp(v(k)) with max subtraction; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> v);

/// out(index(k)) += values(k).
void scatter_add(std::span<const double> values, std::span<const std::uint32_t> index,
                 std::span<double> out);

}  // namespace serial

namespace parallel {

void mix_rows(const Matrix& weights, std::span<const double> rows, std::size_t width,
              std::span<double> out);
void fixed_point_step(std::span<const double> own, const Matrix& peers, std::span<const double> pi,
                      std::span<const double> p, std::size_t width, std::span<double> out);
void logits(const SparseRows& features, std::span<const double> theta, std::span<double> out);
void moments(const SparseRows& features, std::span<const double> probs, std::span<double> out);
double log_sum_exp(std::span<const double> v);
void scatter_add(std::span<const double> values, std::span<const std::uint32_t> index,
                 std::span<double> out);

}  // namespace parallel

/// Number of OpenMP threads available, 1 when built without OpenMP.
int max_threads();

}  // namespace coopgame::kernels
