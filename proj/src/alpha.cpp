#include "coopgame/alpha.hpp"

#include <cmath>
#include <string>

#include "coopgame/errors.hpp"

namespace coopgame {

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size())
      throw ValidationError("alpha row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                            " entries, expected " + std::to_string(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

AlphaMatrix::AlphaMatrix(Matrix entries, bool allow_zero_diagonal)
    : entries_(std::move(entries)), allow_zero_diagonal_(allow_zero_diagonal) {
  const std::size_t n = entries_.rows();
  if (n == 0 || entries_.cols() != n) throw ValidationError("alpha must be a non-empty square matrix");
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double a = entries_(i, j);
      if (!(a >= 0.0 && a <= 1.0))
        throw ValidationError("alpha entry (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") is outside [0, 1]");
      sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ValidationError("alpha row " + std::to_string(i) + " sums to " + std::to_string(sum) +
                            ", expected 1");
    if (!allow_zero_diagonal_ && !(entries_(i, i) > 0.0))
      throw ValidationError("alpha diagonal entry " + std::to_string(i) +
                            " is zero (set allow_zero_diagonal for data-free players)");
  }
}

AlphaMatrix::AlphaMatrix(std::vector<std::vector<double>> rows, bool allow_zero_diagonal)
    : AlphaMatrix(from_rows(rows), allow_zero_diagonal) {}

AlphaMatrix AlphaMatrix::identity(std::size_t n) { return AlphaMatrix(Matrix::identity(n)); }

AlphaMatrix AlphaMatrix::symmetric(std::size_t n, double diag) {
  if (n == 1) return identity(1);
  Matrix m(n, n, (1.0 - diag) / static_cast<double>(n - 1));
  for (std::size_t i = 0; i < n; ++i) m(i, i) = diag;
  return AlphaMatrix(std::move(m));
}

nlohmann::json AlphaMatrix::to_json() const {
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < n_players(); ++i) {
    auto r = row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

AlphaMatrix AlphaMatrix::from_json(const nlohmann::json& j, bool allow_zero_diagonal) {
  if (!j.is_array()) throw ValidationError("alpha must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw ValidationError("alpha row must be an array of numbers");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw ValidationError("alpha entries must be numbers");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return AlphaMatrix(std::move(rows), allow_zero_diagonal);
}

AlphaSplit alpha_split(const AlphaMatrix& alpha) {
  const std::size_t n = alpha.n_players();
  AlphaSplit s{Matrix(n, n), Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) (i == j ? s.own : s.peers)(i, j) = alpha(i, j);
  return s;
}

}  // namespace coopgame
