#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace coopgame {

using Outcome = std::uint32_t;

struct Variable {
  std::string name;
  std::size_t card = 1;

  friend bool operator==(const Variable&, const Variable&) = default;
};

/// A finite product space over named discrete variables.
///
/// Outcomes are addressed either as flat indices in [0, total_size()) or as
/// value tuples. Flat indexing is row-major with the first declared variable
/// as the most significant digit. Variable names are identifiers of at most
/// 64 characters.
class FiniteSpace {
 public:
  FiniteSpace() = default;
  explicit FiniteSpace(std::vector<Variable> variables);

  const std::vector<Variable>& variables() const { return variables_; }
  std::size_t num_variables() const { return variables_.size(); }
  std::size_t total_size() const { return total_size_; }

  /// Position of `name` in the declaration order; throws SchemaError if absent.
  std::size_t position(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::vector<std::size_t> index_to_tuple(std::size_t flat) const;
  std::size_t tuple_to_index(std::span<const std::size_t> tuple) const;

  /// 16 hex digits hashed from the canonical JSON form.
  std::string id() const;

  nlohmann::json to_json() const;
  static FiniteSpace from_json(const nlohmann::json& j);

  friend bool operator==(const FiniteSpace& a, const FiniteSpace& b) {
    return a.variables_ == b.variables_;
  }

 private:
  std::vector<Variable> variables_;
  std::vector<std::size_t> strides_;
  std::size_t total_size_ = 1;
};

}  // namespace coopgame
