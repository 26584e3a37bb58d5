#include "coopgame/space.hpp"

#include <limits>
#include <regex>
#include <set>

#include "coopgame/errors.hpp"

namespace coopgame {

FiniteSpace::FiniteSpace(std::vector<Variable> variables)
    : variables_(std::move(variables)) {
  if (variables_.empty()) throw SchemaError("space must declare at least one variable");
  std::set<std::string> seen;
  // Identifier-like names keep a space description from doubling as a data channel.
  static const std::regex name_re("^[A-Za-z_][A-Za-z0-9_.-]{0,63}$");
  for (const auto& v : variables_) {
    if (!std::regex_match(v.name, name_re)) throw SchemaError("variable name '" + v.name + "' is not an identifier");
    if (v.card < 1) throw SchemaError("variable '" + v.name + "' has cardinality 0");
    if (!seen.insert(v.name).second) throw SchemaError("duplicate variable name '" + v.name + "'");
  }
  strides_.assign(variables_.size(), 1);
  total_size_ = 1;
  for (std::size_t k = variables_.size(); k-- > 0;) {
    strides_[k] = total_size_;
    if (total_size_ > std::numeric_limits<Outcome>::max() / variables_[k].card)
      throw SchemaError("space too large for 32-bit outcome indices");
    total_size_ *= variables_[k].card;
  }
}

std::size_t FiniteSpace::position(const std::string& name) const {
  for (std::size_t k = 0; k < variables_.size(); ++k)
    if (variables_[k].name == name) return k;
  throw SchemaError("variable '" + name + "' is not part of the space");
}

bool FiniteSpace::contains(const std::string& name) const {
  for (const auto& v : variables_)
    if (v.name == name) return true;
  return false;
}

std::vector<std::size_t> FiniteSpace::index_to_tuple(std::size_t flat) const {
  if (flat >= total_size_)
    throw RangeError("flat index " + std::to_string(flat) + " out of range [0, " +
                     std::to_string(total_size_) + ")");
  std::vector<std::size_t> tuple(variables_.size());
  for (std::size_t k = 0; k < variables_.size(); ++k) {
    tuple[k] = flat / strides_[k];
    flat %= strides_[k];
  }
  return tuple;
}

std::size_t FiniteSpace::tuple_to_index(std::span<const std::size_t> tuple) const {
  if (tuple.size() != variables_.size())
    throw RangeError("tuple has " + std::to_string(tuple.size()) + " values, space has " +
                     std::to_string(variables_.size()) + " variables");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < tuple.size(); ++k) {
    if (tuple[k] >= variables_[k].card)
      throw RangeError("value " + std::to_string(tuple[k]) + " out of range for variable '" +
                       variables_[k].name + "'");
    flat += tuple[k] * strides_[k];
  }
  return flat;
}

std::string FiniteSpace::id() const {
  // FNV-1a over the canonical JSON, rendered as 16 hex digits.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json().dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k, h >>= 4) out[static_cast<std::size_t>(k)] = kHex[h & 0xf];
  return out;
}

nlohmann::json FiniteSpace::to_json() const {
  auto vars = nlohmann::json::array();
  for (const auto& v : variables_) vars.push_back({{"name", v.name}, {"card", v.card}});
  return {{"variables", vars}};
}

FiniteSpace FiniteSpace::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("variables") || !j["variables"].is_array())
    throw SchemaError("space must be an object with a 'variables' array");
  std::vector<Variable> vars;
  for (const auto& v : j["variables"]) {
    if (!v.is_object() || !v.contains("name") || !v["name"].is_string() || !v.contains("card") ||
        !v["card"].is_number_integer() || v["card"].get<long long>() < 1)
      throw SchemaError("space variable must be {\"name\": string, \"card\": integer >= 1}");
    vars.push_back({v["name"].get<std::string>(), v["card"].get<std::size_t>()});
  }
  return FiniteSpace(std::move(vars));
}

}  // namespace coopgame
