#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace hitset {

/// Immutable register payload: bottom (the initial register content), an
/// integer, or a list of values. Lists share storage, so copies are cheap.
///
/// Protocols encode their own tagged records as lists; JSON form is
/// null / number / array.
class Value {
 public:
  enum class Kind : std::uint8_t { Bottom, Int, List };

  Value() = default;

  static Value integer(std::int64_t v);
  static Value list(std::vector<Value> items);
  static Value list(std::initializer_list<Value> items);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool is_bottom() const { return kind_ == Kind::Bottom; }
  [[nodiscard]] bool is_int() const { return kind_ == Kind::Int; }
  [[nodiscard]] bool is_list() const { return kind_ == Kind::List; }

  /// Throws std::logic_error on kind mismatch.
  [[nodiscard]] std::int64_t as_int() const;
  [[nodiscard]] std::span<const Value> items() const;
  [[nodiscard]] const Value& at(std::size_t i) const;

  [[nodiscard]] std::size_t hash() const;

  [[nodiscard]] nlohmann::json to_json() const;
  static Value from_json(const nlohmann::json& j);
  /// Compact JSON text.
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b);
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

 private:
  Kind kind_ = Kind::Bottom;
  std::int64_t int_ = 0;
  std::shared_ptr<const std::vector<Value>> list_;
};

struct ValueHash {
  std::size_t operator()(const Value& v) const { return v.hash(); }
};

inline std::ostream& operator<<(std::ostream& os, const Value& v) { return os << v.to_string(); }

}  // namespace hitset
