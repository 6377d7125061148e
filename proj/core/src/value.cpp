#include "hitset/value.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace hitset {

namespace {

const std::vector<Value>& empty_list() {
  static const std::vector<Value> kEmpty;
  return kEmpty;
}

constexpr std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Value Value::integer(std::int64_t v) {
  Value out;
  out.kind_ = Kind::Int;
  out.int_ = v;
  return out;
}

Value Value::list(std::vector<Value> items) {
  Value out;
  out.kind_ = Kind::List;
  out.list_ = std::make_shared<const std::vector<Value>>(std::move(items));
  return out;
}

Value Value::list(std::initializer_list<Value> items) {
  return list(std::vector<Value>(items));
}

std::int64_t Value::as_int() const {
  if (kind_ != Kind::Int) throw std::logic_error("value is not an integer: " + to_string());
  return int_;
}

std::span<const Value> Value::items() const {
  if (kind_ != Kind::List) throw std::logic_error("value is not a list: " + to_string());
  return list_ ? std::span<const Value>(*list_) : std::span<const Value>(empty_list());
}

const Value& Value::at(std::size_t i) const {
  auto all = items();
  if (i >= all.size()) throw std::out_of_range("value list index out of range");
  return all[i];
}

std::size_t Value::hash() const {
  switch (kind_) {
    case Kind::Bottom:
      return 0x51ed270b27fbcc1dULL;
    case Kind::Int:
      return mix(0x2545f4914f6cdd1dULL, std::hash<std::int64_t>{}(int_));
    case Kind::List: {
      std::size_t h = 0x9e3779b97f4a7c15ULL;
      for (const auto& item : items()) h = mix(h, item.hash());
      return mix(h, items().size());
    }
  }
  return 0;
}

nlohmann::json Value::to_json() const {
  switch (kind_) {
    case Kind::Bottom:
      return nullptr;
    case Kind::Int:
      return int_;
    case Kind::List: {
      auto arr = nlohmann::json::array();
      for (const auto& item : items()) arr.push_back(item.to_json());
      return arr;
    }
  }
  return nullptr;
}

Value Value::from_json(const nlohmann::json& j) {
  if (j.is_null()) return Value{};
  if (j.is_number_integer()) return integer(j.get<std::int64_t>());
  if (j.is_array()) {
    std::vector<Value> items;
    items.reserve(j.size());
    for (const auto& item : j) items.push_back(from_json(item));
    return list(std::move(items));
  }
  throw std::invalid_argument("values must be null, integers or arrays: " + j.dump());
}

std::string Value::to_string() const { return to_json().dump(); }

bool operator==(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Value::Kind::Bottom:
      return true;
    case Value::Kind::Int:
      return a.int_ == b.int_;
    case Value::Kind::List: {
      if (a.list_ == b.list_) return true;
      auto x = a.items();
      auto y = b.items();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] == y[i])) return false;
      }
      return true;
    }
  }
  return false;
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
  switch (a.kind_) {
    case Value::Kind::Bottom:
      return std::strong_ordering::equal;
    case Value::Kind::Int:
      return a.int_ <=> b.int_;
    case Value::Kind::List: {
      auto x = a.items();
      auto y = b.items();
      for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        auto c = x[i] <=> y[i];
        if (c != 0) return c;
      }
      return x.size() <=> y.size();
    }
  }
  return std::strong_ordering::equal;
}

}  // namespace hitset
