#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace hitset {

/// A set of process ids drawn from 0..63, stored as a bitmask.
///
/// Ordering is lexicographic on the ascending member lists, so that
/// {0,3} < {1} and {0,2} < {0,2,3}. That order is used everywhere a
/// deterministic tie-break among sets is needed.
class ProcessSet {
 public:
  static constexpr int kMaxProcesses = 64;

  constexpr ProcessSet() = default;
  ProcessSet(std::initializer_list<int> ids);
  explicit ProcessSet(const std::vector<int>& ids);

  static constexpr ProcessSet from_bits(std::uint64_t bits) {
    ProcessSet s;
    s.bits_ = bits;
    return s;
  }
  /// {0, ..., n-1}
  static ProcessSet full(int n);

  [[nodiscard]] constexpr std::uint64_t bits() const { return bits_; }
  [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
  [[nodiscard]] constexpr int size() const { return std::popcount(bits_); }
  [[nodiscard]] bool contains(int id) const;
  /// Largest member, or -1 for the empty set.
  [[nodiscard]] int max_member() const;

  void insert(int id);
  void erase(int id);

  [[nodiscard]] constexpr bool subset_of(ProcessSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  [[nodiscard]] constexpr bool intersects(ProcessSet other) const {
    return (bits_ & other.bits_) != 0;
  }

  [[nodiscard]] std::vector<int> members() const;
  /// "{0,2,3}"
  [[nodiscard]] std::string to_string() const;

  friend constexpr ProcessSet operator|(ProcessSet a, ProcessSet b) {
    return from_bits(a.bits_ | b.bits_);
  }
  friend constexpr ProcessSet operator&(ProcessSet a, ProcessSet b) {
    return from_bits(a.bits_ & b.bits_);
  }
  friend constexpr ProcessSet operator-(ProcessSet a, ProcessSet b) {
    return from_bits(a.bits_ & ~b.bits_);
  }
  friend constexpr bool operator==(ProcessSet a, ProcessSet b) = default;
  friend std::strong_ordering operator<=>(ProcessSet a, ProcessSet b);

 private:
  std::uint64_t bits_ = 0;
};

/// Parses "0,1,2" (whitespace tolerated). Throws std::invalid_argument.
ProcessSet parse_process_list(const std::string& text);

inline std::ostream& operator<<(std::ostream& os, const ProcessSet& v) { return os << v.to_string(); }

}  // namespace hitset
