#include "hitset/process_set.hpp"

#include <sstream>
#include <stdexcept>

namespace hitset {

namespace {

void check_id(int id) {
  if (id < 0 || id >= ProcessSet::kMaxProcesses) {
    throw std::out_of_range("process id out of range: " + std::to_string(id));
  }
}

}  // namespace

ProcessSet::ProcessSet(std::initializer_list<int> ids) {
  for (int id : ids) insert(id);
}

ProcessSet::ProcessSet(const std::vector<int>& ids) {
  for (int id : ids) insert(id);
}

ProcessSet ProcessSet::full(int n) {
  if (n < 0 || n > kMaxProcesses) throw std::out_of_range("process count out of range");
  if (n == kMaxProcesses) return from_bits(~std::uint64_t{0});
  return from_bits((std::uint64_t{1} << n) - 1);
}

bool ProcessSet::contains(int id) const {
  if (id < 0 || id >= kMaxProcesses) return false;
  return (bits_ >> id) & 1U;
}

int ProcessSet::max_member() const {
  if (bits_ == 0) return -1;
  return kMaxProcesses - 1 - std::countl_zero(bits_);
}

void ProcessSet::insert(int id) {
  check_id(id);
  bits_ |= std::uint64_t{1} << id;
}

void ProcessSet::erase(int id) {
  check_id(id);
  bits_ &= ~(std::uint64_t{1} << id);
}

std::vector<int> ProcessSet::members() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (std::uint64_t rest = bits_; rest != 0; rest &= rest - 1) {
    out.push_back(std::countr_zero(rest));
  }
  return out;
}

std::string ProcessSet::to_string() const {
  std::string out = "{";
  bool first = true;
  for (int id : members()) {
    if (!first) out += ',';
    out += std::to_string(id);
    first = false;
  }
  out += '}';
  return out;
}

std::strong_ordering operator<=>(ProcessSet a, ProcessSet b) {
  // Walk both member lists in ascending order; the first difference decides.
  std::uint64_t x = a.bits_;
  std::uint64_t y = b.bits_;
  while (x != 0 && y != 0) {
    int ix = std::countr_zero(x);
    int iy = std::countr_zero(y);
    if (ix != iy) return ix <=> iy;
    x &= x - 1;
    y &= y - 1;
  }
  if (x == 0 && y == 0) return std::strong_ordering::equal;
  return x == 0 ? std::strong_ordering::less : std::strong_ordering::greater;
}

ProcessSet parse_process_list(const std::string& text) {
  ProcessSet out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    auto last = item.find_last_not_of(" \t");
    std::string token = item.substr(first, last - first + 1);
    std::size_t used = 0;
    int id = std::stoi(token, &used);
    if (used != token.size()) throw std::invalid_argument("bad process id: " + token);
    if (id < 0 || id >= ProcessSet::kMaxProcesses) {
      throw std::invalid_argument("process id out of range: " + token);
    }
    out.insert(id);
  }
  return out;
}

}  // namespace hitset
