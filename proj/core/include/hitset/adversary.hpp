#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hitset/errors.hpp"
#include "hitset/process_set.hpp"

namespace hitset {

/// A superset-closed adversary over processes 0..n-1, given by its live sets.
///
/// Only the inclusion-minimal live sets are stored (sorted
/// lexicographically); any superset of a stored set is live.
class Adversary {
 public:
  /// Throws InvalidParameter if `live_sets` is empty, a set is empty, or an
  /// id is >= n.
  Adversary(int n, std::vector<ProcessSet> live_sets);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] const std::vector<ProcessSet>& live_sets() const { return live_sets_; }
  [[nodiscard]] ProcessSet universe() const { return ProcessSet::full(n_); }

  /// True iff `s` contains some live set.
  [[nodiscard]] bool contains_live_set(ProcessSet s) const;

  /// Live sets contained in `universe`: the system (universe, L).
  [[nodiscard]] std::vector<ProcessSet> restriction(ProcessSet universe) const;

  /// `{"n": 4, "live_sets": [[0,1],[2,3]]}`. Throws ConfigError.
  static Adversary from_json(const nlohmann::json& spec);
  [[nodiscard]] nlohmann::json to_json() const;

  friend bool operator==(const Adversary&, const Adversary&) = default;

 private:
  int n_;
  std::vector<ProcessSet> live_sets_;
};

struct HittingSetResult {
  int h = 0;
  /// Every minimum-cardinality hitting set, in lexicographic order.
  std::vector<ProcessSet> witnesses;
};

/// Exact minimum hitting sets of the restriction (universe, L).
/// Throws EmptyRestriction when no live set lies inside `universe`, and
/// InvalidParameter when `universe` has ids >= n.
HittingSetResult min_hitting_sets(const Adversary& adv, ProcessSet universe);

/// h(universe, L); same errors as min_hitting_sets.
int hitting_set_size(const Adversary& adv, ProcessSet universe);

/// Lexicographically smallest minimum hitting set of (participants, L).
ProcessSet resolver_set_for(const Adversary& adv, ProcessSet participants);

/// True iff some live set is a subset of `correct`.
bool is_l_resilient(const Adversary& adv, ProcessSet correct);

/// Live sets = all (n-t)-subsets. Throws InvalidParameter unless 0 <= t < n.
Adversary t_resilient_adversary(int n, int t);

}  // namespace hitset
