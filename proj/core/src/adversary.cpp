#include "hitset/adversary.hpp"

#include <algorithm>
#include <functional>

#include <nlohmann/json.hpp>

namespace hitset {

Adversary::Adversary(int n, std::vector<ProcessSet> live_sets) : n_(n) {
  if (n < 1 || n > ProcessSet::kMaxProcesses) {
    throw InvalidParameter("process count must be in 1.." +
                           std::to_string(ProcessSet::kMaxProcesses));
  }
  if (live_sets.empty()) throw InvalidParameter("adversary needs at least one live set");
  const ProcessSet all = ProcessSet::full(n);
  for (const auto& s : live_sets) {
    if (s.empty()) throw InvalidParameter("live sets must be nonempty");
    if (!s.subset_of(all)) throw InvalidParameter("live set " + s.to_string() + " has ids >= n");
  }
  std::sort(live_sets.begin(), live_sets.end(),
            [](ProcessSet a, ProcessSet b) { return a.size() < b.size() || (a.size() == b.size() && a < b); });
  live_sets.erase(std::unique(live_sets.begin(), live_sets.end()), live_sets.end());
  // Keep inclusion-minimal sets only. Sorted by size, so any subset of a set
  // is already in live_sets_ when that set is examined.
  for (const auto& s : live_sets) {
    bool redundant = std::any_of(live_sets_.begin(), live_sets_.end(),
                                 [&](ProcessSet kept) { return kept.subset_of(s); });
    if (!redundant) live_sets_.push_back(s);
  }
  std::sort(live_sets_.begin(), live_sets_.end());
}

bool Adversary::contains_live_set(ProcessSet s) const {
  return std::any_of(live_sets_.begin(), live_sets_.end(),
                     [&](ProcessSet live) { return live.subset_of(s); });
}

std::vector<ProcessSet> Adversary::restriction(ProcessSet universe) const {
  std::vector<ProcessSet> out;
  for (const auto& s : live_sets_) {
    if (s.subset_of(universe)) out.push_back(s);
  }
  return out;
}

Adversary Adversary::from_json(const nlohmann::json& spec) {
  try {
    if (!spec.is_object()) throw ConfigError("adversary spec must be a JSON object");
    if (!spec.contains("n") || !spec.at("n").is_number_integer()) {
      throw ConfigError("adversary spec needs integer field \"n\"");
    }
    if (!spec.contains("live_sets") || !spec.at("live_sets").is_array()) {
      throw ConfigError("adversary spec needs array field \"live_sets\"");
    }
    const int n = spec.at("n").get<int>();
    std::vector<ProcessSet> sets;
    for (const auto& entry : spec.at("live_sets")) {
      if (!entry.is_array()) throw ConfigError("each live set must be an array of ids");
      ProcessSet s;
      for (const auto& id : entry) {
        if (!id.is_number_integer()) throw ConfigError("process ids must be integers");
        const int v = id.get<int>();
        if (v < 0 || v >= n) throw ConfigError("process id " + std::to_string(v) + " out of range");
        s.insert(v);
      }
      sets.push_back(s);
    }
    return Adversary(n, std::move(sets));
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
}

nlohmann::json Adversary::to_json() const {
  nlohmann::json sets = nlohmann::json::array();
  for (const auto& s : live_sets_) sets.push_back(s.members());
  return {{"n", n_}, {"live_sets", sets}};
}

namespace {

// Enumerates k-combinations of `candidates` in lexicographic order, keeping
// those that hit every set in `system`.
class HittingSetSearch {
 public:
  HittingSetSearch(const std::vector<ProcessSet>& system, std::vector<int> candidates)
      : system_(system), candidates_(std::move(candidates)) {
    max_of_.reserve(system_.size());
    for (const auto& s : system_) max_of_.push_back(s.max_member());
  }

  std::vector<ProcessSet> witnesses_of_size(int k) {
    found_.clear();
    std::vector<char> hit(system_.size(), 0);
    extend(0, k, ProcessSet{}, hit, 0);
    return found_;
  }

 private:
  void extend(std::size_t start, int slots, ProcessSet chosen, std::vector<char>& hit, std::size_t hit_count) {
    if (hit_count == system_.size()) {
      if (slots == 0) found_.push_back(chosen);
      return;
    }
    if (slots == 0) return;
    // An unhit set whose largest member precedes every remaining candidate
    // can no longer be hit.
    const int next_min = start < candidates_.size() ? candidates_[start] : ProcessSet::kMaxProcesses;
    for (std::size_t i = 0; i < system_.size(); ++i) {
      if (!hit[i] && max_of_[i] < next_min) return;
    }
    if (candidates_.size() - start < static_cast<std::size_t>(slots)) return;

    for (std::size_t c = start; c < candidates_.size(); ++c) {
      const int id = candidates_[c];
      std::vector<std::size_t> newly;
      for (std::size_t i = 0; i < system_.size(); ++i) {
        if (!hit[i] && system_[i].contains(id)) newly.push_back(i);
      }
      // An element hitting nothing new is redundant, so no minimum witness uses it here.
      if (newly.empty()) continue;
      for (auto i : newly) hit[i] = 1;
      ProcessSet next = chosen;
      next.insert(id);
      extend(c + 1, slots - 1, next, hit, hit_count + newly.size());
      for (auto i : newly) hit[i] = 0;
    }
  }

  const std::vector<ProcessSet>& system_;
  std::vector<int> candidates_;
  std::vector<int> max_of_;
  std::vector<ProcessSet> found_;
};

}  // namespace

HittingSetResult min_hitting_sets(const Adversary& adv, ProcessSet universe) {
  if (!universe.subset_of(adv.universe())) {
    throw InvalidParameter("universe " + universe.to_string() + " has ids >= n");
  }
  const auto system = adv.restriction(universe);
  if (system.empty()) {
    throw EmptyRestriction("no live set is contained in " + universe.to_string());
  }
  ProcessSet touched;
  for (const auto& s : system) touched = touched | s;
  HittingSetSearch search(system, touched.members());
  for (int k = 1; k <= touched.size(); ++k) {
    auto found = search.witnesses_of_size(k);
    if (!found.empty()) return HittingSetResult{k, std::move(found)};
  }
  // `touched` itself hits every set, so the loop always returns.
  throw std::logic_error("hitting set search exhausted");
}

int hitting_set_size(const Adversary& adv, ProcessSet universe) {
  return min_hitting_sets(adv, universe).h;
}

ProcessSet resolver_set_for(const Adversary& adv, ProcessSet participants) {
  return min_hitting_sets(adv, participants).witnesses.front();
}

bool is_l_resilient(const Adversary& adv, ProcessSet correct) {
  return adv.contains_live_set(correct);
}

Adversary t_resilient_adversary(int n, int t) {
  if (n < 1 || n > 20) throw InvalidParameter("t-resilient adversary needs 1 <= n <= 20");
  if (t < 0 || t >= n) throw InvalidParameter("t-resilience needs 0 <= t < n");
  const int size = n - t;
  std::vector<ProcessSet> sets;
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t bits = 0; bits < limit; ++bits) {
    auto s = ProcessSet::from_bits(bits);
    if (s.size() == size) sets.push_back(s);
  }
  return Adversary(n, std::move(sets));
}

}  // namespace hitset
