#include "sdm/cv/folds.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sdm {

std::string to_string(SplitRule rule) {
  switch (rule) {
    case SplitRule::ClassBalanced: return "class-balanced";
    case SplitRule::Grouped: return "grouped";
    case SplitRule::TimeSequence: return "time-sequence";
  }
  return "unknown";
}

SplitRule parse_split_rule(const std::string& text) {
  for (auto r : {SplitRule::ClassBalanced, SplitRule::Grouped, SplitRule::TimeSequence})
    if (to_string(r) == text) return r;
  throw std::invalid_argument("unknown split rule: " + text);
}

std::vector<std::size_t> FoldAssignment::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(i);
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  auto splitmix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  std::uint64_t s = splitmix(base);
  for (std::uint64_t p : path) s = splitmix(s ^ splitmix(p + 1));
  return s;
}

FoldAssignment make_folds(std::size_t size, std::span<const int> labels, std::span<const int> groups, int k,
                          SplitRule rule, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("need at least 2 folds");
  if (static_cast<std::size_t>(k) > size) throw std::invalid_argument("more folds than samples");
  FoldAssignment out;
  out.folds = k;
  out.fold_of.assign(size, -1);
  const auto uk = static_cast<std::size_t>(k);

  switch (rule) {
    case SplitRule::ClassBalanced: {
      if (!labels.empty() && labels.size() != size) throw std::invalid_argument("label count does not match samples");
      std::map<int, std::vector<std::size_t>> members;
      for (std::size_t i = 0; i < size; ++i) members[labels.empty() ? 0 : labels[i]].push_back(i);
      std::mt19937_64 rng(seed);
      std::size_t next = 0;
      for (auto& [c, idx] : members) {
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i : idx) out.fold_of[i] = static_cast<int>(next++ % uk);
      }
      break;
    }
    case SplitRule::Grouped: {
      if (groups.size() != size) throw std::invalid_argument("grouped split needs one group id per sample");
      std::map<int, std::vector<std::size_t>> members;
      for (std::size_t i = 0; i < size; ++i) members[groups[i]].push_back(i);
      if (uk > members.size()) throw std::invalid_argument("more folds than groups");
      std::vector<const std::pair<const int, std::vector<std::size_t>>*> order;
      for (const auto& m : members) order.push_back(&m);
      std::stable_sort(order.begin(), order.end(),
                       [](auto* a, auto* b) { return a->second.size() > b->second.size(); });
      std::vector<std::size_t> load(uk, 0);
      for (const auto* g : order) {
        const auto f = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
        load[f] += g->second.size();
        for (std::size_t i : g->second) out.fold_of[i] = static_cast<int>(f);
      }
      break;
    }
    case SplitRule::TimeSequence: {
      const std::size_t base = size / uk;
      const std::size_t extra = size % uk;
      std::size_t pos = 0;
      for (std::size_t f = 0; f < uk; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        for (std::size_t i = 0; i < len; ++i) out.fold_of[pos++] = static_cast<int>(f);
      }
      break;
    }
  }
  return out;
}

FoldAssignment make_folds(const Dataset& dataset, int k, SplitRule rule, std::uint64_t seed) {
  std::span<const int> labels;
  std::span<const int> groups;
  if (dataset.labels) labels = *dataset.labels;
  if (dataset.groups) groups = *dataset.groups;
  if (rule == SplitRule::Grouped && !dataset.groups) throw std::invalid_argument("grouped split needs group ids");
  return make_folds(dataset.size(), labels, groups, k, rule, seed);
}

}  // namespace sdm
