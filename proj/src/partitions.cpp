#include "freeprob/partitions.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

#include "freeprob/errors.hpp"
#include "freeprob/limits.hpp"

namespace freeprob {

SetPartition SetPartition::from_canonical(std::span<const std::uint8_t> labels) {
  SetPartition p;
  const std::size_t k = labels.size();
  int blocks = 0;
  for (auto l : labels) blocks = std::max(blocks, l + 1);
  p.k_ = k;
  p.data_.assign(2 * k + blocks + 1, 0);
  std::copy(labels.begin(), labels.end(), p.data_.begin());
  std::uint8_t* members = p.data_.data() + k;
  std::uint8_t* offsets = p.data_.data() + 2 * k;
  for (auto l : labels) ++offsets[l + 1];
  for (int b = 0; b < blocks; ++b) offsets[b + 1] += offsets[b];
  std::vector<std::uint8_t> fill(offsets, offsets + blocks);
  for (std::size_t i = 0; i < k; ++i) members[fill[labels[i]]++] = static_cast<std::uint8_t>(i);
  return p;
}

SetPartition SetPartition::from_labels(std::span<const int> labels) {
  if (labels.size() > 255) throw SizeError("partition too large");
  std::map<int, std::uint8_t> relabel;
  std::vector<std::uint8_t> canon(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = relabel.try_emplace(labels[i], static_cast<std::uint8_t>(relabel.size()));
    canon[i] = it->second;
  }
  return from_canonical(canon);
}

SetPartition SetPartition::from_blocks(int k, const std::vector<std::vector<int>>& blocks) {
  if (k < 0 || k > 255) throw SizeError("partition size out of range");
  std::vector<int> labels(k, -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw ValidationError("empty block");
    for (int e : blocks[b]) {
      if (e < 0 || e >= k) throw ValidationError("block element out of range");
      if (labels[e] != -1) throw ValidationError("blocks overlap");
      labels[e] = static_cast<int>(b);
    }
  }
  for (int l : labels)
    if (l == -1) throw ValidationError("blocks do not cover the ground set");
  return from_labels(labels);
}

SetPartition SetPartition::parse(std::string_view text) {
  std::vector<std::vector<int>> blocks;
  int depth = 0;
  int max_element = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '{') {
      if (++depth == 2) blocks.emplace_back();
      if (depth > 2) throw ParseError("nested braces in partition");
      ++i;
    } else if (c == '}') {
      --depth;
      ++i;
    } else if (c >= '0' && c <= '9') {
      if (depth != 2) throw ParseError("element outside a block");
      int v = 0;
      while (i < text.size() && text[i] >= '0' && text[i] <= '9') v = 10 * v + (text[i++] - '0');
      if (v < 1) throw ParseError("partition elements are 1-based");
      blocks.back().push_back(v - 1);
      max_element = std::max(max_element, v);
    } else if (c == ',' || c == ' ') {
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "' in partition");
    }
  }
  if (depth != 0) throw ParseError("unbalanced braces in partition");
  return from_blocks(max_element, blocks);
}

std::vector<std::vector<int>> SetPartition::blocks() const {
  std::vector<std::vector<int>> out(block_count());
  for (int b = 0; b < block_count(); ++b)
    for (auto e : block(b)) out[b].push_back(e);
  return out;
}

bool SetPartition::is_noncrossing() const {
  // scan left to right keeping the open blocks on a stack; a point of an open
  // block that is not on top closes over a later-opened block
  const int k = size();
  std::vector<int> last(block_count(), -1);
  for (int i = 0; i < k; ++i) last[label(i)] = i;
  std::vector<int> stack;
  std::vector<char> open(block_count(), 0);
  for (int i = 0; i < k; ++i) {
    int b = label(i);
    if (!open[b]) {
      open[b] = 1;
      if (last[b] > i) stack.push_back(b);
    } else {
      if (stack.empty() || stack.back() != b) return false;
      if (last[b] == i) stack.pop_back();
    }
  }
  return true;
}

bool SetPartition::refines(const SetPartition& other) const {
  if (size() != other.size()) throw DomainError("partitions of different ground sets");
  for (int b = 0; b < block_count(); ++b) {
    auto blk = block(b);
    int target = other.label(blk[0]);
    for (auto e : blk)
      if (other.label(e) != target) return false;
  }
  return true;
}

std::string SetPartition::to_string() const {
  std::string s = "{";
  for (int b = 0; b < block_count(); ++b) {
    if (b) s += ",";
    s += "{";
    bool first = true;
    for (auto e : block(b)) {
      if (!first) s += ",";
      first = false;
      s += std::to_string(e + 1);
    }
    s += "}";
  }
  return s + "}";
}

NCPartition::NCPartition(SetPartition p) : p_(std::move(p)) {
  if (!p_.is_noncrossing()) throw ValidationError("partition is crossing: " + p_.to_string());
}

NCPartition NCPartition::from_blocks(int k, const std::vector<std::vector<int>>& blocks) {
  return NCPartition(SetPartition::from_blocks(k, blocks));
}

NCPartition NCPartition::parse(std::string_view text) { return NCPartition(SetPartition::parse(text)); }

NCPartition NCPartition::zero(int k) {
  std::vector<int> labels(k);
  std::iota(labels.begin(), labels.end(), 0);
  return NCPartition(SetPartition::from_labels(labels));
}

NCPartition NCPartition::one(int k) {
  std::vector<int> labels(k, 0);
  return NCPartition(SetPartition::from_labels(labels));
}

bool is_noncrossing(const SetPartition& p) { return p.is_noncrossing(); }

namespace {

void check_size(int k) {
  if (k < 1) throw SizeError("partition size must be positive");
  if (k > engine_limits().max_partition_size)
    throw SizeError("partition size " + std::to_string(k) + " above the enumeration cap");
}

struct Interval {
  int lo;
  int hi;
};

void place_blocks(std::vector<Interval> pending, std::uint8_t next_label, std::vector<std::uint8_t>& labels,
                  const std::function<void(std::span<const std::uint8_t>)>& visit) {
  while (!pending.empty() && pending.back().lo >= pending.back().hi) pending.pop_back();
  if (pending.empty()) {
    visit(labels);
    return;
  }
  const Interval cur = pending.back();
  pending.pop_back();
  const int free = cur.hi - cur.lo - 1;
  std::vector<int> members;
  for (std::uint32_t mask = 0; mask < (1u << free); ++mask) {
    members.assign(1, cur.lo);
    for (int b = 0; b < free; ++b)
      if (mask & (1u << b)) members.push_back(cur.lo + 1 + b);
    for (int v : members) labels[v] = next_label;
    // the stack top must hold the interval with the smallest left end
    std::vector<Interval> next = pending;
    next.push_back({members.back() + 1, cur.hi});
    for (std::size_t g = members.size() - 1; g-- > 0;) next.push_back({members[g] + 1, members[g + 1]});
    place_blocks(std::move(next), static_cast<std::uint8_t>(next_label + 1), labels, visit);
  }
}

}  // namespace

void for_each_nc_labels(int k, const std::function<void(std::span<const std::uint8_t>)>& visit) {
  check_size(k);
  std::vector<std::uint8_t> labels(k, 0);
  place_blocks({{0, k}}, 0, labels, visit);
}

std::vector<NCPartition> enumerate_nc(int k) {
  std::vector<NCPartition> out;
  for_each_nc_labels(k, [&](std::span<const std::uint8_t> labels) {
    out.emplace_back(SetPartition::from_canonical(labels));
  });
  return out;
}

const std::vector<NCPartition>& nc_partitions(int k) {
  constexpr int kCached = 12;
  static std::array<std::once_flag, kCached + 1> flags;
  static std::array<std::unique_ptr<std::vector<NCPartition>>, kCached + 1> tables;
  if (k < 1 || k > kCached) throw SizeError("no cached partition table for k = " + std::to_string(k));
  std::call_once(flags[k], [k] { tables[k] = std::make_unique<std::vector<NCPartition>>(enumerate_nc(k)); });
  return *tables[k];
}

bool leq(const NCPartition& pi, const NCPartition& sigma) { return pi.partition().refines(sigma.partition()); }

NCPartition join(const NCPartition& pi, const NCPartition& sigma) {
  const int k = pi.size();
  if (sigma.size() != k) throw DomainError("join of partitions of different ground sets");
  std::vector<int> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (const auto* p : {&pi, &sigma})
    for (int b = 0; b < p->block_count(); ++b) {
      auto blk = p->block(b);
      for (auto e : blk) unite(blk[0], e);
    }
  // the union closure may cross; merge crossing blocks until it does not
  bool changed = true;
  while (changed) {
    changed = false;
    for (int p = 0; p < k && !changed; ++p)
      for (int q = p + 1; q < k && !changed; ++q) {
        if (find(q) == find(p)) continue;
        for (int r = q + 1; r < k && !changed; ++r) {
          if (find(r) != find(p)) continue;
          for (int s = r + 1; s < k; ++s)
            if (find(s) == find(q)) {
              unite(p, q);
              changed = true;
              break;
            }
        }
      }
  }
  std::vector<int> labels(k);
  for (int i = 0; i < k; ++i) labels[i] = find(i);
  return NCPartition(SetPartition::from_labels(labels));
}

NCPartition meet(const NCPartition& pi, const NCPartition& sigma) {
  const int k = pi.size();
  if (sigma.size() != k) throw DomainError("meet of partitions of different ground sets");
  std::vector<int> labels(k);
  for (int i = 0; i < k; ++i) labels[i] = pi.label(i) * 256 + sigma.label(i);
  return NCPartition(SetPartition::from_labels(labels));
}

Integer mobius_full(int k) {
  static std::mutex mutex;
  static std::vector<Integer> memo{Integer(0), Integer(1)};
  {
    std::lock_guard lock(mutex);
    if (k < static_cast<int>(memo.size())) return memo[k];
  }
  if (k < 1) throw SizeError("mobius_full needs k >= 1");
  // μ(0,1) = -Σ_{0 ≤ τ < 1} μ(0,τ) and [0,τ] is the product of NC(|W|), W ∈ τ
  std::vector<Integer> smaller(k);
  for (int j = 1; j < k; ++j) smaller[j] = mobius_full(j);
  Integer sum = 0;
  std::vector<int> sizes;
  for_each_nc_labels(k, [&](std::span<const std::uint8_t> labels) {
    sizes.assign(k, 0);
    for (auto l : labels) ++sizes[l];
    if (sizes[0] == k) return;
    Integer term = 1;
    for (int s : sizes)
      if (s > 0) term *= smaller[s];
    sum += term;
  });
  Integer value = -sum;
  std::lock_guard lock(mutex);
  while (static_cast<int>(memo.size()) <= k) memo.emplace_back(0);
  memo[k] = value;
  return value;
}

SetPartition restrict_to(const SetPartition& p, std::span<const std::uint8_t> positions) {
  std::vector<int> labels;
  labels.reserve(positions.size());
  for (auto pos : positions) labels.push_back(p.label(pos));
  return SetPartition::from_labels(labels);
}

Integer mobius(const NCPartition& sigma, const NCPartition& pi) {
  if (sigma.size() != pi.size()) throw DomainError("mobius on partitions of different ground sets");
  if (!leq(sigma, pi)) throw OrderError(sigma.to_string() + " is not below " + pi.to_string());
  // [σ,π] ≅ Π_{V∈π} [σ|V, 1_V] ≅ Π_{V∈π} Π_{W∈K(σ|V)} NC(|W|)
  Integer value = 1;
  for (int b = 0; b < pi.block_count(); ++b) {
    NCPartition local(restrict_to(sigma.partition(), pi.block(b)));
    NCPartition comp = kreweras(local);
    for (int w = 0; w < comp.block_count(); ++w) value *= mobius_full(static_cast<int>(comp.block(w).size()));
  }
  return value;
}

const std::vector<Integer>& mobius_to_top(int k) {
  constexpr int kCached = 12;
  static std::array<std::once_flag, kCached + 1> flags;
  static std::array<std::vector<Integer>, kCached + 1> tables;
  if (k < 1 || k > kCached) throw SizeError("no cached Möbius table for k = " + std::to_string(k));
  std::call_once(flags[k], [k] {
    const auto one = NCPartition::one(k);
    for (const auto& sigma : nc_partitions(k)) tables[k].push_back(mobius(sigma, one));
  });
  return tables[k];
}

NCPartition kreweras(const NCPartition& pi) {
  // as permutations, K(π) = π^{-1} γ with γ the long cycle and π sending each
  // point to the next one of its block (cyclically)
  const int k = pi.size();
  std::vector<int> inverse(k);
  for (int b = 0; b < pi.block_count(); ++b) {
    auto blk = pi.block(b);
    for (std::size_t i = 0; i < blk.size(); ++i) inverse[blk[(i + 1) % blk.size()]] = blk[i];
  }
  std::vector<int> labels(k, -1);
  int next = 0;
  for (int start = 0; start < k; ++start) {
    if (labels[start] != -1) continue;
    int x = start;
    while (labels[x] == -1) {
      labels[x] = next;
      x = inverse[(x + 1) % k];
    }
    ++next;
  }
  return NCPartition(SetPartition::from_labels(labels));
}

SetPartition kernel(std::span<const int> indices) { return SetPartition::from_labels(indices); }

StarPattern StarPattern::parse(std::string_view text) {
  std::vector<bool> s;
  for (char c : text) {
    if (c == '.' || c == '0')
      s.push_back(false);
    else if (c == '*' || c == '1')
      s.push_back(true);
    else if (c == ',' || c == ' ')
      continue;
    else
      throw ParseError(std::string("bad star pattern character '") + c + "'");
  }
  return StarPattern(std::move(s));
}

std::string StarPattern::to_string() const {
  std::string s;
  for (bool b : starred_) s += b ? '*' : '.';
  return s;
}

namespace {

void pairings(int lo, int hi, std::vector<int>& partner, std::vector<std::vector<int>>& out,
              std::vector<Interval> pending) {
  while (!pending.empty() && pending.back().lo >= pending.back().hi) pending.pop_back();
  if (lo >= hi) {
    if (pending.empty()) {
      out.push_back(partner);
      return;
    }
    Interval next = pending.back();
    pending.pop_back();
    pairings(next.lo, next.hi, partner, out, std::move(pending));
    return;
  }
  for (int j = lo + 1; j < hi; j += 2) {
    partner[lo] = j;
    partner[j] = lo;
    std::vector<Interval> rest = pending;
    rest.push_back({j + 1, hi});
    pairings(lo + 1, j, partner, out, std::move(rest));
  }
}

}  // namespace

std::vector<NCPartition> pair_partitions(int k, PairConstraint constraint, const StarPattern& e) {
  if (k < 0) throw SizeError("negative size");
  if (constraint != PairConstraint::none && e.size() != k)
    throw DomainError("star pattern length " + std::to_string(e.size()) + " does not match " + std::to_string(k));
  std::vector<NCPartition> out;
  if (k == 0 || k % 2 == 1) return out;
  check_size(k);
  std::vector<int> partner(k, -1);
  std::vector<std::vector<int>> all;
  pairings(0, k, partner, all, {});
  for (const auto& pr : all) {
    bool ok = true;
    std::vector<int> labels(k);
    for (int i = 0; i < k; ++i) {
      int j = pr[i];
      labels[i] = std::min(i, j);
      if (i < j && constraint != PairConstraint::none) {
        if (e.starred(i) == e.starred(j)) ok = false;
        if (constraint == PairConstraint::ordered && e.starred(i)) ok = false;
      }
    }
    if (ok) out.emplace_back(SetPartition::from_labels(labels));
  }
  return out;
}

}  // namespace freeprob
