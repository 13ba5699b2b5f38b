#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freeprob/rational.hpp"

namespace freeprob {

class NCPartition;

// A set partition of {0,...,k-1}. Positions are 0-based in the API; the
// printed form {{1,2},{3}} is 1-based.
//
// Canonical storage: labels form a restricted growth string (block b is the
// b-th block ordered by minimum), and members lists the elements grouped by
// block, ascending inside each block.
class SetPartition {
 public:
  SetPartition() = default;

  // Any labelling; equal labels mean same block.
  static SetPartition from_labels(std::span<const int> labels);
  static SetPartition from_blocks(int k, const std::vector<std::vector<int>>& blocks);
  // "{{1,3},{2}}"
  static SetPartition parse(std::string_view text);

  int size() const { return k_; }
  int block_count() const { return static_cast<int>(data_.size()) - 2 * k_ - 1; }
  int label(int position) const { return data_[position]; }
  std::span<const std::uint8_t> labels() const { return {data_.data(), k_}; }
  std::span<const std::uint8_t> block(int b) const {
    const std::uint8_t* offsets = data_.data() + 2 * k_;
    return {data_.data() + k_ + offsets[b], data_.data() + k_ + offsets[b + 1]};
  }
  std::vector<std::vector<int>> blocks() const;

  bool is_noncrossing() const;
  // every block of *this sits inside a block of other
  bool refines(const SetPartition& other) const;

  std::string to_string() const;

  friend bool operator==(const SetPartition& a, const SetPartition& b) { return a.data_ == b.data_; }
  friend auto operator<=>(const SetPartition& a, const SetPartition& b) { return a.data_ <=> b.data_; }

  // labels must already be a restricted growth string; not checked
  static SetPartition from_canonical(std::span<const std::uint8_t> labels);

 private:
  // [labels (k) | members grouped by block (k) | block offsets (blocks+1)]
  std::vector<std::uint8_t> data_{0};
  std::size_t k_ = 0;

};

class NCPartition {
 public:
  NCPartition() = default;
  // throws ValidationError when p is crossing
  explicit NCPartition(SetPartition p);

  static NCPartition from_blocks(int k, const std::vector<std::vector<int>>& blocks);
  static NCPartition parse(std::string_view text);
  static NCPartition zero(int k);
  static NCPartition one(int k);

  const SetPartition& partition() const { return p_; }
  int size() const { return p_.size(); }
  int block_count() const { return p_.block_count(); }
  int label(int position) const { return p_.label(position); }
  std::span<const std::uint8_t> block(int b) const { return p_.block(b); }
  std::vector<std::vector<int>> blocks() const { return p_.blocks(); }
  std::string to_string() const { return p_.to_string(); }

  friend bool operator==(const NCPartition& a, const NCPartition& b) = default;
  friend auto operator<=>(const NCPartition& a, const NCPartition& b) { return a.p_ <=> b.p_; }

 private:
  SetPartition p_;
};

// Deterministic order: recursive placement of the block containing the
// smallest unplaced point, subsets in lexicographic bitmask order.
std::vector<NCPartition> enumerate_nc(int k);
// Streaming variant, no storage; labels are canonical.
void for_each_nc_labels(int k, const std::function<void(std::span<const std::uint8_t>)>& visit);
// Cached table for small k (k <= 12); shared, immutable.
const std::vector<NCPartition>& nc_partitions(int k);

bool is_noncrossing(const SetPartition& p);
bool leq(const NCPartition& pi, const NCPartition& sigma);
NCPartition join(const NCPartition& pi, const NCPartition& sigma);
NCPartition meet(const NCPartition& pi, const NCPartition& sigma);

// μ(0_k, 1_k), memoized
Integer mobius_full(int k);
Integer mobius(const NCPartition& sigma, const NCPartition& pi);
// μ(σ, 1_k) for σ in nc_partitions(k) order, cached (k <= 12)
const std::vector<Integer>& mobius_to_top(int k);

// Complement on the interleaved points 1, 1', 2, 2', ..., k, k'; the result
// lives on the primed points (position i stands for i').
NCPartition kreweras(const NCPartition& pi);

SetPartition kernel(std::span<const int> indices);

// restriction of p to the given ascending positions, relabelled 0..|V|-1
SetPartition restrict_to(const SetPartition& p, std::span<const std::uint8_t> positions);

class StarPattern {
 public:
  StarPattern() = default;
  explicit StarPattern(std::vector<bool> starred) : starred_(std::move(starred)) {}
  // "..**" or "0011": '.'/'0' plain, '*'/'1' star
  static StarPattern parse(std::string_view text);

  int size() const { return static_cast<int>(starred_.size()); }
  bool starred(int i) const { return starred_[i]; }
  std::string to_string() const;
  friend bool operator==(const StarPattern&, const StarPattern&) = default;

 private:
  std::vector<bool> starred_;
};

enum class PairConstraint { none, alternating, ordered };

// Noncrossing pair partitions of k points, filtered by the constraint:
// alternating pairs join a plain and a starred point; ordered additionally
// needs the smaller endpoint plain.
std::vector<NCPartition> pair_partitions(int k, PairConstraint constraint = PairConstraint::none,
                                         const StarPattern& e = {});

}  // namespace freeprob
