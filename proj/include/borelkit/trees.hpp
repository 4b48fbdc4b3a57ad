#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace borelkit {

// Finite sequence of naturals; the empty vector is the empty sequence.
using Seq = std::vector<int>;

std::string seq_str(const Seq& s);
bool is_prefix(const Seq& s, const Seq& t);

// s(i) <= t(i) for all i, equal lengths assumed by the caller.
bool leq_cw(const Seq& s, const Seq& t);
Seq add_cw(const Seq& s, const Seq& t);

// The fixed pairing <r,q> = 2^r(2q+1) - 1.
long pair_code(long r, long q);

/// Rank of a tree, either known exactly or clipped by the exploration caps.
struct RankVerdict {
  enum class Kind { Exact, AtLeastAtCap };
  Kind kind = Kind::Exact;
  int rank = -1;      // Exact: the rank. AtLeastAtCap: rank of the capped
                      // restriction (a lower bound for the true rank).
  int depth_cap = 0;
  int value_cap = 0;

  static RankVerdict exact(int r) { return {Kind::Exact, r, 0, 0}; }
  static RankVerdict at_least(int r, int d, int c) {
    return {Kind::AtLeastAtCap, r, d, c};
  }
  bool is_exact() const { return kind == Kind::Exact; }
  bool operator==(const RankVerdict& o) const {
    if (kind != o.kind || rank != o.rank) return false;
    return kind == Kind::Exact || (depth_cap == o.depth_cap && value_cap == o.value_cap);
  }
  nlohmann::ordered_json to_json() const;
};

// rank(a) <= rank(b) in the order Exact(-1) < ... < Exact(k) < AtLeastAtCap(k).
bool verdict_leq(const RankVerdict& a, const RankVerdict& b);

/// Prefix-closed finite set of sequences over one alphabet.
class FiniteTree {
 public:
  FiniteTree() = default;

  // Prefix closure of the given sequences. Rejects negative symbols.
  static FiniteTree close(const std::vector<Seq>& seqs);

  // Wraps an already prefix-closed node set (unchecked).
  static FiniteTree from_closed(std::set<Seq> nodes);

  bool contains(const Seq& s) const { return nodes_.count(s) != 0; }
  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }
  const std::set<Seq>& nodes() const { return nodes_; }

  // Max node length; -1 for the empty tree.
  int height() const;

  void insert_with_prefixes(const Seq& s);

  bool operator==(const FiniteTree& o) const { return nodes_ == o.nodes_; }

  nlohmann::ordered_json to_json() const;
  static FiniteTree from_json(const nlohmann::json& j);

 private:
  std::set<Seq> nodes_;
};

// mk_tree of the interface: prefix closure.
inline FiniteTree mk_tree(const std::vector<Seq>& seqs) { return FiniteTree::close(seqs); }

// Exact rank; Exact(-1) for the empty tree.
RankVerdict tree_rank(const FiniteTree& t);

// rk(r) inside t; -1 when r is not a node.
int rank_at(const FiniteTree& t, const Seq& r);

// Membership predicate plus exploration caps; the window onto an
// infinite tree. The predicate must be prefix-monotone.
struct LazyTree {
  std::function<bool(const Seq&)> member;
  int depth_cap = 0;
  int value_cap = 0;
};

RankVerdict rank_capped(const LazyTree& t);

// {Λ} ∪ { <b(k0,k1),k2,...,kn> : <k0,...,kn> in s, n >= 1 }.
FiniteTree contract(const FiniteTree& s);

// {Λ} ∪ { n⌢t : t in ts[n] }.
FiniteTree star_sum(const std::vector<FiniteTree>& ts);

// Finite product: the depth-(j+1) nodes are tuples with one length-j
// component per factor tree, ordered componentwise by extension; returned
// as the order-isomorphic tree over ℕ (children enumerated canonically).
FiniteTree star_product(const std::vector<FiniteTree>& ts, int depth);

// { s ⊞ t : s in S, t in T, lh s = lh t }.
FiniteTree cw_add(const FiniteTree& s, const FiniteTree& t);

}  // namespace borelkit
