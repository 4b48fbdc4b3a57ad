#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "rng.hpp"
#include "trees.hpp"

namespace borelkit {

// Binary word; "" is the empty word.
using BinWord = std::string;

std::vector<BinWord> all_binwords(int length);

/// Tree on 2×ℕ, upward closed componentwise in the ℕ coordinate, stored
/// by the minimal generators of each binary-word slice.
class NormalTree {
 public:
  NormalTree() = default;
  NormalTree(int depth_cap, int value_cap) : depth_cap_(depth_cap), value_cap_(value_cap) {}

  int depth_cap() const { return depth_cap_; }
  int value_cap() const { return value_cap_; }

  // Replaces gen(u) with the minimal antichain of the given sequences.
  void set_generators(const BinWord& u, std::vector<Seq> gens);

  const std::vector<Seq>& generators(const BinWord& u) const;

  // Generator-dominance membership test; s may exceed the value cap.
  bool member(const BinWord& u, const Seq& s) const;

  bool empty() const;

  // Antichain, prefix-closure and root invariants; returns violations.
  std::vector<std::string> validate() const;

  // Per-level symmetric difference, entries clipped at `value_cap`:
  // all pairs <u,s> with lh u = lh s <= depth, entries <= value_cap,
  // lying in exactly one of a, b.
  static std::vector<std::pair<BinWord, Seq>> sym_diff(const NormalTree& a,
                                                       const NormalTree& b, int depth,
                                                       int value_cap);

  static NormalTree full(int depth_cap, int value_cap);
  static NormalTree random(SplitRng& rng, int depth_cap, int value_cap);

  nlohmann::ordered_json to_json() const;
  static NormalTree from_json(const nlohmann::json& j, int depth_cap, int value_cap);

 private:
  int depth_cap_ = 0;
  int value_cap_ = 0;
  std::map<BinWord, std::vector<Seq>> gen_;
};

// Minimal antichain of a set of equal-length sequences.
std::vector<Seq> minimal_antichain(std::vector<Seq> seqs);

// Level-n membership test of the capped Lip tree: f admits the shift
// embedding of s into t through every binary word of length lh f.
bool lip_member(const NormalTree& s, const NormalTree& t, const Seq& f);

// Explicit capped Lip(S,T) with node entries <= value_cap, depth <= depth_cap.
FiniteTree lip(const NormalTree& s, const NormalTree& t, int depth_cap, int value_cap);

RankVerdict leq_nt_verdict(const NormalTree& s, const NormalTree& t, int depth_cap,
                           int value_cap);
RankVerdict equiv_nt_verdict(const NormalTree& s, const NormalTree& t, int depth_cap,
                             int value_cap);

/// Explicit prefix-closed tree on 2×2×ℕ. In transform output the first ℕ
/// entry of a node is the path counter and carries its own cap.
class TriTree {
 public:
  TriTree() = default;
  TriTree(int depth_cap, int value_cap, int counter_cap)
      : depth_cap_(depth_cap), value_cap_(value_cap), counter_cap_(counter_cap) {}

  struct Tri {
    BinWord u, v;
    Seq s;
    auto operator<=>(const Tri&) const = default;
  };

  int depth_cap() const { return depth_cap_; }
  int value_cap() const { return value_cap_; }
  int counter_cap() const { return counter_cap_; }

  bool contains(const BinWord& u, const BinWord& v, const Seq& s) const;
  void insert(const BinWord& u, const BinWord& v, const Seq& s);  // no closure
  void insert_with_prefixes(const BinWord& u, const BinWord& v, const Seq& s);
  std::size_t size() const { return nodes_.size(); }
  const std::set<Tri>& nodes() const { return nodes_; }

  // s-entry cap at the given position of a node.
  int cap_at(std::size_t pos) const { return pos == 0 ? counter_cap_ : value_cap_; }

  // Upper bound for s at position pos in plain (non-transformed) trees.
  static TriTree random(SplitRng& rng, int depth_cap, int value_cap, double keep_prob);

  nlohmann::ordered_json to_json() const;
  static TriTree from_json(const nlohmann::json& j, int depth_cap, int value_cap,
                           int counter_cap);

 private:
  int depth_cap_ = 0;
  int value_cap_ = 0;
  int counter_cap_ = 0;
  std::set<Tri> nodes_;
};

struct LrViolation {
  char property;  // 'i' symmetry, 'd' diagonal, 'n' normality, 't' transitivity
  std::string witness;
};

struct LrReport {
  std::vector<LrViolation> violations;
  bool clean() const { return violations.empty(); }
  nlohmann::ordered_json to_json() const;
};

// Three-part construction of the transform; counter_cap bounds the path
// counter written at position 0 of output nodes (2^(D-1)-1 reaches every
// distance that fits the level graphs; the value cap C is too small for
// that whenever 2^(D-1)-1 > C, which is why the counter cap is separate).
TriTree lr_transform(const TriTree& q, int counter_cap);
inline TriTree lr_transform(const TriTree& q) {
  int d = q.depth_cap();
  return lr_transform(q, d >= 1 ? (1 << (d - 1)) - 1 : 0);
}

// Exhaustive within-caps verification of symmetry, diagonal, normality
// and transitivity. Transitivity is checked on generator pairs, which is
// exhaustive when normality holds; when normality violations are found
// the stored pairs are rechecked directly.
LrReport lr_check_properties(const TriTree& r, int depth);

// Slice tree θ(x) = { <u,s> : R(u, x|lh u, s) } in generator form.
// Requires a property-checked tree (throws otherwise).
NormalTree theta(const TriTree& r, const BinWord& x);
NormalTree theta_unchecked(const TriTree& r, const BinWord& x);

// Level-by-level identity Lip(θ(x),θ(y)) = R_xy within caps; the failing
// level and witness go to *why when the identity fails.
bool lip_vs_slice(const TriTree& r, const BinWord& x, const BinWord& y, int depth,
                  std::string* why = nullptr);

// Same check against prebuilt slice trees (one θ per word, reused across
// the pair loop).
bool lip_vs_slice_pre(const TriTree& r, const NormalTree& theta_x, const NormalTree& theta_y,
                      const BinWord& x, const BinWord& y, int depth,
                      std::string* why = nullptr);

}  // namespace borelkit
