#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "normal_trees.hpp"
#include "rng.hpp"
#include "trees.hpp"

namespace borelkit {

/// Finite set of pairs <u,s> on 2×ℕ within the declared caps.
struct CappedPointset {
  int depth_cap = 0;
  int value_cap = 0;
  std::set<std::pair<BinWord, Seq>> pairs;

  bool contains(const BinWord& u, const Seq& s) const { return pairs.count({u, s}) != 0; }
  void insert(const BinWord& u, const Seq& s);

  // Slice X_u, sorted.
  std::vector<Seq> slice(const BinWord& u) const;

  // S△T clipped at the given caps.
  static CappedPointset sym_diff(const NormalTree& s, const NormalTree& t, int depth,
                                 int value_cap);

  static CappedPointset random(SplitRng& rng, int depth, int value_cap, int count);

  nlohmann::ordered_json to_json() const;
  static CappedPointset from_json(const nlohmann::json& j, int depth, int value_cap);
};

enum class Winner { PlayerI, PlayerII };

/// Solved position table of the exit games over one slice X_u: for every
/// budget b within the cap, whether player II can force the running sum
/// out of X_u. Player I's moves are restricted to sums inside the slice
/// (any exit loses immediately for I); infinite safe play is a win for I,
/// so II's winning set is the least fixpoint (attractor).
class GameTable {
 public:
  GameTable(const CappedPointset& x, const BinWord& u, int budget_cap);

  // Winner of Γ(b,u,X) under optimal play.
  Winner winner(const Seq& budget) const;

 private:
  int n_;
  int budget_cap_;
  int box_side_;                       // X entries live in [0, box_side_-1]
  std::size_t box_cells_ = 1;
  std::vector<std::size_t> stride_;
  std::vector<bool> ii_wins_;          // indexed by budget
  std::vector<std::size_t> bstride_;
};

Winner solve_game(const Seq& f, const BinWord& u, const CappedPointset& x);

// Capped tree of budgets for which II wins everywhere; f entries <= value_cap.
FiniteTree vid(const CappedPointset& x, int depth_cap, int value_cap);

/// Three-valued membership verdict derived from the capped rank of vid X.
struct IdealVerdict {
  enum class Kind { In, Out, Unknown };
  Kind in_rank_ideal = Kind::Unknown;  // rank(vid X) >= xi
  Kind in_nti_proxy = Kind::Unknown;   // vid X survives the caps
  RankVerdict detail;
  nlohmann::ordered_json to_json() const;
};

IdealVerdict ideal_rank_verdict(const CappedPointset& x, int xi, int depth_cap,
                                int value_cap);

/// Node-exact verification of
///   Lip(S,T) ⊞ Lip(T,S)  ⊆  vid(S△T)  ⊆  Lip(S,T) ∩ Lip(T,S)
/// with the caps arranged so both inclusions are meaningful: the shift
/// trees are built with doubled value cap and the pointset keeps entries
/// up to generator cap + shift cap.
struct SandwichReport {
  int checked_lower = 0;
  int checked_upper = 0;
  std::vector<std::string> violations;
  bool clean() const { return violations.empty(); }
  nlohmann::ordered_json to_json() const;
};

SandwichReport check_ideal_sandwich(const NormalTree& s, const NormalTree& t, int depth,
                                    int value_cap);

}  // namespace borelkit
