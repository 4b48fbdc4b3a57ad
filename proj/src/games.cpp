#include "borelkit/games.hpp"

#include <algorithm>
#include <stdexcept>

namespace borelkit {

void CappedPointset::insert(const BinWord& u, const Seq& s) {
  if (u.size() != s.size()) throw std::invalid_argument("pointset pair: lh u != lh s");
  if (static_cast<int>(u.size()) > depth_cap)
    throw std::invalid_argument("pointset pair beyond depth cap");
  for (int v : s)
    if (v < 0 || v > value_cap) throw std::invalid_argument("pointset entry beyond cap");
  pairs.insert({u, s});
}

std::vector<Seq> CappedPointset::slice(const BinWord& u) const {
  std::vector<Seq> out;
  for (const auto& [w, s] : pairs)
    if (w == u) out.push_back(s);
  return out;
}

CappedPointset CappedPointset::sym_diff(const NormalTree& s, const NormalTree& t, int depth,
                                        int value_cap) {
  CappedPointset x;
  x.depth_cap = depth;
  x.value_cap = value_cap;
  for (auto& [u, seq] : NormalTree::sym_diff(s, t, depth, value_cap)) x.pairs.insert({u, seq});
  return x;
}

CappedPointset CappedPointset::random(SplitRng& rng, int depth, int value_cap, int count) {
  CappedPointset x;
  x.depth_cap = depth;
  x.value_cap = value_cap;
  for (int i = 0; i < count; ++i) {
    int n = rng.next_int(0, depth);
    BinWord u;
    Seq s;
    for (int j = 0; j < n; ++j) {
      u.push_back(char('0' + rng.next_int(0, 1)));
      s.push_back(rng.next_int(0, value_cap));
    }
    x.pairs.insert({u, s});
  }
  return x;
}

nlohmann::ordered_json CappedPointset::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& [u, s] : pairs) {
    nlohmann::ordered_json e;
    e["u"] = u;
    e["s"] = s;
    arr.push_back(e);
  }
  return arr;
}

CappedPointset CappedPointset::from_json(const nlohmann::json& j, int depth, int value_cap) {
  CappedPointset x;
  x.depth_cap = depth;
  x.value_cap = value_cap;
  for (const auto& e : j) x.insert(e.at("u").get<std::string>(), e.at("s").get<Seq>());
  return x;
}

namespace {

// Dense bit array over the position box.
using Cells = std::vector<std::uint64_t>;

inline bool cell(const Cells& c, std::size_t i) { return (c[i >> 6] >> (i & 63)) & 1u; }
inline void set_cell(Cells& c, std::size_t i) { c[i >> 6] |= 1ull << (i & 63); }

}  // namespace

GameTable::GameTable(const CappedPointset& x, const BinWord& u, int budget_cap)
    : n_(static_cast<int>(u.size())), budget_cap_(budget_cap), box_side_(x.value_cap + 1) {
  stride_.resize(n_);
  for (int i = n_ - 1; i >= 0; --i) {
    stride_[i] = box_cells_;
    box_cells_ *= box_side_;
  }
  const std::size_t words = (box_cells_ + 63) / 64;

  Cells xu(words, 0);
  bool has_any = false;
  for (const Seq& s : x.slice(u)) {
    std::size_t idx = 0;
    for (int i = 0; i < n_; ++i) idx += static_cast<std::size_t>(s[i]) * stride_[i];
    set_cell(xu, idx);
    has_any = true;
  }

  std::size_t budgets = 1;
  bstride_.resize(n_);
  for (int i = n_ - 1; i >= 0; --i) {
    bstride_[i] = budgets;
    budgets *= static_cast<std::size_t>(budget_cap + 1);
  }
  ii_wins_.assign(budgets, false);

  if (!has_any) {
    // Empty slice: player I has no first move inside X.
    std::fill(ii_wins_.begin(), ii_wins_.end(), true);
    return;
  }

  // Per-budget solved data, in an order where every t ≼ r precedes r.
  std::vector<Cells> down(budgets), g(budgets);

  // at_top[axis][idx]: the axis coordinate of the cell is maximal.
  std::vector<std::vector<char>> at_top(n_, std::vector<char>(box_cells_));
  for (int axis = 0; axis < n_; ++axis)
    for (std::size_t idx = 0; idx < box_cells_; ++idx)
      at_top[axis][idx] =
          static_cast<int>((idx / stride_[axis]) % static_cast<std::size_t>(box_side_)) ==
          box_side_ - 1;

  auto downset = [&](const Cells& a) {
    Cells out = a;
    for (int axis = 0; axis < n_; ++axis) {
      // propagate each set cell one step down the axis, sweeping from top
      for (std::size_t idx = box_cells_; idx-- > 0;) {
        if (!at_top[axis][idx] && cell(out, idx + stride_[axis]) && !cell(out, idx))
          set_cell(out, idx);
      }
    }
    return out;
  };

  std::vector<std::size_t> bcoord(n_, 0);
  for (std::size_t b = 0; b < budgets; ++b) {
    // decode budget
    std::size_t rem = b;
    for (int i = 0; i < n_; ++i) {
      bcoord[i] = rem / bstride_[i];
      rem %= bstride_[i];
    }

    // base: II spends part of the budget now; union over first spent axes
    Cells base(words, 0);
    for (int axis = 0; axis < n_; ++axis) {
      if (bcoord[axis] == 0) continue;
      const Cells& prev = g[b - bstride_[axis]];
      for (std::size_t idx = 0; idx < box_cells_; ++idx) {
        bool hit = at_top[axis][idx] ? true : cell(prev, idx + stride_[axis]);
        if (hit) set_cell(base, idx);
      }
    }

    // least fixpoint of D = (base ∪ {x : x not under any alive point}) ∩ X_u
    Cells d(words, 0);
    for (std::size_t w = 0; w < words; ++w) d[w] = base[w] & xu[w];
    Cells dn;
    while (true) {
      Cells alive(words, 0);
      for (std::size_t w = 0; w < words; ++w) alive[w] = xu[w] & ~d[w];
      dn = downset(alive);
      bool changed = false;
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t add = xu[w] & ~dn[w] & ~d[w];
        if (add) {
          d[w] |= add;
          changed = true;
        }
      }
      if (!changed) break;
    }
    down[b] = dn;  // downset of the alive set at the fixpoint

    // g_r(x) = "II wins the I-position at sum x with budget r", plus the
    // pending union used by larger budgets.
    Cells gb(words, 0);
    for (std::size_t w = 0; w < words; ++w) gb[w] = ~dn[w];
    for (int axis = 0; axis < n_; ++axis) {
      if (bcoord[axis] == 0) continue;
      const Cells& prev = g[b - bstride_[axis]];
      for (std::size_t idx = 0; idx < box_cells_; ++idx) {
        bool hit = at_top[axis][idx] ? true : cell(prev, idx + stride_[axis]);
        if (hit) set_cell(gb, idx);
      }
    }
    g[b] = std::move(gb);

    // II wins the whole game iff the initial I-position (sum 0) is II-won:
    // every point of X_u must be II-winning.
    bool all = true;
    for (std::size_t w = 0; w < words && all; ++w) all = (xu[w] & ~d[w]) == 0;
    ii_wins_[b] = all;
  }
}

Winner GameTable::winner(const Seq& budget) const {
  if (static_cast<int>(budget.size()) != n_)
    throw std::invalid_argument("budget length mismatch");
  std::size_t b = 0;
  for (int i = 0; i < n_; ++i) {
    if (budget[i] < 0 || budget[i] > budget_cap_)
      throw std::invalid_argument("budget entry beyond cap");
    b += static_cast<std::size_t>(budget[i]) * bstride_[i];
  }
  return ii_wins_[b] ? Winner::PlayerII : Winner::PlayerI;
}

Winner solve_game(const Seq& f, const BinWord& u, const CappedPointset& x) {
  if (u.size() > f.size()) throw std::invalid_argument("solve_game: lh u > lh f");
  Seq budget(f.begin(), f.begin() + u.size());
  int cap = 0;
  for (int v : budget) cap = std::max(cap, v);
  GameTable table(x, u, cap);
  return table.winner(budget);
}

FiniteTree vid(const CappedPointset& x, int depth_cap, int value_cap) {
  // Level-n membership tests only the new budget f (prefix conditions are
  // inherited through the parent), against every u of length n.
  FiniteTree out;
  if (GameTable(x, "", value_cap).winner(Seq{}) == Winner::PlayerI) return out;
  out.insert_with_prefixes(Seq{});
  std::vector<Seq> level{Seq{}};
  for (int n = 1; n <= depth_cap && !level.empty(); ++n) {
    std::vector<GameTable> tables;
    for (const BinWord& u : all_binwords(n)) tables.emplace_back(x, u, value_cap);
    std::vector<Seq> next;
    for (const Seq& f : level) {
      for (int v = 0; v <= value_cap; ++v) {
        Seq h = f;
        h.push_back(v);
        bool ok = true;
        for (GameTable& tab : tables) {
          if (tab.winner(h) == Winner::PlayerI) {
            ok = false;
            break;
          }
        }
        if (ok) {
          out.insert_with_prefixes(h);
          next.push_back(std::move(h));
        }
      }
    }
    level = std::move(next);
  }
  return out;
}

nlohmann::ordered_json IdealVerdict::to_json() const {
  auto str = [](Kind k) {
    switch (k) {
      case Kind::In: return "In";
      case Kind::Out: return "Out";
      default: return "Unknown";
    }
  };
  nlohmann::ordered_json j;
  j["rankIdeal"] = str(in_rank_ideal);
  j["ntiProxy"] = str(in_nti_proxy);
  j["vidRank"] = detail.to_json();
  return j;
}

IdealVerdict ideal_rank_verdict(const CappedPointset& x, int xi, int depth_cap,
                                int value_cap) {
  if (xi > depth_cap) throw std::invalid_argument("xi beyond depth cap");
  FiniteTree v = vid(x, depth_cap, value_cap);
  RankVerdict r = tree_rank(v);
  bool clipped = v.height() >= depth_cap;

  IdealVerdict out;
  out.detail = clipped ? RankVerdict::at_least(r.rank, depth_cap, value_cap) : r;
  using K = IdealVerdict::Kind;
  if (r.rank >= xi) {
    out.in_rank_ideal = K::In;  // capped rank bounds the true rank from below
  } else if (r.rank == -1) {
    // Λ already fails: the level-0 game ignores budgets, so this is final.
    out.in_rank_ideal = K::Out;
  } else {
    out.in_rank_ideal = K::Unknown;
  }
  out.in_nti_proxy = clipped ? K::In : (r.rank == -1 ? K::Out : K::Unknown);
  return out;
}

nlohmann::ordered_json SandwichReport::to_json() const {
  nlohmann::ordered_json j;
  j["checkedLower"] = checked_lower;
  j["checkedUpper"] = checked_upper;
  j["violations"] = violations;
  return j;
}

SandwichReport check_ideal_sandwich(const NormalTree& s, const NormalTree& t, int depth,
                                    int value_cap) {
  const int shift_cap = 2 * value_cap;          // ⊞ of two capped shift vectors
  const int point_cap = value_cap + shift_cap;  // generator + spent budget

  CappedPointset x = CappedPointset::sym_diff(s, t, depth, point_cap);
  FiniteTree f = lip(s, t, depth, shift_cap);
  FiniteTree g = lip(t, s, depth, shift_cap);
  FiniteTree v = vid(x, depth, shift_cap);

  SandwichReport rep;
  // Lip(S,T) ⊞ Lip(T,S) ⊆ vid(S△T), on sums inside the shift cap.
  for (const Seq& a : f.nodes()) {
    for (const Seq& b : g.nodes()) {
      if (a.size() != b.size()) continue;
      Seq h = add_cw(a, b);
      if (std::any_of(h.begin(), h.end(), [&](int e) { return e > shift_cap; })) continue;
      ++rep.checked_lower;
      if (!v.contains(h))
        rep.violations.push_back("lip-sum " + seq_str(h) + " escapes vid");
    }
  }
  // vid(S△T) ⊆ Lip(S,T) ∩ Lip(T,S).
  for (const Seq& h : v.nodes()) {
    ++rep.checked_upper;
    if (!f.contains(h)) rep.violations.push_back("vid node " + seq_str(h) + " not in Lip(S,T)");
    if (!g.contains(h)) rep.violations.push_back("vid node " + seq_str(h) + " not in Lip(T,S)");
  }
  return rep;
}

}  // namespace borelkit
