#include <doctest.h>

#include "borelkit/games.hpp"

using namespace borelkit;

namespace {

// Brute-force oracle: enumerates every position of the game graph and
// computes II's winning set as a least fixpoint by plain iteration.
// Independent of the attractor implementation.
Winner oracle_solve(const Seq& f, const BinWord& u, const CappedPointset& x) {
  const std::size_t n = u.size();
  Seq budget(f.begin(), f.begin() + n);
  std::vector<Seq> slice = x.slice(u);

  std::vector<Seq> spends_of_budget{Seq(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Seq> next;
    for (const Seq& t : spends_of_budget)
      for (int val = 0; val <= budget[i]; ++val) {
        Seq q = t;
        q[i] = val;
        next.push_back(q);
      }
    spends_of_budget = std::move(next);
  }

  // I-positions: (sum, remaining); sums are 0 or slice-point + spent.
  std::set<std::pair<Seq, Seq>> ipos, iipos;
  auto sub = [&](const Seq& a, const Seq& b) {
    Seq r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
  };
  for (const Seq& spent : spends_of_budget) {
    Seq rem = sub(budget, spent);
    for (const Seq& base : slice) {
      iipos.insert({base, rem});
      for (const Seq& extra : spends_of_budget) {
        bool fits = leq_cw(extra, rem);
        if (fits) ipos.insert({add_cw(base, extra), sub(rem, extra)});
      }
    }
  }
  ipos.insert({Seq(n, 0), budget});

  std::set<std::pair<Seq, Seq>> win_i, win_ii;  // II-winning members
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : iipos) {
      if (win_ii.count(p)) continue;
      bool wins = false;
      for (const Seq& t : spends_of_budget) {
        if (!leq_cw(t, p.second)) continue;
        if (win_i.count({add_cw(p.first, t), sub(p.second, t)})) {
          wins = true;
          break;
        }
      }
      if (wins) {
        win_ii.insert(p);
        changed = true;
      }
    }
    for (const auto& p : ipos) {
      if (win_i.count(p)) continue;
      bool all = true;
      for (const Seq& target : slice) {
        if (!leq_cw(p.first, target)) continue;
        if (!win_ii.count({target, p.second})) {
          all = false;
          break;
        }
      }
      if (all) {
        win_i.insert(p);
        changed = true;
      }
    }
  }
  return win_i.count({Seq(n, 0), budget}) ? Winner::PlayerII : Winner::PlayerI;
}

}  // namespace

TEST_CASE("solve_game basics") {
  CappedPointset none{2, 3, {}};
  CHECK(solve_game({1, 1}, "01", none) == Winner::PlayerII);

  CappedPointset root{2, 3, {}};
  root.insert("", Seq{});
  CHECK(solve_game(Seq{}, "", root) == Winner::PlayerI);
  CHECK(solve_game({0}, "", root) == Winner::PlayerI);

  // X = {<u,0>} only, positive budget: II pushes the sum off zero.
  CappedPointset zero{1, 3, {}};
  zero.insert("0", {0});
  CHECK(solve_game({1}, "0", zero) == Winner::PlayerII);
  CHECK(solve_game({0}, "0", zero) == Winner::PlayerI);
}

TEST_CASE("solve_game agrees with brute force oracle") {
  SplitRng rng(41);
  int ii = 0;
  for (int i = 0; i < 150; ++i) {
    int n = rng.next_int(0, 2);
    CappedPointset x = CappedPointset::random(rng, 2, 2, rng.next_int(0, 8));
    BinWord u;
    Seq f;
    for (int j = 0; j < n; ++j) {
      u.push_back(char('0' + rng.next_int(0, 1)));
      f.push_back(rng.next_int(0, 2));
    }
    Winner fast = solve_game(f, u, x);
    Winner slow = oracle_solve(f, u, x);
    if (fast == Winner::PlayerII) ++ii;
    CAPTURE(i);
    CHECK(fast == slow);
  }
  CHECK(ii > 0);  // both winners occur in the sample
}

TEST_CASE("vid extremes") {
  CappedPointset empty{2, 2, {}};
  FiniteTree v = vid(empty, 2, 2);
  CHECK(v.size() == 1 + 3 + 9);  // full capped tree

  CappedPointset root{2, 2, {}};
  root.insert("", Seq{});
  CHECK(vid(root, 2, 2).empty());
}

TEST_CASE("vid antitone") {
  SplitRng rng(43);
  for (int i = 0; i < 25; ++i) {
    CappedPointset x = CappedPointset::random(rng, 2, 2, 4);
    CappedPointset y = x;
    CappedPointset extra = CappedPointset::random(rng, 2, 2, 3);
    for (auto& p : extra.pairs) y.pairs.insert(p);
    FiniteTree vy = vid(y, 2, 2);
    FiniteTree vx = vid(x, 2, 2);
    for (const Seq& f : vy.nodes()) CHECK(vx.contains(f));
  }
}

TEST_CASE("vid union law via componentwise addition") {
  SplitRng rng(47);
  for (int i = 0; i < 10; ++i) {
    CappedPointset x = CappedPointset::random(rng, 2, 2, 4);
    CappedPointset y = CappedPointset::random(rng, 2, 2, 4);
    CappedPointset both = x;
    for (auto& p : y.pairs) both.pairs.insert(p);
    FiniteTree vx = vid(x, 2, 2);
    FiniteTree vy = vid(y, 2, 2);
    FiniteTree vu = vid(both, 2, 4);
    for (const Seq& f : vx.nodes())
      for (const Seq& g : vy.nodes()) {
        if (f.size() != g.size()) continue;
        CHECK(vu.contains(add_cw(f, g)));
      }
  }
}

TEST_CASE("ideal rank verdict") {
  CappedPointset empty{3, 2, {}};
  IdealVerdict v = ideal_rank_verdict(empty, 2, 3, 2);
  CHECK(v.in_rank_ideal == IdealVerdict::Kind::In);

  CappedPointset root{3, 2, {}};
  root.insert("", Seq{});
  IdealVerdict w = ideal_rank_verdict(root, 1, 3, 2);
  CHECK(w.in_rank_ideal == IdealVerdict::Kind::Out);
  CHECK(w.in_nti_proxy == IdealVerdict::Kind::Out);
}

TEST_CASE("sandwich on equal trees") {
  SplitRng rng(53);
  NormalTree s = NormalTree::random(rng, 2, 2);
  SandwichReport rep = check_ideal_sandwich(s, s, 2, 2);
  CHECK(rep.clean());
  CHECK(rep.checked_upper > 0);
}

TEST_CASE("sandwich on random pairs") {
  SplitRng rng(59);
  for (int i = 0; i < 4; ++i) {
    NormalTree s = NormalTree::random(rng, 2, 2);
    NormalTree t = NormalTree::random(rng, 2, 2);
    SandwichReport rep = check_ideal_sandwich(s, t, 2, 2);
    CAPTURE(i);
    CHECK(rep.clean());
  }
}

TEST_CASE("pointset json round trip") {
  SplitRng rng(61);
  CappedPointset x = CappedPointset::random(rng, 2, 3, 6);
  CappedPointset y = CappedPointset::from_json(x.to_json(), 2, 3);
  CHECK(x.pairs == y.pairs);
}
