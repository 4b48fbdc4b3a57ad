#include <doctest.h>

#include "borelkit/normal_trees.hpp"
#include "borelkit/rng.hpp"

using namespace borelkit;

TEST_CASE("nt_member generator dominance") {
  NormalTree t(2, 3);
  t.set_generators("", {Seq{}});
  t.set_generators("0", {{1}});
  CHECK(t.member("0", {2}));
  CHECK(t.member("0", {1}));
  CHECK_FALSE(t.member("0", {0}));
  CHECK_FALSE(t.member("1", {3}));
  CHECK_THROWS(t.member("0", {1, 2}));

  NormalTree none(2, 3);
  CHECK_FALSE(none.member("1", {0}));
}

TEST_CASE("minimal antichain and validation") {
  NormalTree t(2, 3);
  t.set_generators("", {Seq{}});
  t.set_generators("1", {{2}, {1}, {3}});
  CHECK(t.generators("1") == std::vector<Seq>{{1}});
  CHECK(t.validate().empty());

  NormalTree bad(2, 3);
  bad.set_generators("0", {{1}});  // no root pair
  CHECK_FALSE(bad.validate().empty());
}

TEST_CASE("random normal trees validate") {
  SplitRng rng(3);
  for (int i = 0; i < 50; ++i) {
    NormalTree t = NormalTree::random(rng, 3, 3);
    CAPTURE(i);
    CHECK(t.validate().empty());
  }
}

TEST_CASE("normal tree json round trip") {
  SplitRng rng(9);
  NormalTree t = NormalTree::random(rng, 3, 2);
  NormalTree u = NormalTree::from_json(t.to_json(), 3, 2);
  CHECK(t.to_json() == u.to_json());
  CHECK(t.to_json().contains("gen"));
}

TEST_CASE("lip identity and empty target") {
  NormalTree s = NormalTree::full(2, 2);
  // Λ and every zero-entry extension embed S into itself.
  FiniteTree l = lip(s, s, 2, 2);
  CHECK(l.contains({}));
  CHECK(l.contains({0}));
  CHECK(l.contains({0, 0}));

  NormalTree gap(2, 2);
  gap.set_generators("", {Seq{}});
  gap.set_generators("0", {{0}});
  gap.set_generators("1", {{0}});
  NormalTree empt(2, 2);
  empt.set_generators("", {Seq{}});
  // target dead at both level-1 slices: no level-1 members at all
  FiniteTree l2 = lip(gap, empt, 2, 2);
  CHECK(l2.contains({}));
  CHECK(l2.size() == 1);
}

TEST_CASE("lip shift amounts") {
  // gen_S(u) = {<0>}, gen_T(u) = {<2>} for both u: level-1 members are f >= 2.
  NormalTree s(1, 4), t(1, 4);
  s.set_generators("", {Seq{}});
  t.set_generators("", {Seq{}});
  s.set_generators("0", {{0}});
  s.set_generators("1", {{0}});
  t.set_generators("0", {{2}});
  t.set_generators("1", {{2}});
  FiniteTree l = lip(s, t, 1, 4);
  CHECK_FALSE(l.contains({1}));
  CHECK(l.contains({2}));
  CHECK(l.contains({3}));
  CHECK(l.contains({4}));
}

TEST_CASE("lip monotone in both arguments") {
  SplitRng rng(17);
  for (int i = 0; i < 30; ++i) {
    NormalTree s = NormalTree::random(rng, 3, 2);
    NormalTree t = NormalTree::random(rng, 3, 2);
    // S' ⊆ S by dropping one slice; Lip grows.
    NormalTree s2 = s;
    s2.set_generators("01", {});
    s2.set_generators("010", {});
    s2.set_generators("011", {});
    FiniteTree l = lip(s, t, 3, 2);
    FiniteTree l2 = lip(s2, t, 3, 2);
    for (const Seq& f : l.nodes()) CHECK(l2.contains(f));
  }
}

TEST_CASE("lip transitivity shadow") {
  SplitRng rng(19);
  for (int i = 0; i < 20; ++i) {
    NormalTree r = NormalTree::random(rng, 2, 2);
    NormalTree s = NormalTree::random(rng, 2, 2);
    NormalTree t = NormalTree::random(rng, 2, 2);
    FiniteTree rs = lip(r, s, 2, 2);
    FiniteTree st = lip(s, t, 2, 2);
    for (const Seq& f : rs.nodes())
      for (const Seq& g : st.nodes()) {
        if (f.size() != g.size()) continue;
        CHECK(lip_member(r, t, add_cw(f, g)));
      }
  }
}

TEST_CASE("nt verdicts") {
  NormalTree full = NormalTree::full(3, 2);
  CHECK(leq_nt_verdict(full, full, 3, 2) == RankVerdict::at_least(3, 3, 2));

  NormalTree s(3, 2);
  s.set_generators("", {Seq{}});
  s.set_generators("0", {{0}});
  NormalTree bare(3, 2);
  bare.set_generators("", {Seq{}});
  RankVerdict v = leq_nt_verdict(s, bare, 3, 2);
  CHECK(v.is_exact());
  CHECK(v.rank == 0);

  SplitRng rng(23);
  for (int i = 0; i < 20; ++i) {
    NormalTree a = NormalTree::random(rng, 3, 2);
    NormalTree b = NormalTree::random(rng, 3, 2);
    RankVerdict e = equiv_nt_verdict(a, b, 3, 2);
    CHECK(verdict_leq(e, leq_nt_verdict(a, b, 3, 2)));
    CHECK(verdict_leq(e, leq_nt_verdict(b, a, 3, 2)));
  }
}

TEST_CASE("lr_transform basics") {
  // Diagonal-only Q: R holds at <u^i, u^j, 0^s> for all s within caps.
  TriTree q(2, 2, 2);
  q.insert("", "", Seq{});
  for (int i = 0; i < 2; ++i)
    for (int v = 0; v <= 2; ++v) q.insert(std::string(1, char('0' + i)), std::string(1, char('0' + i)), Seq{v});
  TriTree r = lr_transform(q);
  CHECK(r.contains("0", "0", {0}));
  CHECK(r.contains("0", "1", {0}));  // counter 0 path of length 0 from Λ to Λ
  CHECK(r.contains("00", "01", {0, 1}));
  LrReport rep = lr_check_properties(r, 2);
  CHECK(rep.clean());
}

TEST_CASE("lr_transform single edge gets counter 1 and up") {
  TriTree q(2, 2, 2);
  q.insert("", "", Seq{});
  q.insert("0", "1", Seq{1});
  TriTree r = lr_transform(q);
  // path of length 1 from <0> to <1> at s=<1>, plus self-loop padding
  CHECK(r.contains("00", "10", {1, 1}));
  CHECK(r.contains("00", "10", {1, 2}));  // normality in s
  int kc = r.counter_cap();
  for (int k = 1; k <= kc; ++k) CHECK(r.contains("00", "10", {k, 1}));
  CHECK_FALSE(r.contains("00", "10", {0, 1}));
}

TEST_CASE("lr_check catches seeded faults") {
  TriTree r(1, 1, 1);
  r.insert("", "", Seq{});
  r.insert("0", "1", Seq{1});  // missing symmetric triple, missing diagonal
  LrReport rep = lr_check_properties(r, 1);
  bool sym = false;
  for (const auto& v : rep.violations) sym = sym || v.property == 'i';
  CHECK(sym);
}

TEST_CASE("lr_transform output clean on random Q") {
  SplitRng rng(31);
  for (int i = 0; i < 5; ++i) {
    TriTree q = TriTree::random(rng, 3, 2, 0.5);
    TriTree r = lr_transform(q);
    LrReport rep = lr_check_properties(r, 3);
    CAPTURE(i);
    CHECK(rep.clean());
  }
}

TEST_CASE("theta and Lemma j identity") {
  SplitRng rng(37);
  for (int i = 0; i < 3; ++i) {
    TriTree q = TriTree::random(rng, 3, 2, 0.5);
    TriTree r = lr_transform(q);
    std::vector<NormalTree> th;
    for (const BinWord& w : all_binwords(3)) th.push_back(theta_unchecked(r, w));
    std::vector<BinWord> words = all_binwords(3);
    for (std::size_t a = 0; a < words.size(); ++a)
      for (std::size_t b = 0; b < words.size(); ++b) {
        std::string why;
        bool ok = lip_vs_slice_pre(r, th[a], th[b], words[a], words[b], 3, &why);
        CAPTURE(why);
        CHECK(ok);
      }
  }
}

TEST_CASE("theta validates its input") {
  TriTree broken(1, 1, 1);
  broken.insert("", "", Seq{});
  broken.insert("0", "1", Seq{1});
  CHECK_THROWS(theta(broken, "0"));
}

TEST_CASE("theta of diagonal-only tree") {
  // The full diagonal satisfies (i)-(iv) on its own; its θ(x) slices are
  // exactly the pairs <x|n, s>.
  TriTree q(2, 1, 1);
  q.insert("", "", Seq{});
  for (int n = 1; n <= 2; ++n)
    for (const BinWord& u : all_binwords(n))
      for (int v0 = 0; v0 <= 1; ++v0)
        for (int v1 = 0; v1 <= 1; ++v1) {
          Seq s{v0};
          if (n == 2) s.push_back(v1);
          s.resize(n);
          q.insert(u, u, s);
        }
  NormalTree t = theta(q, "01");
  CHECK(t.member("", Seq{}));
  CHECK(t.member("0", {0}));
  CHECK(t.member("01", {0, 0}));
  CHECK_FALSE(t.member("1", {0}));
  CHECK_FALSE(t.member("00", {1, 1}));
}
