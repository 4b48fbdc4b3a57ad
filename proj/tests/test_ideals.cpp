#include <doctest.h>

#include <set>

#include "borelkit/ideals.hpp"

using namespace borelkit;

TEST_CASE("submeasure evaluation") {
  Submeasure harm = Submeasure::weighted_sum(WeightSeq::harmonic());
  CHECK(submeasure_eval(harm, {0, 1}) == rat(3, 2));
  CHECK(submeasure_eval(harm, {}) == 0);

  Submeasure one = Submeasure::counting_one();
  CHECK(submeasure_eval(one, {7}) == 1);
  CHECK(submeasure_eval(one, {}) == 0);

  Submeasure sc = Submeasure::scaled_count();
  // {4,5,6} lies in block k=2: min(2,3)/4 = 1/2
  CHECK(submeasure_eval(sc, {4, 5, 6}) == rat(1, 2));
}

TEST_CASE("submeasures monotone and subadditive on samples") {
  SplitRng rng(71);
  std::vector<Submeasure> phis{Submeasure::weighted_sum(WeightSeq::harmonic()),
                               Submeasure::max_blocks(WeightSeq::geometric(rat(1, 2))),
                               Submeasure::scaled_count(), Submeasure::counting_one()};
  for (int t = 0; t < 60; ++t) {
    std::vector<long> x, y;
    for (int i = 0; i < 12; ++i) {
      long v = rng.next_int(0, 40);
      if (rng.next_bool()) x.push_back(v);
      if (rng.next_bool()) y.push_back(v + rng.next_int(0, 5));
    }
    std::vector<long> xy = x;
    xy.insert(xy.end(), y.begin(), y.end());
    std::sort(xy.begin(), xy.end());
    xy.erase(std::unique(xy.begin(), xy.end()), xy.end());
    for (const Submeasure& phi : phis) {
      Rat fx = phi.eval(x), fy = phi.eval(y), fxy = phi.eval(xy);
      CHECK(fx <= fxy);
      CHECK(fxy <= fx + fy);
    }
  }
}

TEST_CASE("basic membership verdicts") {
  Ideal z0 = Ideal::density0();
  Ideal sum = Ideal::summable(WeightSeq::harmonic());

  // infinite ultimately periodic: positive density
  SetDesc evens = SetDesc::periodic({}, {1, 0});
  CHECK(membership(z0, evens).out());
  CHECK(membership(sum, evens).out());

  // geometric sparse sets are summable and density zero
  SetDesc geo = SetDesc::sparse_geo(1, 2);
  CHECK(membership(sum, geo).in());
  CHECK(membership(z0, geo).in());

  // finite sets lie in every ideal
  SetDesc f = SetDesc::finite({3, 5, 19});
  CHECK(membership(z0, f).in());
  CHECK(membership(sum, f).in());
  CHECK(membership(Ideal::fin(), f).in());
  CHECK(membership(Ideal::fin(), SetDesc::complement(f)).out());

  // linear sparse set: density 1/scale
  SetDesc lin = SetDesc::sparse_poly(3, 1);
  CHECK(membership(z0, lin).out());
  CHECK(membership(sum, lin).out());
  SetDesc quad = SetDesc::sparse_poly(1, 2);
  CHECK(membership(z0, quad).in());
  CHECK(membership(sum, quad).in());

  CHECK_THROWS(Ideal::summable(WeightSeq::geometric(rat(1, 2))));  // trivial ideal
}

TEST_CASE("membership stable under descriptor normalization") {
  Ideal fin = Ideal::fin();
  SetDesc a = SetDesc::finite({1, 2});
  SetDesc b = SetDesc::finite({2, 7});
  SetDesc u = SetDesc::unions(a, b);
  SetDesc merged = SetDesc::finite({1, 2, 7});
  CHECK(membership(fin, u).v == membership(fin, merged).v);

  SplitRng rng(73);
  Ideal z0 = Ideal::density0();
  for (int i = 0; i < 80; ++i) {
    SetDesc x = SetDesc::random_decidable(rng);
    SetDesc doubled = SetDesc::unions(x, x);
    Verdict v1 = membership(z0, x);
    Verdict v2 = membership(z0, doubled);
    if (v1.definite() && v2.definite()) CHECK(v1.v == v2.v);
  }
}

TEST_CASE("erdos-ulam and restriction") {
  Ideal zlog = Ideal::erdos_ulam(WeightSeq::harmonic());
  CHECK(membership(zlog, SetDesc::periodic({}, {1, 0})).out());
  CHECK(membership(zlog, SetDesc::sparse_geo(1, 2)).in());

  // restrict(Z0, evens): density within the substrate
  Ideal rz = Ideal::restrict(Ideal::density0(), SetDesc::periodic({}, {1, 0}));
  CHECK(membership(rz, SetDesc::periodic({}, {0, 1})).in());  // odds: empty trace
  CHECK(membership(rz, SetDesc::all()).out());
}

TEST_CASE("disjoint sum splits by side") {
  Ideal ds = Ideal::disjoint_sum(Ideal::fin(), Ideal::fin());
  CHECK(membership(ds, SetDesc::finite({0, 1, 2, 3})).in());
  CHECK(membership(ds, SetDesc::periodic({}, {1, 0})).out());  // even side infinite

  // Fin ⊕ P(ℕ) as a trivial variation: free on the odd side
  Ideal tv = Ideal::trivial_variation(Ideal::fin());
  CHECK(membership(tv, SetDesc::periodic({}, {0, 1})).in());   // all odds
  CHECK(membership(tv, SetDesc::periodic({}, {1})).out());     // all of ℕ
}

TEST_CASE("matrix ideals I1 and I3") {
  Ideal i1 = Ideal::fin_times_0();
  Ideal i3 = Ideal::zero_times_fin();

  std::map<long, NestedDesc> cols;
  cols.emplace(0, NestedDesc::leaf(SetDesc::periodic({}, {1})));
  cols.emplace(4, NestedDesc::leaf(SetDesc::finite({1})));
  NestedDesc m = NestedDesc::matrix(std::move(cols));
  CHECK(membership(i1, m).in());    // finitely many nonempty columns
  CHECK(membership(i3, m).out());   // column 0 infinite

  std::map<long, NestedDesc> cols2;
  cols2.emplace(0, NestedDesc::leaf(SetDesc::finite({1, 2})));
  NestedDesc m2 = NestedDesc::matrix(std::move(cols2),
                                     NestedDesc::leaf(SetDesc::finite({9})));
  CHECK(membership(i1, m2).out());  // default column nonempty: infinitely many
  CHECK(membership(i3, m2).in());   // every column finite
}

TEST_CASE("fubini identities match the direct verdicts") {
  Ideal direct1 = Ideal::fin_times_0();
  Ideal fub1 = Ideal::fubini_product(Ideal::fin(), Ideal::zero());
  Ideal direct3 = Ideal::zero_times_fin();
  Ideal fub3 = Ideal::fubini_product(Ideal::zero(), Ideal::fin());

  SplitRng rng(79);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    std::map<long, NestedDesc> cols;
    int n = rng.next_int(0, 4);
    for (int c = 0; c < n; ++c)
      cols.emplace(rng.next_int(0, 9), NestedDesc::leaf(SetDesc::random_decidable(rng)));
    std::optional<NestedDesc> def;
    if (rng.next_bool()) def = NestedDesc::leaf(SetDesc::random_decidable(rng));
    NestedDesc m = NestedDesc::matrix(std::move(cols), std::move(def));
    Verdict a1 = membership(direct1, m), b1 = membership(fub1, m);
    Verdict a3 = membership(direct3, m), b3 = membership(fub3, m);
    if (a1.definite() && b1.definite()) {
      CHECK(a1.v == b1.v);
      ++checked;
    }
    if (a3.definite() && b3.definite()) {
      CHECK(a3.v == b3.v);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("frechet ideals") {
  Ideal f1 = Ideal::frechet({0, 1});
  CHECK(membership(f1, SetDesc::finite({1, 2})).in());
  CHECK(membership(f1, SetDesc::all()).out());

  // F2 = Fin x Fin: finitely many infinite columns
  Ideal f2 = Ideal::frechet({0, 2});
  std::map<long, NestedDesc> cols;
  cols.emplace(2, NestedDesc::leaf(SetDesc::all()));
  cols.emplace(5, NestedDesc::leaf(SetDesc::finite({0})));
  CHECK(membership(f2, NestedDesc::matrix(std::move(cols))).in());

  std::map<long, NestedDesc> cols2;
  cols2.emplace(1, NestedDesc::leaf(SetDesc::finite({3})));
  CHECK(membership(
            f2, NestedDesc::matrix(std::move(cols2), NestedDesc::leaf(SetDesc::all())))
            .out());

  // F_ω: block k is tested in F_{ξ_k}, ξ_k = k
  Ideal fw = Ideal::frechet({1, 0});
  std::map<long, NestedDesc> blocks;
  blocks.emplace(1, NestedDesc::leaf(SetDesc::finite({1})));  // F_1 = Fin
  std::map<long, NestedDesc> inner;
  inner.emplace(0, NestedDesc::leaf(SetDesc::all()));
  blocks.emplace(2, NestedDesc::matrix(std::move(inner)));    // F_2 allows one bad column
  CHECK(membership(fw, NestedDesc::matrix(std::move(blocks))).in());

  CHECK_THROWS(Ideal::frechet({0, 0}));
}

TEST_CASE("exh ideals") {
  CHECK(membership(Ideal::exh(Submeasure::counting_one()), SetDesc::sparse_geo(1, 2)).out());
  CHECK(membership(Ideal::exh(Submeasure::counting_one()), SetDesc::finite({4})).in());

  Ideal farah = Ideal::exh(Submeasure::scaled_count());
  CHECK(membership(farah, SetDesc::sparse_geo(1, 2)).in());
  CHECK(membership(farah, SetDesc::periodic({}, {1, 0})).out());
  CHECK(membership(farah, SetDesc::sparse_poly(1, 2)).out());
}

TEST_CASE("classify_summable") {
  CHECK(classify_summable(WeightSeq::harmonic()) == SummableClass::Dense);
  CHECK(classify_summable(WeightSeq::constant(1)) == SummableClass::Atomic);
  CHECK(classify_summable(WeightSeq::even_odd_mix()) == SummableClass::FinPlusDense);
  CHECK(classify_summable(WeightSeq::dyadic_valuation()) == SummableClass::Sliced);
}

TEST_CASE("classify tags are mutually exclusive on the fixtures") {
  std::vector<WeightSeq> ws{WeightSeq::harmonic(), WeightSeq::constant(1),
                            WeightSeq::even_odd_mix(), WeightSeq::dyadic_valuation()};
  std::set<SummableClass> seen;
  for (const WeightSeq& w : ws) seen.insert(classify_summable(w));
  CHECK(seen.size() == ws.size());
}

TEST_CASE("rb witness blocks") {
  std::vector<Rat> p{Rat(1), rat(1, 2)};
  WeightSeq ps = WeightSeq::table(p, WeightSeq::TailClass::DivergentToZero);
  BlockWitness w = rb_witness_summable(ps, WeightSeq::harmonic(), 1);
  REQUIRE(w.blocks.size() == 2);
  CHECK(w.blocks[0].runs == std::vector<std::pair<long, long>>{{0, 1}});
  CHECK(bf_cmp(range_sum_frac(WeightSeq::harmonic(), 0, 1), Rat(1)) == 0);
  CHECK(w.blocks[1].runs == std::vector<std::pair<long, long>>{{1, 2}});
  CHECK(bf_within_pow2(range_sum_frac(WeightSeq::harmonic(), 1, 2), rat(1, 2), 30));
}

TEST_CASE("rb witness at acceptance size") {
  // Harmonic blocks summing to p stretch the index range by a factor e^p,
  // so the sampler keeps the total Σp moderate while still covering (0,2].
  SplitRng rng(83);
  std::vector<Rat> pv;
  for (int i = 0; i <= 16; ++i) {
    if (i % 8 == 0)
      pv.push_back(rat(33 + rng.next_int(0, 31), 32));  // occasionally > 1
    else
      pv.push_back(rat(1 + rng.next_int(0, 31), 32));   // (0,1]
  }
  WeightSeq p = WeightSeq::table(pv, WeightSeq::TailClass::DivergentBounded);
  BlockWitness w = rb_witness_summable(p, WeightSeq::harmonic(), 16);
  SplitRng check_rng(5);
  WitnessCheck chk = check_rb_witness(w, p, WeightSeq::harmonic(), 20, check_rng);
  CAPTURE(chk.notes.empty() ? "" : chk.notes.front());
  CHECK(chk.clean());
  CHECK(chk.agree == 20);
}

TEST_CASE("delta homomorphism checks") {
  SplitRng rng(89);
  SetMap identity = [](const SetDesc& s) { return s; };
  HomCheck ok = check_delta_homomorphism(identity, Ideal::fin(), Ideal::fin(), 40, rng);
  CHECK(ok.clean());
  CHECK(ok.cond1_pass > 0);

  // faulty map: drops everything; condition (2) must surface disagreements
  SetMap drop = [](const SetDesc&) { return SetDesc::empty(); };
  SplitRng rng2(97);
  HomCheck bad = check_delta_homomorphism(drop, Ideal::fin(), Ideal::fin(), 40, rng2);
  CHECK(bad.cond2_disagree > 0);
}

TEST_CASE("descriptor json round trip") {
  SplitRng rng(101);
  for (int i = 0; i < 40; ++i) {
    SetDesc s = SetDesc::random_decidable(rng);
    SetDesc t = SetDesc::from_json(s.to_json());
    for (long n = 0; n < 80; ++n) CHECK(s.contains(n) == t.contains(n));
  }
}
