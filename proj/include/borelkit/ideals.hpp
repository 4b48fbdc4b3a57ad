#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rational.hpp"
#include "rng.hpp"

namespace borelkit {

/// Symbolic nonnegative weight sequence; convergence questions are read
/// off the family tag, values are exact rationals.
class WeightSeq {
 public:
  enum class Family { Constant, Harmonic, Geometric, DyadicValuation, EvenOddMix, Table };
  enum class TailClass { SummableToZero, DivergentToZero, DivergentBounded };

  static WeightSeq constant(const Rat& c);
  static WeightSeq harmonic();                     // 1/(n+1)
  static WeightSeq geometric(const Rat& ratio);    // ratio^n, 0 < ratio < 1
  static WeightSeq dyadic_valuation();             // 2^-v2(n+1)
  static WeightSeq even_odd_mix();                 // 1 on evens, 1/(n+1) on odds
  static WeightSeq table(std::vector<Rat> prefix, TailClass tail);

  Family family() const { return family_; }
  TailClass tail_class() const { return tail_; }
  const Rat& param() const { return param_; }
  const std::vector<Rat>& prefix() const { return prefix_; }

  Rat at(long n) const;
  Rat range_sum(long a, long b) const;  // exact Σ_{a<=j<b} r_j, divide & conquer

  bool tends_to_zero() const;
  bool sum_diverges() const;

  nlohmann::ordered_json to_json() const;
  static WeightSeq from_json(const nlohmann::json& j);

 private:
  Family family_ = Family::Harmonic;
  Rat param_ = 0;
  std::vector<Rat> prefix_;
  TailClass tail_ = TailClass::DivergentToZero;
};

/// Submeasure given by a symbolic descriptor plus an exact evaluator on
/// finite sets.
class Submeasure {
 public:
  enum class Kind {
    WeightedSum,   // Σ_{n∈x} w(n)
    MaxBlocks,     // sup_n w(n)·#(x ∩ [2^n, 2^{n+1}))
    ScaledCount,   // Σ_k k^-2·min(k, #(x ∩ [2^k, 2^{k+1}))), k >= 1
    CountingOne,   // 1 for x ≠ ∅
  };

  static Submeasure weighted_sum(WeightSeq w);
  static Submeasure max_blocks(WeightSeq scale);
  static Submeasure scaled_count();
  static Submeasure counting_one();

  Kind kind() const { return kind_; }
  const WeightSeq& weights() const { return w_; }
  bool lsc() const { return kind_ != Kind::CountingOne; }

  Rat eval(const std::vector<long>& finite_set) const;

 private:
  Kind kind_ = Kind::WeightedSum;
  WeightSeq w_ = WeightSeq::harmonic();
};

/// Finitely described subset of ℕ with decidable pointwise membership and
/// partially decidable asymptotic structure.
class SetDesc {
 public:
  enum class Kind { Finite, Periodic, SparseGeo, SparsePoly, Union, Inter, Diff, SymDiff, Compl };
  enum class Card { Finite, Infinite, Unknown };
  enum class SumClass { Converges, Diverges, Unknown };

  static SetDesc finite(std::vector<long> values);
  static SetDesc empty() { return finite({}); }
  // prefix then repeating period (bits, period nonempty).
  static SetDesc periodic(std::vector<char> prefix, std::vector<char> period);
  static SetDesc cofinite(const std::vector<long>& excluded);
  static SetDesc all() { return periodic({}, {1}); }
  static SetDesc sparse_geo(long start, long base);            // {start·base^k}
  static SetDesc sparse_poly(long scale, int degree);          // {scale·k^degree}
  static SetDesc unions(SetDesc a, SetDesc b);
  static SetDesc inter(SetDesc a, SetDesc b);
  static SetDesc diff(SetDesc a, SetDesc b);
  static SetDesc sym_diff(SetDesc a, SetDesc b);
  static SetDesc complement(SetDesc a);

  Kind kind() const { return kind_; }
  const SetDesc* left() const { return left_.get(); }
  const SetDesc* right() const { return right_.get(); }
  long sparse_start() const { return a_; }   // SparseGeo / SparsePoly parameter
  long sparse_param() const { return b_; }   // base resp. degree
  bool contains(long n) const;
  std::vector<long> window(long lo, long hi) const;  // members in [lo,hi)

  Card cardinality() const;
  std::optional<Rat> density() const;  // exact asymptotic density when known
  SumClass harmonic_class() const { return weighted_class(WeightSeq::harmonic()); }
  SumClass weighted_class(const WeightSeq& w) const;

  // Eventually-periodic normal form (prefix bits, period bits) when the
  // descriptor is a boolean combination of finite and periodic parts.
  std::optional<std::pair<std::vector<char>, std::vector<char>>> normal_form() const;

  nlohmann::ordered_json to_json() const;
  static SetDesc from_json(const nlohmann::json& j);

  static SetDesc random_decidable(SplitRng& rng);  // Finite / Periodic / Sparse

 private:
  Kind kind_ = Kind::Finite;
  std::vector<long> values_;
  std::vector<char> prefix_, period_;
  long a_ = 0, b_ = 0;  // sparse parameters
  std::shared_ptr<SetDesc> left_, right_;
};

/// Descriptor of a point of a product space: a leaf set or finitely many
/// explicit columns plus a default column (absent default = empty).
class NestedDesc {
 public:
  static NestedDesc leaf(SetDesc s);
  static NestedDesc matrix(std::map<long, NestedDesc> cols,
                           std::optional<NestedDesc> default_col = std::nullopt);

  bool is_leaf() const { return leaf_.has_value(); }
  const SetDesc& as_leaf() const { return *leaf_; }
  const std::map<long, std::shared_ptr<NestedDesc>>& columns() const { return cols_; }
  const NestedDesc* default_column() const { return default_.get(); }

  // tri-state emptiness
  enum class Tri { Yes, No, Unknown };
  Tri empty() const;

  nlohmann::ordered_json to_json() const;
  static NestedDesc from_json(const nlohmann::json& j);

 private:
  std::optional<SetDesc> leaf_;
  std::map<long, std::shared_ptr<NestedDesc>> cols_;
  std::shared_ptr<NestedDesc> default_;
};

struct Verdict {
  enum class V { In, Out, Unknown };
  V v = V::Unknown;
  std::string note;

  bool in() const { return v == V::In; }
  bool out() const { return v == V::Out; }
  bool definite() const { return v != V::Unknown; }
  static Verdict make_in() { return {V::In, ""}; }
  static Verdict make_out() { return {V::Out, ""}; }
  static Verdict unknown(std::string why) { return {V::Unknown, std::move(why)}; }
  const char* str() const { return v == V::In ? "In" : v == V::Out ? "Out" : "Unknown"; }
};

/// ξ < ω·2 as ω·limit + finite.
struct FrechetOrd {
  int limit = 0;   // 0 or 1
  int finite = 1;  // ξ = ω·limit + finite; ξ >= 1
};

/// Symbolic member of the ideal zoo, closed under the operations.
class Ideal {
 public:
  enum class Kind {
    Zero,           // {∅}
    Fin,
    FinTimes0,      // finitely many nonempty columns
    ZeroTimesFin,   // every column finite
    Summable,
    Density0,
    ErdosUlam,
    DensityIdeal,   // Exh of sup of scaled dyadic-block counts
    Exh,
    Frechet,
    DisjointSum,
    FubiniSum,
    FubiniProduct,
    Restrict,
    TrivialVariation,
  };

  static Ideal zero();
  static Ideal fin();
  static Ideal fin_times_0();
  static Ideal zero_times_fin();
  static Ideal summable(WeightSeq w);
  static Ideal density0();
  static Ideal erdos_ulam(WeightSeq w);
  static Ideal density_ideal(WeightSeq scale);
  static Ideal exh(Submeasure phi);
  static Ideal frechet(FrechetOrd xi);
  static Ideal disjoint_sum(Ideal a, Ideal b);
  static Ideal fubini_sum(Ideal index, std::map<long, Ideal> cols, Ideal default_col);
  static Ideal fubini_product(Ideal a, Ideal b);
  static Ideal restrict(Ideal a, SetDesc b);
  static Ideal trivial_variation(Ideal a);

  Kind kind() const { return kind_; }
  std::string name() const;
  const WeightSeq* weight_seq() const { return w_ ? &*w_ : nullptr; }
  const Submeasure* submeasure() const { return phi_ ? &*phi_ : nullptr; }
  FrechetOrd xi() const { return xi_; }

 private:
  friend Verdict membership(const Ideal&, const NestedDesc&);
  Kind kind_ = Kind::Fin;
  std::optional<WeightSeq> w_;
  std::optional<Submeasure> phi_;
  FrechetOrd xi_;
  std::vector<std::shared_ptr<Ideal>> children_;
  std::map<long, std::shared_ptr<Ideal>> col_ideals_;
  std::optional<SetDesc> set_;
};

// Closed-form decision where the (ideal family, descriptor) pair admits
// one; Unknown with a partial-sum window note otherwise.
Verdict membership(const Ideal& ideal, const NestedDesc& x);
Verdict membership(const Ideal& ideal, const SetDesc& x);

Rat submeasure_eval(const Submeasure& phi, const std::vector<long>& x);

enum class SummableClass { Atomic, Dense, Sliced, FinPlusDense, Unknown };
SummableClass classify_summable(const WeightSeq& r);
const char* summable_class_str(SummableClass c);

/// Fraction that is not kept canonical: the harmonic block sums below have
/// denominators in the 10^5-digit range, where a single gcd would dominate
/// the whole construction. Comparisons go through cross-multiplication.
struct BigFrac {
  mpz_class num{0};
  mpz_class den{1};  // > 0
};

BigFrac bf_add(const BigFrac& a, const BigFrac& b);
int bf_cmp(const BigFrac& a, const Rat& q);  // sign of a - q
double bf_double(const BigFrac& a);
// |q - a| < 2^-e, exactly.
bool bf_within_pow2(const BigFrac& a, const Rat& q, unsigned e);

/// Consecutive index blocks witnessing a Rudin–Blass style reduction of
/// S_p to S_r: |p_i − Σ_{j∈w_i} r_j| < 2^-i, max w_i < min w_{i+1}.
struct BlockWitness {
  struct Block {
    std::vector<std::pair<long, long>> runs;  // half-open index ranges
    double sum_approx = 0;                    // for reports; checks recompute exactly
    long lo() const { return runs.front().first; }
    long hi() const { return runs.back().second; }
    bool empty_block() const { return runs.empty(); }
  };
  std::vector<Block> blocks;
  nlohmann::ordered_json to_json() const;
};

// Exact Σ r over half-open ranges, gcd-free divide and conquer.
BigFrac range_sum_frac(const WeightSeq& r, long a, long b);

// Greedy left-to-right construction; throws when the target accuracy is
// unreachable before index_cap.
BlockWitness rb_witness_summable(const WeightSeq& p, const WeightSeq& r, int imax,
                                 long index_cap = 50'000'000);

struct WitnessCheck {
  int agree = 0;
  int disagree = 0;
  int unknown = 0;
  bool bounds_ok = true;
  bool ordered_ok = true;
  std::vector<std::string> notes;
  bool clean() const { return disagree == 0 && bounds_ok && ordered_ok; }
  nlohmann::ordered_json to_json() const;
};

// Recomputes the block sums independently, checks ordering and the 2^-i
// bounds, and compares source/image verdicts on sampled index sets.
WitnessCheck check_rb_witness(const BlockWitness& w, const WeightSeq& p, const WeightSeq& r,
                              int samples, SplitRng& rng);

// Approximate Δ-homomorphism check: condition (1) (θx Δ θy) Δ θ(xΔy) ∈ J
// and condition (2) x ∈ I ⟺ θx ∈ J on sampled decidable descriptors.
struct HomCheck {
  int cond1_pass = 0, cond1_fail = 0;
  int cond2_agree = 0, cond2_disagree = 0;
  int unknown = 0;
  std::vector<std::string> notes;
  bool clean() const { return cond1_fail == 0 && cond2_disagree == 0; }
  nlohmann::ordered_json to_json() const;
};

using SetMap = std::function<SetDesc(const SetDesc&)>;
HomCheck check_delta_homomorphism(const SetMap& theta, const Ideal& i, const Ideal& j,
                                  int samples, SplitRng& rng);

}  // namespace borelkit
