#include "borelkit/ideals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace borelkit {

// ---------------------------------------------------------------- WeightSeq

WeightSeq WeightSeq::constant(const Rat& c) {
  WeightSeq w;
  w.family_ = Family::Constant;
  w.param_ = c;
  w.tail_ = c > 0 ? TailClass::DivergentBounded : TailClass::SummableToZero;
  return w;
}

WeightSeq WeightSeq::harmonic() {
  WeightSeq w;
  w.family_ = Family::Harmonic;
  w.tail_ = TailClass::DivergentToZero;
  return w;
}

WeightSeq WeightSeq::geometric(const Rat& ratio) {
  if (ratio <= 0 || ratio >= 1) throw std::invalid_argument("geometric ratio outside (0,1)");
  WeightSeq w;
  w.family_ = Family::Geometric;
  w.param_ = ratio;
  w.tail_ = TailClass::SummableToZero;
  return w;
}

WeightSeq WeightSeq::dyadic_valuation() {
  WeightSeq w;
  w.family_ = Family::DyadicValuation;
  w.tail_ = TailClass::DivergentBounded;
  return w;
}

WeightSeq WeightSeq::even_odd_mix() {
  WeightSeq w;
  w.family_ = Family::EvenOddMix;
  w.tail_ = TailClass::DivergentBounded;
  return w;
}

WeightSeq WeightSeq::table(std::vector<Rat> prefix, TailClass tail) {
  WeightSeq w;
  w.family_ = Family::Table;
  w.prefix_ = std::move(prefix);
  w.tail_ = tail;
  return w;
}

Rat WeightSeq::at(long n) const {
  switch (family_) {
    case Family::Constant: return param_;
    case Family::Harmonic: return rat(1, n + 1);
    case Family::Geometric: {
      Rat p = 1;
      for (long i = 0; i < n; ++i) p *= param_;
      return p;
    }
    case Family::DyadicValuation: {
      long m = n + 1;
      unsigned e = 0;
      while (m % 2 == 0) {
        m /= 2;
        ++e;
      }
      return pow2_neg(e);
    }
    case Family::EvenOddMix: return n % 2 == 0 ? Rat(1) : rat(1, n + 1);
    case Family::Table:
      if (n < static_cast<long>(prefix_.size())) return prefix_[n];
      throw std::out_of_range("table weight beyond declared prefix");
  }
  return 0;
}

Rat WeightSeq::range_sum(long a, long b) const {
  if (b <= a) return 0;
  if (b - a <= 16) {
    Rat s = 0;
    for (long j = a; j < b; ++j) s += at(j);
    return s;
  }
  long m = a + (b - a) / 2;
  return range_sum(a, m) + range_sum(m, b);
}

bool WeightSeq::tends_to_zero() const {
  switch (family_) {
    case Family::Constant: return param_ == 0;
    case Family::Harmonic:
    case Family::Geometric: return true;
    case Family::DyadicValuation: return false;
    case Family::EvenOddMix: return false;
    case Family::Table: return tail_ != TailClass::DivergentBounded;
  }
  return false;
}

bool WeightSeq::sum_diverges() const {
  switch (family_) {
    case Family::Constant: return param_ > 0;
    case Family::Harmonic:
    case Family::DyadicValuation:
    case Family::EvenOddMix: return true;
    case Family::Geometric: return false;
    case Family::Table: return tail_ != TailClass::SummableToZero;
  }
  return false;
}

nlohmann::ordered_json WeightSeq::to_json() const {
  nlohmann::ordered_json j;
  switch (family_) {
    case Family::Constant:
      j["family"] = "constant";
      j["value"] = rat_str(param_);
      break;
    case Family::Harmonic: j["family"] = "harmonic"; break;
    case Family::Geometric:
      j["family"] = "geometric";
      j["ratio"] = rat_str(param_);
      break;
    case Family::DyadicValuation: j["family"] = "dyadicValuation"; break;
    case Family::EvenOddMix: j["family"] = "evenOddMix"; break;
    case Family::Table: {
      j["family"] = "table";
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const Rat& q : prefix_) arr.push_back(rat_str(q));
      j["prefix"] = arr;
      j["tail"] = tail_ == TailClass::SummableToZero      ? "summableToZero"
                  : tail_ == TailClass::DivergentToZero   ? "divergentToZero"
                                                          : "divergentBounded";
      break;
    }
  }
  return j;
}

WeightSeq WeightSeq::from_json(const nlohmann::json& j) {
  std::string fam = j.at("family").get<std::string>();
  if (fam == "constant") return constant(rat_parse(j.at("value").get<std::string>()));
  if (fam == "harmonic") return harmonic();
  if (fam == "geometric") return geometric(rat_parse(j.at("ratio").get<std::string>()));
  if (fam == "dyadicValuation") return dyadic_valuation();
  if (fam == "evenOddMix") return even_odd_mix();
  if (fam == "table") {
    std::vector<Rat> pre;
    for (const auto& e : j.at("prefix")) pre.push_back(rat_parse(e.get<std::string>()));
    std::string t = j.at("tail").get<std::string>();
    TailClass tc = t == "summableToZero"    ? TailClass::SummableToZero
                   : t == "divergentToZero" ? TailClass::DivergentToZero
                                            : TailClass::DivergentBounded;
    return table(std::move(pre), tc);
  }
  throw std::invalid_argument("unknown weight family: " + fam);
}

// --------------------------------------------------------------- Submeasure

Submeasure Submeasure::weighted_sum(WeightSeq w) {
  Submeasure s;
  s.kind_ = Kind::WeightedSum;
  s.w_ = std::move(w);
  return s;
}

Submeasure Submeasure::max_blocks(WeightSeq scale) {
  Submeasure s;
  s.kind_ = Kind::MaxBlocks;
  s.w_ = std::move(scale);
  return s;
}

Submeasure Submeasure::scaled_count() {
  Submeasure s;
  s.kind_ = Kind::ScaledCount;
  return s;
}

Submeasure Submeasure::counting_one() {
  Submeasure s;
  s.kind_ = Kind::CountingOne;
  return s;
}

Rat Submeasure::eval(const std::vector<long>& raw) const {
  std::vector<long> x = raw;
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  switch (kind_) {
    case Kind::WeightedSum: {
      Rat s = 0;
      for (long n : x) s += w_.at(n);
      return s;
    }
    case Kind::MaxBlocks: {
      std::map<int, long> counts;
      for (long n : x) {
        int blk = 0;
        while ((2L << blk) <= n) ++blk;  // n in [2^blk, 2^{blk+1})
        ++counts[blk];
      }
      Rat best = 0;
      for (auto& [blk, cnt] : counts) best = std::max(best, Rat(w_.at(blk) * cnt));
      return best;
    }
    case Kind::ScaledCount: {
      std::map<long, long> counts;
      for (long n : x) {
        long k = 0;
        while ((2L << k) <= n) ++k;
        if (k >= 1) ++counts[k];
      }
      Rat s = 0;
      for (auto& [k, cnt] : counts) s += rat(std::min(k, cnt), 1) / rat(k * k, 1);
      return s;
    }
    case Kind::CountingOne: return x.empty() ? 0 : 1;
  }
  return 0;
}

Rat submeasure_eval(const Submeasure& phi, const std::vector<long>& x) {
  for (long n : x)
    if (n < 0) throw std::invalid_argument("negative element");
  return phi.eval(x);
}

// ------------------------------------------------------------------ SetDesc

SetDesc SetDesc::finite(std::vector<long> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  SetDesc s;
  s.kind_ = Kind::Finite;
  s.values_ = std::move(values);
  return s;
}

SetDesc SetDesc::periodic(std::vector<char> prefix, std::vector<char> period) {
  if (period.empty()) throw std::invalid_argument("empty period");
  SetDesc s;
  s.kind_ = Kind::Periodic;
  s.prefix_ = std::move(prefix);
  s.period_ = std::move(period);
  return s;
}

SetDesc SetDesc::cofinite(const std::vector<long>& excluded) {
  long hi = 0;
  for (long v : excluded) hi = std::max(hi, v + 1);
  std::vector<char> prefix(hi, 1);
  for (long v : excluded) prefix[v] = 0;
  return periodic(std::move(prefix), {1});
}

SetDesc SetDesc::sparse_geo(long start, long base) {
  if (start < 1 || base < 2) throw std::invalid_argument("sparse_geo parameters");
  SetDesc s;
  s.kind_ = Kind::SparseGeo;
  s.a_ = start;
  s.b_ = base;
  return s;
}

SetDesc SetDesc::sparse_poly(long scale, int degree) {
  if (scale < 1 || degree < 1) throw std::invalid_argument("sparse_poly parameters");
  SetDesc s;
  s.kind_ = Kind::SparsePoly;
  s.a_ = scale;
  s.b_ = degree;
  return s;
}

SetDesc SetDesc::unions(SetDesc a, SetDesc b) {
  SetDesc s;
  s.kind_ = Kind::Union;
  s.left_ = std::make_shared<SetDesc>(std::move(a));
  s.right_ = std::make_shared<SetDesc>(std::move(b));
  return s;
}

SetDesc SetDesc::inter(SetDesc a, SetDesc b) {
  SetDesc s;
  s.kind_ = Kind::Inter;
  s.left_ = std::make_shared<SetDesc>(std::move(a));
  s.right_ = std::make_shared<SetDesc>(std::move(b));
  return s;
}

SetDesc SetDesc::diff(SetDesc a, SetDesc b) {
  SetDesc s;
  s.kind_ = Kind::Diff;
  s.left_ = std::make_shared<SetDesc>(std::move(a));
  s.right_ = std::make_shared<SetDesc>(std::move(b));
  return s;
}

SetDesc SetDesc::sym_diff(SetDesc a, SetDesc b) {
  SetDesc s;
  s.kind_ = Kind::SymDiff;
  s.left_ = std::make_shared<SetDesc>(std::move(a));
  s.right_ = std::make_shared<SetDesc>(std::move(b));
  return s;
}

SetDesc SetDesc::complement(SetDesc a) {
  SetDesc s;
  s.kind_ = Kind::Compl;
  s.left_ = std::make_shared<SetDesc>(std::move(a));
  return s;
}

bool SetDesc::contains(long n) const {
  if (n < 0) return false;
  switch (kind_) {
    case Kind::Finite: return std::binary_search(values_.begin(), values_.end(), n);
    case Kind::Periodic:
      if (n < static_cast<long>(prefix_.size())) return prefix_[n];
      return period_[(n - prefix_.size()) % period_.size()];
    case Kind::SparseGeo: {
      long v = a_;
      while (v < n && v <= (1L << 62) / b_) v *= b_;
      return v == n;
    }
    case Kind::SparsePoly: {
      for (long k = 0;; ++k) {
        long p = a_;
        for (int i = 0; i < b_; ++i) p *= k;
        if (p == n) return true;
        if (p > n) return false;
      }
    }
    case Kind::Union: return left_->contains(n) || right_->contains(n);
    case Kind::Inter: return left_->contains(n) && right_->contains(n);
    case Kind::Diff: return left_->contains(n) && !right_->contains(n);
    case Kind::SymDiff: return left_->contains(n) != right_->contains(n);
    case Kind::Compl: return !left_->contains(n);
  }
  return false;
}

std::vector<long> SetDesc::window(long lo, long hi) const {
  std::vector<long> out;
  for (long n = std::max(0L, lo); n < hi; ++n)
    if (contains(n)) out.push_back(n);
  return out;
}

std::optional<std::pair<std::vector<char>, std::vector<char>>> SetDesc::normal_form() const {
  constexpr long kMaxPeriod = 4096;
  auto eval = [](const std::pair<std::vector<char>, std::vector<char>>& nf, long n) -> bool {
    if (n < static_cast<long>(nf.first.size())) return nf.first[n];
    return nf.second[(n - nf.first.size()) % nf.second.size()];
  };
  switch (kind_) {
    case Kind::Finite: {
      std::vector<char> pre(values_.empty() ? 0 : values_.back() + 1, 0);
      for (long v : values_) pre[v] = 1;
      return std::make_pair(pre, std::vector<char>{0});
    }
    case Kind::Periodic: return std::make_pair(prefix_, period_);
    case Kind::SparseGeo:
    case Kind::SparsePoly: return std::nullopt;
    case Kind::Compl: {
      auto nf = left_->normal_form();
      if (!nf) return std::nullopt;
      for (auto& b : nf->first) b = !b;
      for (auto& b : nf->second) b = !b;
      return nf;
    }
    default: {
      auto lf = left_->normal_form();
      auto rf = right_ ? right_->normal_form() : std::nullopt;
      if (!lf || !rf) return std::nullopt;
      long p = std::lcm<long>(lf->second.size(), rf->second.size());
      if (p > kMaxPeriod) return std::nullopt;
      long pre = std::max(lf->first.size(), rf->first.size());
      std::vector<char> prefix(pre), period(p);
      auto op = [&](bool x, bool y) {
        switch (kind_) {
          case Kind::Union: return x || y;
          case Kind::Inter: return x && y;
          case Kind::Diff: return x && !y;
          default: return x != y;  // SymDiff
        }
      };
      for (long n = 0; n < pre; ++n) prefix[n] = op(eval(*lf, n), eval(*rf, n));
      for (long i = 0; i < p; ++i)
        period[i] = op(eval(*lf, pre + i), eval(*rf, pre + i));
      return std::make_pair(prefix, period);
    }
  }
}

namespace {

bool nf_infinite(const std::pair<std::vector<char>, std::vector<char>>& nf) {
  for (char b : nf.second)
    if (b) return true;
  return false;
}

Rat nf_density(const std::pair<std::vector<char>, std::vector<char>>& nf) {
  long ones = 0;
  for (char b : nf.second) ones += b;
  return rat(ones, static_cast<long>(nf.second.size()));
}

}  // namespace

SetDesc::Card SetDesc::cardinality() const {
  if (auto nf = normal_form()) return nf_infinite(*nf) ? Card::Infinite : Card::Finite;
  switch (kind_) {
    case Kind::SparseGeo:
    case Kind::SparsePoly: return Card::Infinite;
    case Kind::Union: {
      Card l = left_->cardinality(), r = right_->cardinality();
      if (l == Card::Infinite || r == Card::Infinite) return Card::Infinite;
      if (l == Card::Finite && r == Card::Finite) return Card::Finite;
      return Card::Unknown;
    }
    case Kind::Inter: {
      if (left_->cardinality() == Card::Finite || right_->cardinality() == Card::Finite)
        return Card::Finite;
      return Card::Unknown;
    }
    case Kind::Diff: {
      if (left_->cardinality() == Card::Finite) return Card::Finite;
      if (left_->cardinality() == Card::Infinite && right_->cardinality() == Card::Finite)
        return Card::Infinite;
      return Card::Unknown;
    }
    case Kind::SymDiff: {
      Card l = left_->cardinality(), r = right_->cardinality();
      if (l == Card::Finite && r == Card::Finite) return Card::Finite;
      if (l == Card::Infinite && r == Card::Finite) return Card::Infinite;
      if (l == Card::Finite && r == Card::Infinite) return Card::Infinite;
      return Card::Unknown;
    }
    case Kind::Compl: {
      if (left_->cardinality() == Card::Finite) return Card::Infinite;
      auto d = left_->density();
      if (d && *d < 1) return Card::Infinite;
      return Card::Unknown;
    }
    default: return Card::Unknown;
  }
}

std::optional<Rat> SetDesc::density() const {
  if (auto nf = normal_form()) return nf_density(*nf);
  switch (kind_) {
    case Kind::SparseGeo: return Rat(0);
    case Kind::SparsePoly: return b_ >= 2 ? Rat(0) : rat(1, a_);
    case Kind::Union: {
      auto l = left_->density(), r = right_->density();
      if (l && r && *l == 0 && *r == 0) return Rat(0);
      if (l && r && *r == 0) return l;  // lower >= d(A), upper <= d(A)+0
      if (l && r && *l == 0) return r;
      return std::nullopt;
    }
    case Kind::Inter: {
      auto l = left_->density(), r = right_->density();
      if ((l && *l == 0) || (r && *r == 0)) return Rat(0);
      return std::nullopt;
    }
    case Kind::Diff: {
      auto l = left_->density(), r = right_->density();
      if (l && *l == 0) return Rat(0);
      if (l && r && *r == 0) return l;
      return std::nullopt;
    }
    case Kind::SymDiff: {
      auto l = left_->density(), r = right_->density();
      if (l && r && *r == 0) return l;
      if (l && r && *l == 0) return r;
      return std::nullopt;
    }
    case Kind::Compl: {
      auto l = left_->density();
      if (l) return Rat(1 - *l);
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

SetDesc::SumClass SetDesc::weighted_class(const WeightSeq& w) const {
  using SC = SumClass;
  // Families with finite total mass make every subset summable.
  if (!w.sum_diverges()) return SC::Converges;

  auto infinite_base = [&](void) -> SC {
    // divergence of the given family over a decidably "fat" set is handled
    // by the callers below; this is the default for unknown structure
    return SC::Unknown;
  };
  (void)infinite_base;

  if (auto nf = normal_form()) {
    if (!nf_infinite(*nf)) return SC::Converges;
    // infinite eventually periodic set: positive density
    switch (w.family()) {
      case WeightSeq::Family::Constant:
      case WeightSeq::Family::Harmonic:
      case WeightSeq::Family::DyadicValuation:
      case WeightSeq::Family::EvenOddMix: return SC::Diverges;
      case WeightSeq::Family::Table:
        // divergent tail over a cofinite set diverges; over a general
        // periodic set unknown (the tail values carry no structure)
        {
          bool cofinite = true;
          for (char b : nf->second) cofinite = cofinite && b;
          return cofinite ? SC::Diverges : SC::Unknown;
        }
      default: return SC::Unknown;
    }
  }

  switch (kind_) {
    case Kind::SparseGeo:
      switch (w.family()) {
        case WeightSeq::Family::Constant: return SC::Diverges;
        case WeightSeq::Family::Harmonic: return SC::Converges;  // ratio test
        case WeightSeq::Family::DyadicValuation: return SC::Diverges;
        case WeightSeq::Family::EvenOddMix:
          // all-odd geometric progressions see only the harmonic part
          return (a_ % 2 == 1 && b_ % 2 == 1) ? SC::Converges : SC::Diverges;
        default: return SC::Unknown;
      }
    case Kind::SparsePoly:
      switch (w.family()) {
        case WeightSeq::Family::Constant: return SC::Diverges;
        case WeightSeq::Family::Harmonic: return b_ >= 2 ? SC::Converges : SC::Diverges;
        case WeightSeq::Family::DyadicValuation: return SC::Diverges;
        case WeightSeq::Family::EvenOddMix: return SC::Diverges;  // even values recur
        default: return SC::Unknown;
      }
    case Kind::Union: {
      SC l = left_->weighted_class(w), r = right_->weighted_class(w);
      if (l == SC::Diverges || r == SC::Diverges) return SC::Diverges;
      if (l == SC::Converges && r == SC::Converges) return SC::Converges;
      return SC::Unknown;
    }
    case Kind::Inter: {
      if (left_->weighted_class(w) == SC::Converges ||
          right_->weighted_class(w) == SC::Converges)
        return SC::Converges;
      return SC::Unknown;
    }
    case Kind::Diff: {
      SC l = left_->weighted_class(w), r = right_->weighted_class(w);
      if (l == SC::Converges) return SC::Converges;
      if (l == SC::Diverges && r == SC::Converges) return SC::Diverges;
      return SC::Unknown;
    }
    case Kind::SymDiff: {
      SC l = left_->weighted_class(w), r = right_->weighted_class(w);
      if (l == SC::Converges && r == SC::Converges) return SC::Converges;
      if (l == SC::Diverges && r == SC::Converges) return SC::Diverges;
      if (l == SC::Converges && r == SC::Diverges) return SC::Diverges;
      return SC::Unknown;
    }
    case Kind::Compl: {
      if (left_->cardinality() == Card::Finite) return SC::Diverges;  // cofinite
      auto d = left_->density();
      if (d && *d == 0) {
        switch (w.family()) {
          case WeightSeq::Family::Constant:
          case WeightSeq::Family::Harmonic:
          case WeightSeq::Family::DyadicValuation:
          case WeightSeq::Family::EvenOddMix: return SC::Diverges;
          default: return SC::Unknown;
        }
      }
      return SC::Unknown;
    }
    default: return SC::Unknown;
  }
}

nlohmann::ordered_json SetDesc::to_json() const {
  nlohmann::ordered_json j;
  switch (kind_) {
    case Kind::Finite:
      j["kind"] = "finite";
      j["values"] = values_;
      break;
    case Kind::Periodic: {
      j["kind"] = "periodic";
      std::string pre, per;
      for (char b : prefix_) pre += b ? '1' : '0';
      for (char b : period_) per += b ? '1' : '0';
      j["prefix"] = pre;
      j["period"] = per;
      break;
    }
    case Kind::SparseGeo:
      j["kind"] = "sparseGeo";
      j["start"] = a_;
      j["base"] = b_;
      break;
    case Kind::SparsePoly:
      j["kind"] = "sparsePoly";
      j["scale"] = a_;
      j["degree"] = b_;
      break;
    case Kind::Compl:
      j["kind"] = "compl";
      j["of"] = left_->to_json();
      break;
    default: {
      j["kind"] = kind_ == Kind::Union    ? "union"
                  : kind_ == Kind::Inter  ? "inter"
                  : kind_ == Kind::Diff   ? "diff"
                                          : "symDiff";
      j["left"] = left_->to_json();
      j["right"] = right_->to_json();
    }
  }
  return j;
}

SetDesc SetDesc::from_json(const nlohmann::json& j) {
  std::string k = j.at("kind").get<std::string>();
  if (k == "finite") return finite(j.at("values").get<std::vector<long>>());
  if (k == "periodic") {
    std::vector<char> pre, per;
    for (char c : j.at("prefix").get<std::string>()) pre.push_back(c == '1');
    for (char c : j.at("period").get<std::string>()) per.push_back(c == '1');
    return periodic(std::move(pre), std::move(per));
  }
  if (k == "sparseGeo") return sparse_geo(j.at("start").get<long>(), j.at("base").get<long>());
  if (k == "sparsePoly")
    return sparse_poly(j.at("scale").get<long>(), j.at("degree").get<int>());
  if (k == "compl") return complement(from_json(j.at("of")));
  SetDesc l = from_json(j.at("left")), r = from_json(j.at("right"));
  if (k == "union") return unions(std::move(l), std::move(r));
  if (k == "inter") return inter(std::move(l), std::move(r));
  if (k == "diff") return diff(std::move(l), std::move(r));
  if (k == "symDiff") return sym_diff(std::move(l), std::move(r));
  throw std::invalid_argument("unknown set descriptor kind: " + k);
}

SetDesc SetDesc::random_decidable(SplitRng& rng) {
  switch (rng.next_int(0, 4)) {
    case 0: {
      std::vector<long> vals;
      int n = rng.next_int(0, 6);
      for (int i = 0; i < n; ++i) vals.push_back(rng.next_int(0, 40));
      return finite(std::move(vals));
    }
    case 1: {
      int pre = rng.next_int(0, 4), per = rng.next_int(1, 6);
      std::vector<char> p(pre), q(per);
      for (auto& b : p) b = rng.next_bool();
      for (auto& b : q) b = rng.next_bool();
      return periodic(std::move(p), std::move(q));
    }
    case 2: return sparse_geo(rng.next_int(1, 3), rng.next_int(2, 4));
    case 3: return sparse_poly(rng.next_int(1, 3), rng.next_int(1, 3));
    default: {
      SetDesc a = random_decidable(rng);
      SetDesc b = random_decidable(rng);
      switch (rng.next_int(0, 2)) {
        case 0: return unions(std::move(a), std::move(b));
        case 1: return inter(std::move(a), std::move(b));
        default: return diff(std::move(a), std::move(b));
      }
    }
  }
}

// --------------------------------------------------------------- NestedDesc

NestedDesc NestedDesc::leaf(SetDesc s) {
  NestedDesc d;
  d.leaf_ = std::move(s);
  return d;
}

NestedDesc NestedDesc::matrix(std::map<long, NestedDesc> cols,
                              std::optional<NestedDesc> default_col) {
  NestedDesc d;
  for (auto& [k, c] : cols) d.cols_[k] = std::make_shared<NestedDesc>(std::move(c));
  if (default_col) d.default_ = std::make_shared<NestedDesc>(std::move(*default_col));
  return d;
}

NestedDesc::Tri NestedDesc::empty() const {
  if (is_leaf()) {
    switch (leaf_->cardinality()) {
      case SetDesc::Card::Finite: {
        // finite but possibly nonempty: look at a window up to the normal form
        auto nf = leaf_->normal_form();
        if (nf) {
          for (char b : nf->first)
            if (b) return Tri::No;
          for (char b : nf->second)
            if (b) return Tri::No;
          return Tri::Yes;
        }
        return Tri::Unknown;
      }
      case SetDesc::Card::Infinite: return Tri::No;
      default: return Tri::Unknown;
    }
  }
  Tri acc = Tri::Yes;
  for (const auto& [k, c] : cols_) {
    Tri t = c->empty();
    if (t == Tri::No) return Tri::No;
    if (t == Tri::Unknown) acc = Tri::Unknown;
  }
  if (default_) {
    Tri t = default_->empty();
    if (t == Tri::No) return Tri::No;
    if (t == Tri::Unknown) acc = Tri::Unknown;
  }
  return acc;
}

nlohmann::ordered_json NestedDesc::to_json() const {
  if (is_leaf()) return leaf_->to_json();
  nlohmann::ordered_json j;
  j["kind"] = "matrix";
  nlohmann::ordered_json cols = nlohmann::ordered_json::object();
  for (const auto& [k, c] : cols_) cols[std::to_string(k)] = c->to_json();
  j["cols"] = cols;
  if (default_) j["default"] = default_->to_json();
  return j;
}

NestedDesc NestedDesc::from_json(const nlohmann::json& j) {
  if (j.contains("kind") && j.at("kind") == "matrix") {
    std::map<long, NestedDesc> cols;
    for (const auto& [k, c] : j.at("cols").items()) cols.emplace(std::stol(k), from_json(c));
    std::optional<NestedDesc> def;
    if (j.contains("default")) def = from_json(j.at("default"));
    return matrix(std::move(cols), std::move(def));
  }
  return leaf(SetDesc::from_json(j));
}

// -------------------------------------------------------------------- Ideal

Ideal Ideal::zero() {
  Ideal i;
  i.kind_ = Kind::Zero;
  return i;
}
Ideal Ideal::fin() {
  Ideal i;
  i.kind_ = Kind::Fin;
  return i;
}
Ideal Ideal::fin_times_0() {
  Ideal i;
  i.kind_ = Kind::FinTimes0;
  return i;
}
Ideal Ideal::zero_times_fin() {
  Ideal i;
  i.kind_ = Kind::ZeroTimesFin;
  return i;
}
Ideal Ideal::summable(WeightSeq w) {
  if (!w.sum_diverges())
    throw std::invalid_argument("summable ideal needs divergent weights (else trivial)");
  Ideal i;
  i.kind_ = Kind::Summable;
  i.w_ = std::move(w);
  return i;
}
Ideal Ideal::density0() {
  Ideal i;
  i.kind_ = Kind::Density0;
  return i;
}
Ideal Ideal::erdos_ulam(WeightSeq w) {
  if (!w.sum_diverges()) throw std::invalid_argument("EU ideal needs divergent weights");
  Ideal i;
  i.kind_ = Kind::ErdosUlam;
  i.w_ = std::move(w);
  return i;
}
Ideal Ideal::density_ideal(WeightSeq scale) {
  Ideal i;
  i.kind_ = Kind::DensityIdeal;
  i.w_ = std::move(scale);
  return i;
}
Ideal Ideal::exh(Submeasure phi) {
  Ideal i;
  i.kind_ = Kind::Exh;
  i.phi_ = std::move(phi);
  return i;
}
Ideal Ideal::frechet(FrechetOrd xi) {
  if (xi.limit < 0 || xi.limit > 1 || xi.finite < 0 || (xi.limit == 0 && xi.finite < 1))
    throw std::invalid_argument("frechet ordinal out of the supported range");
  Ideal i;
  i.kind_ = Kind::Frechet;
  i.xi_ = xi;
  return i;
}
Ideal Ideal::disjoint_sum(Ideal a, Ideal b) {
  Ideal i;
  i.kind_ = Kind::DisjointSum;
  i.children_.push_back(std::make_shared<Ideal>(std::move(a)));
  i.children_.push_back(std::make_shared<Ideal>(std::move(b)));
  return i;
}
Ideal Ideal::fubini_sum(Ideal index, std::map<long, Ideal> cols, Ideal default_col) {
  Ideal i;
  i.kind_ = Kind::FubiniSum;
  i.children_.push_back(std::make_shared<Ideal>(std::move(index)));
  i.children_.push_back(std::make_shared<Ideal>(std::move(default_col)));
  for (auto& [k, c] : cols) i.col_ideals_[k] = std::make_shared<Ideal>(std::move(c));
  return i;
}
Ideal Ideal::fubini_product(Ideal a, Ideal b) {
  Ideal i;
  i.kind_ = Kind::FubiniProduct;
  i.children_.push_back(std::make_shared<Ideal>(std::move(a)));
  i.children_.push_back(std::make_shared<Ideal>(std::move(b)));
  return i;
}
Ideal Ideal::restrict(Ideal a, SetDesc b) {
  Ideal i;
  i.kind_ = Kind::Restrict;
  i.children_.push_back(std::make_shared<Ideal>(std::move(a)));
  i.set_ = std::move(b);
  return i;
}
Ideal Ideal::trivial_variation(Ideal a) {
  Ideal i;
  i.kind_ = Kind::TrivialVariation;
  i.children_.push_back(std::make_shared<Ideal>(std::move(a)));
  return i;
}

std::string Ideal::name() const {
  switch (kind_) {
    case Kind::Zero: return "0";
    case Kind::Fin: return "Fin";
    case Kind::FinTimes0: return "Fin x 0";
    case Kind::ZeroTimesFin: return "0 x Fin";
    case Kind::Summable: return "Summable";
    case Kind::Density0: return "Z0";
    case Kind::ErdosUlam: return "EU";
    case Kind::DensityIdeal: return "DensityIdeal";
    case Kind::Exh: return "Exh";
    case Kind::Frechet:
      return "Frechet(" + std::string(xi_.limit ? "w+" : "") + std::to_string(xi_.finite) + ")";
    case Kind::DisjointSum: return "DisjointSum";
    case Kind::FubiniSum: return "FubiniSum";
    case Kind::FubiniProduct: return "FubiniProduct";
    case Kind::Restrict: return "Restrict";
    case Kind::TrivialVariation: return "TrivialVariation";
  }
  return "?";
}

namespace {

Verdict from_sumclass(SetDesc::SumClass c, const SetDesc& x, const char* what) {
  switch (c) {
    case SetDesc::SumClass::Converges: return Verdict::make_in();
    case SetDesc::SumClass::Diverges: return Verdict::make_out();
    default: {
      // report a partial-sum window so Unknown carries evidence
      auto w = x.window(0, 256);
      return Verdict::unknown(std::string(what) + " undecided; window[0,256) has " +
                              std::to_string(w.size()) + " members");
    }
  }
}

Verdict density_verdict(const SetDesc& x) {
  auto d = x.density();
  if (d) return *d == 0 ? Verdict::make_in() : Verdict::make_out();
  auto w = x.window(0, 512);
  return Verdict::unknown("density undecided; #window[0,512)=" + std::to_string(w.size()));
}

// In iff the set is finite.
Verdict fin_verdict(const SetDesc& x) {
  switch (x.cardinality()) {
    case SetDesc::Card::Finite: return Verdict::make_in();
    case SetDesc::Card::Infinite: return Verdict::make_out();
    default: return Verdict::unknown("cardinality undecided");
  }
}

Verdict scaled_count_verdict(const SetDesc& x);

// lim w(n)·#(x ∩ [2^n,2^{n+1})) = 0 ?
Verdict density_ideal_verdict(const WeightSeq& scale, const SetDesc& x) {
  using F = WeightSeq::Family;
  if (x.cardinality() == SetDesc::Card::Finite) return Verdict::make_in();
  switch (scale.family()) {
    case F::Geometric: {
      Rat q2 = scale.param() * 2;
      if (q2 < 1) return Verdict::make_in();
      if (q2 == 1) return density_verdict(x);
      // q·2 > 1: blocks must thin out faster than geometric
      if (auto nf = x.normal_form())
        return nf_infinite(*nf) ? Verdict::make_out() : Verdict::make_in();
      if (x.kind() == SetDesc::Kind::SparseGeo) return Verdict::make_in();
      if (x.kind() == SetDesc::Kind::SparsePoly) {
        // counts ~ 2^{n/d}: compare q^d·2 with 1
        Rat qd = 1;
        for (long i = 0; i < x.sparse_param(); ++i) qd *= scale.param();
        return (qd * 2 < 1) ? Verdict::make_in() : Verdict::make_out();
      }
      return Verdict::unknown("block counts undecided");
    }
    case F::Constant:
      if (scale.param() == 0) return Verdict::make_in();
      if (x.cardinality() == SetDesc::Card::Infinite) return Verdict::make_out();
      return Verdict::unknown("cardinality undecided");
    case F::Harmonic: {
      if (auto nf = x.normal_form())
        return nf_infinite(*nf) ? Verdict::make_out() : Verdict::make_in();
      if (x.kind() == SetDesc::Kind::SparseGeo) return Verdict::make_in();
      if (x.kind() == SetDesc::Kind::SparsePoly) return Verdict::make_out();
      return Verdict::unknown("block counts undecided");
    }
    default: return Verdict::unknown("unsupported scale family");
  }
}

// Σ_k k^-2 · min(k, #(x∩[2^k,2^{k+1}))) < ∞ ?
Verdict scaled_count_verdict(const SetDesc& x) {
  if (auto nf = x.normal_form()) {
    if (!nf_infinite(*nf)) return Verdict::make_in();
    return Verdict::make_out();  // counts ~ δ2^k ≥ k eventually, terms ~ 1/k
  }
  switch (x.kind()) {
    case SetDesc::Kind::SparseGeo: return Verdict::make_in();   // bounded block counts
    case SetDesc::Kind::SparsePoly: return Verdict::make_out();  // counts ~ 2^{k/d}
    default: return Verdict::unknown("block counts undecided");
  }
}

// generic lattice rules, sound for any ideal: subsets of In sets are In,
// supersets of Out sets are Out
Verdict leaf_membership(const Ideal& ideal, const SetDesc& x);

Verdict combo_lattice(const Ideal& ideal, const SetDesc& x) {
  using K = SetDesc::Kind;
  SetDesc::Kind k = x.kind();
  if (k != K::Union && k != K::Inter && k != K::Diff && k != K::SymDiff)
    return Verdict::unknown("undecided descriptor");
  Verdict l = leaf_membership(ideal, *x.left());
  Verdict r = leaf_membership(ideal, *x.right());
  switch (k) {
    case K::Union:
      if (l.in() && r.in()) return Verdict::make_in();
      if (l.out() || r.out()) return Verdict::make_out();
      break;
    case K::Inter:
      if (l.in() || r.in()) return Verdict::make_in();
      break;
    case K::Diff:
      if (l.in()) return Verdict::make_in();
      if (l.out() && r.in()) return Verdict::make_out();
      break;
    case K::SymDiff:
      if (l.in() && r.in()) return Verdict::make_in();
      if (l.out() && r.in()) return Verdict::make_out();
      if (l.in() && r.out()) return Verdict::make_out();
      break;
    default: break;
  }
  return Verdict::unknown("combination undecided");
}

Verdict leaf_membership(const Ideal& ideal, const SetDesc& x) {
  switch (ideal.kind()) {
    case Ideal::Kind::Zero: {
      auto nf = x.normal_form();
      if (nf) {
        for (char b : nf->first)
          if (b) return Verdict::make_out();
        for (char b : nf->second)
          if (b) return Verdict::make_out();
        return Verdict::make_in();
      }
      if (x.cardinality() == SetDesc::Card::Infinite) return Verdict::make_out();
      return Verdict::unknown("emptiness undecided");
    }
    case Ideal::Kind::Fin: {
      Verdict v = fin_verdict(x);
      if (v.definite()) return v;
      return combo_lattice(ideal, x);
    }
    case Ideal::Kind::Summable: {
      Verdict v = from_sumclass(x.weighted_class(*ideal.weight_seq()), x, "weighted sum");
      return v;
    }
    case Ideal::Kind::Density0: return density_verdict(x);
    case Ideal::Kind::ErdosUlam: {
      // for the supported families the logarithmic/weighted density equals
      // the natural density on every decidable descriptor class
      using F = WeightSeq::Family;
      F f = ideal.weight_seq()->family();
      if (f == F::Constant || f == F::Harmonic) return density_verdict(x);
      if (x.cardinality() == SetDesc::Card::Finite) return Verdict::make_in();
      return Verdict::unknown("unsupported EU weight family");
    }
    case Ideal::Kind::DensityIdeal: return density_ideal_verdict(*ideal.weight_seq(), x);
    case Ideal::Kind::Exh: {
      const Submeasure& phi = *ideal.submeasure();
      switch (phi.kind()) {
        case Submeasure::Kind::WeightedSum:
          return from_sumclass(x.weighted_class(phi.weights()), x, "weighted sum");
        case Submeasure::Kind::CountingOne: return fin_verdict(x);
        case Submeasure::Kind::MaxBlocks: return density_ideal_verdict(phi.weights(), x);
        case Submeasure::Kind::ScaledCount: return scaled_count_verdict(x);
      }
      return Verdict::unknown("unsupported submeasure");
    }
    case Ideal::Kind::Frechet:
      if (ideal.xi().limit == 0 && ideal.xi().finite == 1) return fin_verdict(x);
      return Verdict::unknown("frechet expects a matrix descriptor");
    default: return Verdict::unknown("ideal expects a matrix descriptor");
  }
}

}  // namespace

Verdict membership(const Ideal& ideal, const SetDesc& x) {
  return membership(ideal, NestedDesc::leaf(x));
}

Verdict membership(const Ideal& ideal, const NestedDesc& x) {
  using K = Ideal::Kind;
  switch (ideal.kind_) {
    case K::Zero:
      switch (x.empty()) {
        case NestedDesc::Tri::Yes: return Verdict::make_in();
        case NestedDesc::Tri::No: return Verdict::make_out();
        default: return Verdict::unknown("emptiness undecided");
      }
    case K::Fin:
    case K::Summable:
    case K::Density0:
    case K::ErdosUlam:
    case K::DensityIdeal:
    case K::Exh: {
      if (!x.is_leaf()) throw std::invalid_argument("ideal on ℕ applied to a matrix");
      return leaf_membership(ideal, x.as_leaf());
    }
    case K::Restrict: {
      if (!x.is_leaf()) throw std::invalid_argument("restriction applied to a matrix");
      return membership(*ideal.children_[0], SetDesc::inter(x.as_leaf(), *ideal.set_));
    }
    case K::TrivialVariation: {
      if (!x.is_leaf()) throw std::invalid_argument("trivial variation applied to a matrix");
      // x ∩ evens, reindexed: {k : 2k ∈ x}
      auto half = [&]() -> std::optional<SetDesc> {
        const SetDesc& s = x.as_leaf();
        if (auto nf = s.normal_form()) {
          long pre = (nf->first.size() + 1) / 2;
          long per = static_cast<long>(nf->second.size());
          std::vector<char> p(pre), q(per);
          auto bit = [&](long n) -> bool {
            if (n < static_cast<long>(nf->first.size())) return nf->first[n];
            return nf->second[(n - nf->first.size()) % per];
          };
          for (long i = 0; i < pre; ++i) p[i] = bit(2 * i);
          for (long i = 0; i < per; ++i) q[i] = bit(2 * (pre + i));
          return SetDesc::periodic(std::move(p), std::move(q));
        }
        return std::nullopt;
      }();
      if (!half) return Verdict::unknown("reindexing undecided");
      return membership(*ideal.children_[0], *half);
    }
    case K::DisjointSum: {
      if (!x.is_leaf()) throw std::invalid_argument("disjoint sum applied to a matrix");
      const SetDesc& s = x.as_leaf();
      auto nf = s.normal_form();
      if (!nf) return Verdict::unknown("side split undecided");
      auto part = [&](int parity) {
        long pre = (static_cast<long>(nf->first.size()) + 1) / 2;
        long per = static_cast<long>(nf->second.size());
        std::vector<char> p(pre), q(per);
        auto bit = [&](long n) -> bool {
          if (n < static_cast<long>(nf->first.size())) return nf->first[n];
          return nf->second[(n - nf->first.size()) % per];
        };
        for (long i = 0; i < pre; ++i) p[i] = bit(2 * i + parity);
        for (long i = 0; i < per; ++i) q[i] = bit(2 * (pre + i) + parity);
        return SetDesc::periodic(std::move(p), std::move(q));
      };
      Verdict a = membership(*ideal.children_[0], part(0));
      Verdict b = membership(*ideal.children_[1], part(1));
      if (a.out() || b.out()) return Verdict::make_out();
      if (a.in() && b.in()) return Verdict::make_in();
      return Verdict::unknown("side verdict undecided");
    }
    case K::FinTimes0: {
      if (x.is_leaf()) throw std::invalid_argument("matrix ideal applied to a leaf");
      const NestedDesc* def = x.default_column();
      if (!def) return Verdict::make_in();
      switch (def->empty()) {
        case NestedDesc::Tri::Yes: return Verdict::make_in();
        case NestedDesc::Tri::No: return Verdict::make_out();
        default: return Verdict::unknown("default column undecided");
      }
    }
    case K::ZeroTimesFin: {
      if (x.is_leaf()) throw std::invalid_argument("matrix ideal applied to a leaf");
      bool unknown = false;
      Ideal f = Ideal::fin();
      for (const auto& [k, col] : x.columns()) {
        Verdict v = membership(f, *col);
        if (v.out()) return Verdict::make_out();
        unknown = unknown || !v.definite();
      }
      if (const NestedDesc* def = x.default_column()) {
        Verdict v = membership(f, *def);
        if (v.out()) return Verdict::make_out();
        unknown = unknown || !v.definite();
      }
      return unknown ? Verdict::unknown("column verdict undecided") : Verdict::make_in();
    }
    case K::FubiniProduct:
    case K::FubiniSum: {
      if (x.is_leaf()) throw std::invalid_argument("fubini ideal applied to a leaf");
      const Ideal& index = *ideal.children_[0];
      auto col_ideal = [&](long k) -> const Ideal& {
        if (ideal.kind_ == K::FubiniProduct) return *ideal.children_[1];
        auto it = ideal.col_ideals_.find(k);
        return it != ideal.col_ideals_.end() ? *it->second : *ideal.children_[1];
      };
      std::vector<long> bad, good;
      for (const auto& [k, col] : x.columns()) {
        Verdict v = membership(col_ideal(k), *col);
        if (!v.definite()) return Verdict::unknown("column verdict undecided");
        (v.out() ? bad : good).push_back(k);
      }
      Verdict dv = Verdict::make_in();
      if (const NestedDesc* def = x.default_column()) {
        dv = membership(*ideal.children_[1], *def);
        if (!dv.definite()) return Verdict::unknown("default column undecided");
      }
      if (dv.in()) return membership(index, SetDesc::finite(bad));
      return membership(index, SetDesc::cofinite(good));
    }
    case K::Frechet: {
      FrechetOrd xi = ideal.xi_;
      if (xi.limit == 0 && xi.finite == 1) {
        if (!x.is_leaf()) throw std::invalid_argument("Frechet(1) applied to a matrix");
        return leaf_membership(ideal, x.as_leaf());
      }
      if (x.is_leaf()) throw std::invalid_argument("iterated Frechet applied to a leaf");
      auto sub_ideal = [&](long k) {
        if (xi.limit == 1 && xi.finite == 0)
          return Ideal::frechet({0, static_cast<int>(std::max(1L, k))});  // ξ_k = k
        if (xi.limit == 1) return Ideal::frechet({1, xi.finite - 1});
        return Ideal::frechet({0, xi.finite - 1});
      };
      std::vector<long> bad, good;
      for (const auto& [k, col] : x.columns()) {
        Verdict v = membership(sub_ideal(k), *col);
        if (!v.definite()) return Verdict::unknown("block verdict undecided");
        (v.out() ? bad : good).push_back(k);
      }
      const bool limit_step = xi.limit == 1 && xi.finite == 0;
      if (const NestedDesc* def = x.default_column()) {
        if (def->empty() == NestedDesc::Tri::Yes) {
          // empty blocks are in every F_ξ
        } else if (!limit_step) {
          Verdict dv;
          try {
            dv = membership(sub_ideal(0), *def);
          } catch (const std::invalid_argument&) {
            return Verdict::unknown("default block shape mismatch");
          }
          if (dv.out()) return Verdict::make_out();  // cofinitely many bad blocks
          if (!dv.in()) return Verdict::unknown("default block undecided");
        } else {
          // at the limit step the block ideal varies with k, so a uniform
          // nonempty default cannot be typed against all of them
          return Verdict::unknown("nonempty default block at a limit ordinal");
        }
      }
      return membership(Ideal::fin(), SetDesc::finite(bad));
    }
  }
  return Verdict::unknown("unhandled ideal");
}

// -------------------------------------------------------- summable classes

SummableClass classify_summable(const WeightSeq& r) {
  using F = WeightSeq::Family;
  switch (r.family()) {
    case F::Constant: return r.param() > 0 ? SummableClass::Atomic : SummableClass::Unknown;
    case F::Harmonic: return SummableClass::Dense;
    case F::Geometric: return SummableClass::Unknown;  // Σ converges: not a summable ideal
    case F::DyadicValuation: return SummableClass::Sliced;
    case F::EvenOddMix: return SummableClass::FinPlusDense;
    case F::Table:
      switch (r.tail_class()) {
        case WeightSeq::TailClass::DivergentToZero: return SummableClass::Dense;
        default: return SummableClass::Unknown;
      }
  }
  return SummableClass::Unknown;
}

const char* summable_class_str(SummableClass c) {
  switch (c) {
    case SummableClass::Atomic: return "Atomic";
    case SummableClass::Dense: return "Dense";
    case SummableClass::Sliced: return "Sliced";
    case SummableClass::FinPlusDense: return "FinPlusDense";
    default: return "Unknown";
  }
}

// ------------------------------------------------------------- RB witnesses

nlohmann::ordered_json BlockWitness::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Block& b : blocks) {
    nlohmann::ordered_json e;
    e["runs"] = b.runs;
    e["sumApprox"] = b.sum_approx;
    arr.push_back(e);
  }
  return arr;
}

BigFrac bf_add(const BigFrac& a, const BigFrac& b) {
  BigFrac r;
  r.num = a.num * b.den + b.num * a.den;
  r.den = a.den * b.den;
  // reduce while the numbers are still small; above this a gcd costs more
  // than carrying the extra digits
  if (mpz_size(r.den.get_mpz_t()) <= 64) {
    mpz_class g = gcd(r.num, r.den);
    if (g > 1) {
      r.num /= g;
      r.den /= g;
    }
  }
  return r;
}

int bf_cmp(const BigFrac& a, const Rat& q) {
  mpz_class lhs = a.num * q.get_den();
  mpz_class rhs = q.get_num() * a.den;
  return cmp(lhs, rhs);
}

double bf_double(const BigFrac& a) {
  mpq_class q(a.num, a.den);
  return q.get_d();  // no canonicalization needed for a double estimate
}

bool bf_within_pow2(const BigFrac& a, const Rat& q, unsigned e) {
  // |q - num/den| < 2^-e  <=>  |q.num·den - q.den·num| · 2^e < q.den·den
  mpz_class diff = q.get_num() * a.den - q.get_den() * a.num;
  mpz_class lhs = abs(diff) << e;
  mpz_class rhs = q.get_den() * a.den;
  return lhs < rhs;
}

BigFrac range_sum_frac(const WeightSeq& r, long a, long b) {
  if (b <= a) return BigFrac{};
  if (b - a <= 8) {
    BigFrac s;
    for (long j = a; j < b; ++j) {
      Rat t = r.at(j);
      s = bf_add(s, BigFrac{mpz_class(t.get_num()), mpz_class(t.get_den())});
    }
    return s;
  }
  long m = a + (b - a) / 2;
  return bf_add(range_sum_frac(r, a, m), range_sum_frac(r, m, b));
}

namespace {

// Term-by-term greedy over a weight sequence. Decisions run on a directed
// double interval around the partial sum; when a comparison lands inside
// the error band the recorded runs are folded into an exact fraction and
// the decision is retaken exactly.
struct GreedyBlock {
  const WeightSeq& r;
  Rat target;   // p_i
  Rat stop_at;  // p_i - 2^-i
  std::vector<std::pair<long, long>> runs;

  BigFrac exact_base;                       // folded part of the sum
  std::size_t folded_runs = 0;              // runs already inside exact_base
  double lo = 0, hi = 0;                    // interval for the unfolded rest
  double t_lo = 0, t_hi = 0, s_lo = 0, s_hi = 0;

  explicit GreedyBlock(const WeightSeq& rr, const Rat& p, const Rat& eps)
      : r(rr), target(p), stop_at(p - eps) {
    t_lo = nextafter(rat_double(target), -1e30);
    t_hi = nextafter(rat_double(target), 1e30);
    s_lo = nextafter(rat_double(stop_at), -1e30);
    s_hi = nextafter(rat_double(stop_at), 1e30);
  }

  double cached_lo = 0, cached_hi = 0;

  void fold() {
    bool changed = folded_runs < runs.size();
    for (; folded_runs < runs.size(); ++folded_runs)
      exact_base =
          bf_add(exact_base, range_sum_frac(r, runs[folded_runs].first, runs[folded_runs].second));
    lo = hi = 0;
    if (changed) {
      double d = bf_double(exact_base);
      cached_lo = nextafter(d, -1e30);
      cached_hi = nextafter(d, 1e30);
    }
  }

  BigFrac exact_sum() {
    fold();
    return exact_base;
  }

  double base_lo() const { return cached_lo; }
  double base_hi() const { return cached_hi; }

  // sum > stop_at ?
  bool past_stop() {
    if (nextafter(base_lo() + lo, -1e30) > s_hi) return true;
    if (nextafter(base_hi() + hi, 1e30) < s_lo) return false;
    return bf_cmp(exact_sum(), stop_at) > 0;
  }

  // sum + r(j) <= target ?
  bool fits(long j) {
    double w = rat_double(r.at(j));
    double w_lo = nextafter(w, -1e30), w_hi = nextafter(w, 1e30);
    if (nextafter(base_hi() + hi + w_hi, 1e30) <= t_lo) return true;
    if (nextafter(base_lo() + lo + w_lo, -1e30) > t_hi) return false;
    Rat t = r.at(j);
    BigFrac with = bf_add(exact_sum(), BigFrac{mpz_class(t.get_num()), mpz_class(t.get_den())});
    return bf_cmp(with, target) <= 0;
  }

  void include(long j) {
    double w = rat_double(r.at(j));
    lo = nextafter(lo + nextafter(w, -1e30), -1e30);
    hi = nextafter(hi + nextafter(w, 1e30), 1e30);
    if (!runs.empty() && runs.back().second == j)
      runs.back().second = j + 1;
    else
      runs.emplace_back(j, j + 1);
  }
};

}  // namespace

BlockWitness rb_witness_summable(const WeightSeq& p, const WeightSeq& r, int imax,
                                 long index_cap) {
  if (!r.tends_to_zero() || !r.sum_diverges())
    throw std::invalid_argument("target weights must tend to 0 with divergent sum");
  BlockWitness out;
  long cursor = 0;
  for (int i = 0; i <= imax; ++i) {
    Rat pi = p.at(i);
    if (pi < 0) throw std::invalid_argument("negative source weight");
    Rat eps = pow2_neg(static_cast<unsigned>(i));
    GreedyBlock st(r, pi, eps);
    long j = cursor;
    while (!st.past_stop()) {
      if (j >= index_cap)
        throw std::runtime_error("accuracy unreachable under the declared index cap");
      if (st.fits(j)) st.include(j);
      ++j;
    }
    if (st.runs.empty()) {
      // p_i <= 2^-i: smallest single index with r_j <= p_i (or < eps if p_i = 0)
      while (j < index_cap && !(pi > 0 ? r.at(j) <= pi : r.at(j) < eps)) ++j;
      if (j >= index_cap) throw std::runtime_error("no single index fits the tolerance");
      st.include(j);
      ++j;
    }
    BlockWitness::Block blk;
    blk.sum_approx = bf_double(st.exact_sum());
    blk.runs = std::move(st.runs);
    out.blocks.push_back(std::move(blk));
    cursor = std::max(cursor, out.blocks.back().hi());
  }
  return out;
}

nlohmann::ordered_json WitnessCheck::to_json() const {
  nlohmann::ordered_json j;
  j["agree"] = agree;
  j["disagree"] = disagree;
  j["unknown"] = unknown;
  j["boundsOk"] = bounds_ok;
  j["orderedOk"] = ordered_ok;
  j["notes"] = notes;
  return j;
}

WitnessCheck check_rb_witness(const BlockWitness& w, const WeightSeq& p, const WeightSeq& r,
                              int samples, SplitRng& rng) {
  WitnessCheck out;
  long prev_hi = -1;
  for (std::size_t i = 0; i < w.blocks.size(); ++i) {
    const auto& blk = w.blocks[i];
    if (blk.empty_block()) {
      out.bounds_ok = false;
      out.notes.push_back("empty block " + std::to_string(i));
      continue;
    }
    if (blk.lo() < prev_hi) {
      out.ordered_ok = false;
      out.notes.push_back("block " + std::to_string(i) + " not past its predecessor");
    }
    long last = -1;
    BigFrac sum;
    for (auto& [a, b] : blk.runs) {
      if (a <= last || b <= a) {
        out.ordered_ok = false;
        out.notes.push_back("bad run in block " + std::to_string(i));
      }
      last = b - 1;
      sum = bf_add(sum, range_sum_frac(r, a, b));  // independent recomputation
    }
    prev_hi = blk.hi();
    if (!bf_within_pow2(sum, p.at(static_cast<long>(i)), static_cast<unsigned>(i))) {
      out.bounds_ok = false;
      out.notes.push_back("tolerance exceeded at block " + std::to_string(i));
    }
  }

  // Agreement of membership verdicts on sampled index sets A: A in S_p
  // iff w_A in S_r. Decidable samples: finite sets and cofinite sets.
  const int imax = static_cast<int>(w.blocks.size()) - 1;
  for (int s = 0; s < samples; ++s) {
    bool finite_sample = rng.next_bool();
    std::vector<long> picks;
    for (int i = 0; i <= imax; ++i)
      if (rng.next_bool()) picks.push_back(i);
    Verdict src, img;
    if (finite_sample) {
      src = Verdict::make_in();  // finite sets lie in every ideal
      img = Verdict::make_in();  // w_A finite
    } else {
      // A = complement of picks: source verdict from the tail class of p
      if (!p.sum_diverges()) {
        src = Verdict::make_in();
        img = Verdict::unknown("image of summable-tail source not modeled");
      } else {
        src = Verdict::make_out();
        // Σ over the image blocks ≥ Σ (p_i − 2^-i) over A: diverges too
        img = Verdict::make_out();
      }
    }
    if (!src.definite() || !img.definite()) {
      ++out.unknown;
    } else if (src.v == img.v) {
      ++out.agree;
    } else {
      ++out.disagree;
    }
  }
  return out;
}

nlohmann::ordered_json HomCheck::to_json() const {
  nlohmann::ordered_json j;
  j["cond1Pass"] = cond1_pass;
  j["cond1Fail"] = cond1_fail;
  j["cond2Agree"] = cond2_agree;
  j["cond2Disagree"] = cond2_disagree;
  j["unknown"] = unknown;
  j["notes"] = notes;
  return j;
}

HomCheck check_delta_homomorphism(const SetMap& theta, const Ideal& i, const Ideal& j,
                                  int samples, SplitRng& rng) {
  HomCheck out;
  for (int s = 0; s < samples; ++s) {
    SetDesc x = SetDesc::random_decidable(rng);
    SetDesc y = SetDesc::random_decidable(rng);
    // condition (1): (θx Δ θy) Δ θ(xΔy) ∈ J
    SetDesc probe =
        SetDesc::sym_diff(SetDesc::sym_diff(theta(x), theta(y)), theta(SetDesc::sym_diff(x, y)));
    Verdict c1 = membership(j, probe);
    if (c1.in())
      ++out.cond1_pass;
    else if (c1.out()) {
      ++out.cond1_fail;
      out.notes.push_back("condition (1) fails on sample " + std::to_string(s));
    } else
      ++out.unknown;
    // condition (2): x ∈ I ⟺ θx ∈ J
    Verdict vi = membership(i, x);
    Verdict vj = membership(j, theta(x));
    if (vi.definite() && vj.definite()) {
      if (vi.v == vj.v)
        ++out.cond2_agree;
      else {
        ++out.cond2_disagree;
        out.notes.push_back("condition (2) disagrees on sample " + std::to_string(s));
      }
    } else
      ++out.unknown;
  }
  return out;
}

}  // namespace borelkit
