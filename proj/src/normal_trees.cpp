#include "borelkit/normal_trees.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace borelkit {

namespace {

// All s in [0,cap]^n.
std::vector<Seq> all_seqs(int n, int cap) {
  std::vector<Seq> out{Seq{}};
  std::vector<Seq> acc;
  for (int i = 0; i < n; ++i) {
    acc.clear();
    for (const Seq& s : out)
      for (int v = 0; v <= cap; ++v) {
        Seq t = s;
        t.push_back(v);
        acc.push_back(std::move(t));
      }
    out = acc;
  }
  return out;
}

}  // namespace

std::vector<BinWord> all_binwords(int length) {
  std::vector<BinWord> out;
  out.reserve(1u << length);
  for (unsigned m = 0; m < (1u << length); ++m) {
    BinWord w(length, '0');
    for (int i = 0; i < length; ++i)
      if (m & (1u << i)) w[i] = '1';
    out.push_back(w);
  }
  return out;
}

std::vector<Seq> minimal_antichain(std::vector<Seq> seqs) {
  std::sort(seqs.begin(), seqs.end(), [](const Seq& a, const Seq& b) {
    long sa = 0, sb = 0;
    for (int v : a) sa += v;
    for (int v : b) sb += v;
    if (sa != sb) return sa < sb;
    return a < b;
  });
  std::vector<Seq> kept;
  for (const Seq& s : seqs) {
    bool dominated = false;
    for (const Seq& k : kept)
      if (leq_cw(k, s)) {
        dominated = true;
        break;
      }
    if (!dominated) kept.push_back(s);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

void NormalTree::set_generators(const BinWord& u, std::vector<Seq> gens) {
  for (const Seq& g : gens)
    if (static_cast<int>(g.size()) != static_cast<int>(u.size()))
      throw std::invalid_argument("generator length mismatch at slice " + u);
  std::vector<Seq> min = minimal_antichain(std::move(gens));
  if (min.empty())
    gen_.erase(u);
  else
    gen_[u] = std::move(min);
}

const std::vector<Seq>& NormalTree::generators(const BinWord& u) const {
  static const std::vector<Seq> kEmpty;
  auto it = gen_.find(u);
  return it == gen_.end() ? kEmpty : it->second;
}

bool NormalTree::member(const BinWord& u, const Seq& s) const {
  if (u.size() != s.size()) throw std::invalid_argument("nt_member: lh u != lh s");
  if (static_cast<int>(u.size()) > depth_cap_)
    throw std::invalid_argument("nt_member: depth cap exceeded");
  for (const Seq& g : generators(u))
    if (leq_cw(g, s)) return true;
  return false;
}

bool NormalTree::empty() const { return gen_.empty(); }

std::vector<std::string> NormalTree::validate() const {
  std::vector<std::string> bad;
  if (!gen_.empty() && generators("").empty())
    bad.push_back("nonempty tree without root pair");
  for (const auto& [u, gens] : gen_) {
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (std::size_t j = 0; j < gens.size(); ++j)
        if (i != j && leq_cw(gens[i], gens[j]))
          bad.push_back("gen(" + u + ") is not an antichain");
    if (!u.empty()) {
      BinWord p = u.substr(0, u.size() - 1);
      for (const Seq& g : gens) {
        Seq gp(g.begin(), g.end() - 1);
        bool covered = false;
        for (const Seq& pg : generators(p)) covered = covered || leq_cw(pg, gp);
        if (!covered)
          bad.push_back("prefix closure fails at " + u + " gen " + seq_str(g));
      }
    }
    for (const Seq& g : gens)
      for (int v : g)
        if (v < 0 || v > value_cap_) bad.push_back("generator out of cap at " + u);
  }
  return bad;
}

std::vector<std::pair<BinWord, Seq>> NormalTree::sym_diff(const NormalTree& a,
                                                          const NormalTree& b, int depth,
                                                          int value_cap) {
  std::vector<std::pair<BinWord, Seq>> out;
  for (int n = 0; n <= depth; ++n) {
    for (const BinWord& u : all_binwords(n)) {
      if (a.generators(u).empty() && b.generators(u).empty()) continue;
      for (const Seq& s : all_seqs(n, value_cap))
        if (a.member(u, s) != b.member(u, s)) out.emplace_back(u, s);
    }
  }
  return out;
}

NormalTree NormalTree::full(int depth_cap, int value_cap) {
  NormalTree t(depth_cap, value_cap);
  for (int n = 0; n <= depth_cap; ++n)
    for (const BinWord& u : all_binwords(n)) t.set_generators(u, {Seq(n, 0)});
  return t;
}

NormalTree NormalTree::random(SplitRng& rng, int depth_cap, int value_cap) {
  NormalTree t(depth_cap, value_cap);
  t.set_generators("", {Seq{}});
  for (int n = 1; n <= depth_cap; ++n) {
    for (const BinWord& u : all_binwords(n)) {
      BinWord p = u.substr(0, u.size() - 1);
      const std::vector<Seq>& pg = t.generators(p);
      if (pg.empty()) continue;                       // dead slice stays dead
      if (rng.next_int(0, 5) == 0 && n > 1) continue;  // occasional dead slice
      int count = rng.next_int(1, 3);
      std::vector<Seq> gens;
      for (int i = 0; i < count; ++i) {
        const Seq& base = pg[rng.next_below(pg.size())];
        Seq g(n);
        for (int j = 0; j < n - 1; ++j)
          g[j] = std::min(value_cap, base[j] + (rng.next_int(0, 3) == 0 ? rng.next_int(1, 2) : 0));
        g[n - 1] = rng.next_int(0, value_cap);
        gens.push_back(std::move(g));
      }
      t.set_generators(u, std::move(gens));
    }
  }
  return t;
}

nlohmann::ordered_json NormalTree::to_json() const {
  nlohmann::ordered_json g = nlohmann::ordered_json::object();
  for (const auto& [u, gens] : gen_) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Seq& s : gens) arr.push_back(s);
    g[u] = arr;
  }
  nlohmann::ordered_json j;
  j["gen"] = g;
  return j;
}

NormalTree NormalTree::from_json(const nlohmann::json& j, int depth_cap, int value_cap) {
  NormalTree t(depth_cap, value_cap);
  for (const auto& [u, arr] : j.at("gen").items()) {
    std::vector<Seq> gens;
    for (const auto& e : arr) gens.push_back(e.get<Seq>());
    t.set_generators(u, std::move(gens));
  }
  std::vector<std::string> bad = t.validate();
  if (!bad.empty()) throw std::invalid_argument("invalid normal tree: " + bad.front());
  return t;
}

bool lip_member(const NormalTree& s, const NormalTree& t, const Seq& f) {
  int n = static_cast<int>(f.size());
  for (const BinWord& u : all_binwords(n)) {
    const std::vector<Seq>& sg = s.generators(u);
    if (sg.empty()) continue;
    const std::vector<Seq>& tg = t.generators(u);
    for (const Seq& g : sg) {
      bool ok = false;
      for (const Seq& cand : tg) {
        bool fits = true;
        for (int i = 0; i < n && fits; ++i) fits = std::max(cand[i] - g[i], 0) <= f[i];
        if (fits) {
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
  }
  return true;
}

FiniteTree lip(const NormalTree& s, const NormalTree& t, int depth_cap, int value_cap) {
  FiniteTree out;
  if (!lip_member(s, t, Seq{})) return out;
  out.insert_with_prefixes(Seq{});
  std::vector<Seq> level{Seq{}};
  for (int n = 1; n <= depth_cap && !level.empty(); ++n) {
    std::vector<Seq> next;
    for (const Seq& f : level) {
      for (int v = 0; v <= value_cap; ++v) {
        Seq g = f;
        g.push_back(v);
        if (lip_member(s, t, g)) {
          out.insert_with_prefixes(g);
          next.push_back(std::move(g));
        }
      }
    }
    level = std::move(next);
  }
  return out;
}

namespace {

RankVerdict capped_rank_of(const FiniteTree& t, int depth_cap, int value_cap) {
  RankVerdict r = tree_rank(t);
  if (t.height() >= depth_cap) return RankVerdict::at_least(r.rank, depth_cap, value_cap);
  return r;
}

}  // namespace

RankVerdict leq_nt_verdict(const NormalTree& s, const NormalTree& t, int depth_cap,
                           int value_cap) {
  return capped_rank_of(lip(s, t, depth_cap, value_cap), depth_cap, value_cap);
}

RankVerdict equiv_nt_verdict(const NormalTree& s, const NormalTree& t, int depth_cap,
                             int value_cap) {
  // Per-level membership alone is not prefix-monotone (a slice of S may die
  // out below a level where it was populated), so intersect the explicit
  // capped trees.
  FiniteTree f = lip(s, t, depth_cap, value_cap);
  FiniteTree g = lip(t, s, depth_cap, value_cap);
  std::set<Seq> both;
  for (const Seq& n : f.nodes())
    if (g.contains(n)) both.insert(n);
  return capped_rank_of(FiniteTree::from_closed(std::move(both)), depth_cap, value_cap);
}

bool TriTree::contains(const BinWord& u, const BinWord& v, const Seq& s) const {
  return nodes_.count(Tri{u, v, s}) != 0;
}

void TriTree::insert(const BinWord& u, const BinWord& v, const Seq& s) {
  nodes_.insert(Tri{u, v, s});
}

void TriTree::insert_with_prefixes(const BinWord& u, const BinWord& v, const Seq& s) {
  for (std::size_t m = 0; m <= u.size(); ++m)
    nodes_.insert(Tri{u.substr(0, m), v.substr(0, m), Seq(s.begin(), s.begin() + m)});
}

TriTree TriTree::random(SplitRng& rng, int depth_cap, int value_cap, double keep_prob) {
  TriTree q(depth_cap, value_cap, value_cap);
  q.insert("", "", Seq{});
  std::vector<Tri> level{Tri{"", "", Seq{}}};
  for (int n = 1; n <= depth_cap; ++n) {
    std::vector<Tri> next;
    for (const Tri& p : level) {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int v = 0; v <= value_cap; ++v) {
            if (rng.next_unit() >= keep_prob) continue;
            Tri c{p.u + char('0' + i), p.v + char('0' + j), p.s};
            c.s.push_back(v);
            q.insert(c.u, c.v, c.s);
            next.push_back(std::move(c));
          }
    }
    level = std::move(next);
  }
  return q;
}

nlohmann::ordered_json TriTree::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Tri& t : nodes_) arr.push_back(nlohmann::ordered_json::array({t.u, t.v, t.s}));
  return arr;
}

TriTree TriTree::from_json(const nlohmann::json& j, int depth_cap, int value_cap,
                           int counter_cap) {
  TriTree t(depth_cap, value_cap, counter_cap);
  for (const auto& e : j)
    t.insert_with_prefixes(e.at(0).get<std::string>(), e.at(1).get<std::string>(),
                           e.at(2).get<Seq>());
  return t;
}

nlohmann::ordered_json LrReport::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const LrViolation& v : violations) {
    nlohmann::ordered_json e;
    switch (v.property) {
      case 'i': e["property"] = "symmetry"; break;
      case 'd': e["property"] = "diagonal"; break;
      case 'n': e["property"] = "normality"; break;
      default: e["property"] = "transitivity"; break;
    }
    e["witness"] = v.witness;
    arr.push_back(e);
  }
  nlohmann::ordered_json j;
  j["violations"] = arr;
  return j;
}

namespace {

std::string tri_str(const TriTree::Tri& t) {
  return "(" + (t.u.empty() ? "L" : t.u) + "," + (t.v.empty() ? "L" : t.v) + "," +
         seq_str(t.s) + ")";
}

}  // namespace

TriTree lr_transform(const TriTree& q, int counter_cap) {
  const int d = q.depth_cap();
  const int c = q.value_cap();
  if (counter_cap < 0) throw std::invalid_argument("counter cap too small");

  // Part 1: symmetrize and add the diagonal.
  TriTree q1(d, c, c);
  for (const auto& t : q.nodes()) {
    q1.insert(t.u, t.v, t.s);
    q1.insert(t.v, t.u, t.s);
  }
  for (int n = 0; n <= d; ++n)
    for (const BinWord& u : all_binwords(n))
      for (const Seq& s : all_seqs(n, c)) q1.insert(u, u, s);

  // Part 2: close each (u,v) slice upward componentwise within the cap.
  TriTree q2(d, c, c);
  std::map<std::pair<BinWord, BinWord>, std::vector<Seq>> slices;
  for (const auto& t : q1.nodes()) slices[{t.u, t.v}].push_back(t.s);
  for (auto& [uv, ss] : slices) {
    std::vector<Seq> mins = minimal_antichain(std::move(ss));
    int n = static_cast<int>(uv.first.size());
    for (const Seq& s : all_seqs(n, c))
      for (const Seq& m : mins)
        if (leq_cw(m, s)) {
          q2.insert(uv.first, uv.second, s);
          break;
        }
  }

  // Part 3: the counter construction. A node <u^i, v^j, k^s> records a
  // Q2-path of length exactly k between u and v along edges at s; the
  // diagonal provides self-loops, so length-exactly-k is distance <= k.
  TriTree r(d, c, counter_cap);
  r.insert("", "", Seq{});
  for (int n = 0; n + 1 <= d; ++n) {
    std::vector<BinWord> words = all_binwords(n);
    std::map<BinWord, int> index;
    for (std::size_t i = 0; i < words.size(); ++i) index[words[i]] = static_cast<int>(i);
    const int w = static_cast<int>(words.size());
    for (const Seq& s : all_seqs(n, c)) {
      // BFS distances in the graph with edges {(a,b): Q2(a,b,s)}.
      std::vector<std::vector<int>> adj(w);
      for (int a = 0; a < w; ++a)
        for (int b = 0; b < w; ++b)
          if (a != b && q2.contains(words[a], words[b], s)) adj[a].push_back(b);
      for (int a = 0; a < w; ++a) {
        std::vector<int> dist(w, -1);
        std::queue<int> bfs;
        dist[a] = 0;
        bfs.push(a);
        while (!bfs.empty()) {
          int x = bfs.front();
          bfs.pop();
          for (int y : adj[x])
            if (dist[y] < 0) {
              dist[y] = dist[x] + 1;
              bfs.push(y);
            }
        }
        for (int b = 0; b < w; ++b) {
          if (dist[b] < 0 || dist[b] > counter_cap) continue;
          for (int k = dist[b]; k <= counter_cap; ++k) {
            Seq ks;
            ks.reserve(n + 1);
            ks.push_back(k);
            ks.insert(ks.end(), s.begin(), s.end());
            for (int i = 0; i < 2; ++i)
              for (int j = 0; j < 2; ++j)
                r.insert(words[a] + char('0' + i), words[b] + char('0' + j), ks);
          }
        }
      }
    }
  }
  return r;
}

LrReport lr_check_properties(const TriTree& r, int depth) {
  LrReport rep;
  const int c = r.value_cap();
  const int kc = r.counter_cap();

  // (i) symmetry over stored triples
  for (const auto& t : r.nodes())
    if (!r.contains(t.v, t.u, t.s)) rep.violations.push_back({'i', tri_str(t)});

  // (ii) diagonal within caps
  for (int n = 0; n <= depth; ++n) {
    for (const BinWord& u : all_binwords(n)) {
      std::vector<Seq> ss;
      if (n == 0) {
        ss = {Seq{}};
      } else {
        for (const Seq& tail : all_seqs(n - 1, c))
          for (int k = 0; k <= kc; ++k) {
            Seq s;
            s.push_back(k);
            s.insert(s.end(), tail.begin(), tail.end());
            ss.push_back(std::move(s));
          }
      }
      for (const Seq& s : ss)
        if (!r.contains(u, u, s))
          rep.violations.push_back({'d', tri_str({u, u, s})});
    }
  }

  // slice views
  std::map<std::pair<BinWord, BinWord>, std::vector<Seq>> slices;
  for (const auto& t : r.nodes())
    if (static_cast<int>(t.u.size()) <= depth) slices[{t.u, t.v}].push_back(t.s);

  // (iii) normality: stepwise upward closure within caps
  bool normal = true;
  for (const auto& [uv, ss] : slices) {
    for (const Seq& s : ss) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] >= r.cap_at(i)) continue;
        Seq t = s;
        ++t[i];
        if (!r.contains(uv.first, uv.second, t)) {
          rep.violations.push_back({'n', tri_str({uv.first, uv.second, s}) + "+" +
                                             std::to_string(i)});
          normal = false;
        }
      }
    }
  }

  // (iv) transitivity: generator pairs when normality holds, otherwise
  // every stored pair.
  std::map<std::pair<BinWord, BinWord>, std::vector<Seq>> probe;
  for (const auto& [uv, ss] : slices)
    probe[uv] = normal ? minimal_antichain(ss) : ss;
  for (const auto& [uv, ss] : probe) {
    for (const auto& [vw, tt] : probe) {
      if (uv.second != vw.first || uv.first.size() != vw.first.size()) continue;
      for (const Seq& s : ss)
        for (const Seq& t : tt) {
          Seq sum = add_cw(s, t);
          bool in_caps = true;
          for (std::size_t i = 0; i < sum.size(); ++i)
            in_caps = in_caps && sum[i] <= r.cap_at(i);
          if (!in_caps) continue;
          if (!r.contains(uv.first, vw.second, sum))
            rep.violations.push_back({'t', tri_str({uv.first, uv.second, s}) + "*" +
                                               tri_str({vw.first, vw.second, t})});
        }
    }
  }
  return rep;
}

NormalTree theta_unchecked(const TriTree& r, const BinWord& x) {
  NormalTree out(r.depth_cap(), std::max(r.value_cap(), r.counter_cap()));
  std::map<BinWord, std::vector<Seq>> slices;
  for (const auto& t : r.nodes()) {
    if (t.u.size() > x.size()) continue;
    if (t.v == x.substr(0, t.v.size())) slices[t.u].push_back(t.s);
  }
  for (auto& [u, ss] : slices) out.set_generators(u, std::move(ss));
  return out;
}

NormalTree theta(const TriTree& r, const BinWord& x) {
  LrReport rep = lr_check_properties(r, r.depth_cap());
  if (!rep.clean())
    throw std::invalid_argument("theta: tree fails property check, first witness " +
                                rep.violations.front().witness);
  return theta_unchecked(r, x);
}

bool lip_vs_slice(const TriTree& r, const BinWord& x, const BinWord& y, int depth,
                  std::string* why) {
  return lip_vs_slice_pre(r, theta_unchecked(r, x), theta_unchecked(r, y), x, y, depth, why);
}

bool lip_vs_slice_pre(const TriTree& r, const NormalTree& tx, const NormalTree& ty,
                      const BinWord& x, const BinWord& y, int depth, std::string* why) {
  for (int n = 0; n <= depth; ++n) {
    std::vector<Seq> universe;
    if (n == 0) {
      universe = {Seq{}};
    } else {
      for (const Seq& tail : all_seqs(n - 1, r.value_cap()))
        for (int k = 0; k <= r.counter_cap(); ++k) {
          Seq f;
          f.push_back(k);
          f.insert(f.end(), tail.begin(), tail.end());
          universe.push_back(std::move(f));
        }
    }
    for (const Seq& f : universe) {
      bool in_lip = lip_member(tx, ty, f);
      bool in_slice = r.contains(x.substr(0, n), y.substr(0, n), f);
      if (in_lip != in_slice) {
        if (why)
          *why = "level " + std::to_string(n) + " f=" + seq_str(f) +
                 (in_lip ? " in Lip only" : " in slice only");
        return false;
      }
    }
  }
  return true;
}

}  // namespace borelkit
