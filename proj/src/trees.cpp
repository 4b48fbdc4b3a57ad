#include "borelkit/trees.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace borelkit {

std::string seq_str(const Seq& s) {
  std::string out = "<";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + ">";
}

bool is_prefix(const Seq& s, const Seq& t) {
  if (s.size() > t.size()) return false;
  return std::equal(s.begin(), s.end(), t.begin());
}

bool leq_cw(const Seq& s, const Seq& t) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] > t[i]) return false;
  return true;
}

Seq add_cw(const Seq& s, const Seq& t) {
  Seq out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] + t[i];
  return out;
}

long pair_code(long r, long q) { return (1L << r) * (2 * q + 1) - 1; }

nlohmann::ordered_json RankVerdict::to_json() const {
  nlohmann::ordered_json j;
  if (kind == Kind::Exact) {
    j["exact"] = rank;
  } else {
    j["atLeast"] = rank;
    j["depth"] = depth_cap;
    j["cap"] = value_cap;
  }
  return j;
}

bool verdict_leq(const RankVerdict& a, const RankVerdict& b) {
  if (a.is_exact() && b.is_exact()) return a.rank <= b.rank;
  if (a.is_exact()) return a.rank <= b.rank;   // Exact(k) <= AtLeast(k)
  if (b.is_exact()) return a.rank < b.rank;
  return a.rank <= b.rank;
}

FiniteTree FiniteTree::close(const std::vector<Seq>& seqs) {
  FiniteTree t;
  for (const Seq& s : seqs) {
    for (int v : s)
      if (v < 0) throw std::invalid_argument("tree symbol outside alphabet: " + seq_str(s));
    t.insert_with_prefixes(s);
  }
  return t;
}

FiniteTree FiniteTree::from_closed(std::set<Seq> nodes) {
  FiniteTree t;
  t.nodes_ = std::move(nodes);
  return t;
}

int FiniteTree::height() const {
  int h = -1;
  for (const Seq& s : nodes_) h = std::max(h, static_cast<int>(s.size()));
  return h;
}

void FiniteTree::insert_with_prefixes(const Seq& s) {
  Seq p;
  nodes_.insert(p);
  for (int v : s) {
    p.push_back(v);
    nodes_.insert(p);
  }
}

nlohmann::ordered_json FiniteTree::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Seq& s : nodes_) arr.push_back(s);
  return arr;
}

FiniteTree FiniteTree::from_json(const nlohmann::json& j) {
  std::vector<Seq> seqs;
  for (const auto& e : j) seqs.push_back(e.get<Seq>());
  return close(seqs);
}

RankVerdict tree_rank(const FiniteTree& t) {
  if (t.empty()) return RankVerdict::exact(-1);
  return RankVerdict::exact(rank_at(t, Seq{}));
}

int rank_at(const FiniteTree& t, const Seq& r) {
  if (!t.contains(r)) return -1;
  // Nodes in decreasing length order; rank = strict sup of children ranks.
  std::vector<const Seq*> order;
  order.reserve(t.size());
  for (const Seq& s : t.nodes()) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const Seq* a, const Seq* b) { return a->size() > b->size(); });
  std::map<Seq, int> rk;
  for (const Seq* s : order) {
    int best = -1;
    Seq child = *s;
    child.push_back(0);
    for (auto it = rk.lower_bound(child); it != rk.end(); ++it) {
      if (!is_prefix(*s, it->first)) break;
      if (it->first.size() == s->size() + 1) best = std::max(best, it->second);
    }
    rk[*s] = best + 1;
  }
  return rk.at(r);
}

namespace {

// Depth-first rank of the capped restriction; returns the rank and sets
// `clipped` when some branch reaches the depth cap.
int lazy_rank(const LazyTree& t, Seq& node, bool& clipped) {
  if (static_cast<int>(node.size()) == t.depth_cap) {
    clipped = true;
    return 0;
  }
  int best = -1;
  for (int v = 0; v <= t.value_cap; ++v) {
    node.push_back(v);
    if (t.member(node)) best = std::max(best, lazy_rank(t, node, clipped));
    node.pop_back();
  }
  return best + 1;
}

}  // namespace

RankVerdict rank_capped(const LazyTree& t) {
  Seq root;
  if (!t.member(root)) return RankVerdict::exact(-1);
  bool clipped = false;
  int r = lazy_rank(t, root, clipped);
  if (clipped) return RankVerdict::at_least(r, t.depth_cap, t.value_cap);
  return RankVerdict::exact(r);
}

FiniteTree contract(const FiniteTree& s) {
  FiniteTree out;
  out.insert_with_prefixes(Seq{});
  for (const Seq& node : s.nodes()) {
    if (node.size() < 2) continue;
    Seq c;
    c.reserve(node.size() - 1);
    c.push_back(static_cast<int>(pair_code(node[0], node[1])));
    c.insert(c.end(), node.begin() + 2, node.end());
    out.insert_with_prefixes(c);
  }
  return out;
}

FiniteTree star_sum(const std::vector<FiniteTree>& ts) {
  FiniteTree out;
  out.insert_with_prefixes(Seq{});
  for (std::size_t n = 0; n < ts.size(); ++n) {
    for (const Seq& node : ts[n].nodes()) {
      Seq c;
      c.reserve(node.size() + 1);
      c.push_back(static_cast<int>(n));
      c.insert(c.end(), node.begin(), node.end());
      out.insert_with_prefixes(c);
    }
  }
  return out;
}

FiniteTree star_product(const std::vector<FiniteTree>& ts, int depth) {
  FiniteTree out;
  out.insert_with_prefixes(Seq{});
  if (ts.empty()) return out;
  const std::size_t m = ts.size();

  struct Node {
    std::vector<Seq> comps;
    Seq code;
  };
  std::vector<Node> level;

  // Depth-1 nodes: every component is Λ, present iff all factors are nonempty.
  bool all_rooted = true;
  for (const FiniteTree& t : ts) all_rooted = all_rooted && !t.empty();
  if (!all_rooted || depth < 1) return out;
  level.push_back({std::vector<Seq>(m), Seq{0}});
  out.insert_with_prefixes(Seq{0});

  for (int d = 2; d <= depth && !level.empty(); ++d) {
    std::vector<Node> next;
    for (const Node& nd : level) {
      // Valid one-symbol extensions per component.
      std::vector<std::vector<int>> ext(m);
      bool dead = false;
      for (std::size_t k = 0; k < m && !dead; ++k) {
        Seq probe = nd.comps[k];
        probe.push_back(0);
        for (const Seq& cand : ts[k].nodes()) {
          if (cand.size() == probe.size() && is_prefix(nd.comps[k], cand))
            ext[k].push_back(cand.back());
        }
        dead = ext[k].empty();
      }
      if (dead) continue;
      // Cartesian product of the extension choices, lexicographic order.
      std::vector<std::size_t> idx(m, 0);
      int child = 0;
      while (true) {
        Node c;
        c.comps = nd.comps;
        for (std::size_t k = 0; k < m; ++k) c.comps[k].push_back(ext[k][idx[k]]);
        c.code = nd.code;
        c.code.push_back(child++);
        out.insert_with_prefixes(c.code);
        next.push_back(std::move(c));
        std::size_t k = m;
        while (k > 0) {
          --k;
          if (++idx[k] < ext[k].size()) break;
          idx[k] = 0;
          if (k == 0) goto done;
        }
        continue;
      done:
        break;
      }
    }
    level = std::move(next);
  }
  return out;
}

FiniteTree cw_add(const FiniteTree& s, const FiniteTree& t) {
  std::map<std::size_t, std::vector<const Seq*>> by_len;
  for (const Seq& node : t.nodes()) by_len[node.size()].push_back(&node);
  std::set<Seq> out;
  for (const Seq& a : s.nodes()) {
    auto it = by_len.find(a.size());
    if (it == by_len.end()) continue;
    for (const Seq* b : it->second) out.insert(add_cw(a, *b));
  }
  return FiniteTree::from_closed(std::move(out));
}

}  // namespace borelkit
