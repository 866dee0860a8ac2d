// Maximum-weight general matching by Edmonds' blossom algorithm with the
// primal-dual bookkeeping of Galil (1986): O(n^3) with least-slack edge
// tracking per vertex and per blossom. Integer weights keep every dual update
// exact; vertex duals, slacks and deltas are stored doubled.
//
// Vertices are 0..n-1, blossoms n..2n-1. Edge k has endpoints 2k and 2k+1;
// endpoint p belongs to vertex endpoint_[p] and p ^ 1 is the opposite end.

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "graphbal/nngraph.hpp"

namespace graphbal::detail {
namespace {

enum Label : int { kFree = 0, kOuter = 1, kInner = 2, kBreadcrumb = 5 };

class BlossomMatcher {
 public:
  BlossomMatcher(int n, const std::vector<WeightedEdge>& edges, bool max_cardinality)
      : n_(n), edges_(edges), max_cardinality_(max_cardinality) {
    const int m = static_cast<int>(edges_.size());
    endpoint_.resize(2 * static_cast<std::size_t>(m));
    neighbend_.resize(static_cast<std::size_t>(n));
    std::int64_t max_weight = 0;
    for (int k = 0; k < m; ++k) {
      const auto& e = edges_[k];
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n || e.u == e.v) {
        throw std::invalid_argument("max_weight_matching: invalid edge");
      }
      endpoint_[2 * k] = e.u;
      endpoint_[2 * k + 1] = e.v;
      neighbend_[e.u].push_back(2 * k + 1);
      neighbend_[e.v].push_back(2 * k);
      max_weight = std::max(max_weight, e.weight);
    }
    const std::size_t nb = 2 * static_cast<std::size_t>(n);
    mate_.assign(n, -1);
    label_.assign(nb, kFree);
    labelend_.assign(nb, -1);
    inblossom_.resize(n);
    for (int v = 0; v < n; ++v) inblossom_[v] = v;
    blossomparent_.assign(nb, -1);
    blossomchilds_.assign(nb, {});
    blossomendps_.assign(nb, {});
    blossombase_.assign(nb, -1);
    for (int v = 0; v < n; ++v) blossombase_[v] = v;
    bestedge_.assign(nb, -1);
    blossombestedges_.assign(nb, std::nullopt);
    for (int b = 2 * n - 1; b >= n; --b) unusedblossoms_.push_back(b);
    dualvar_.assign(nb, 0);
    for (int v = 0; v < n; ++v) dualvar_[v] = max_weight;
    allowedge_.assign(static_cast<std::size_t>(m), 0);
  }

  std::vector<int> solve() {
    if (edges_.empty()) return std::vector<int>(static_cast<std::size_t>(n_), -1);
    for (int stage = 0; stage < n_; ++stage) {
      std::fill(label_.begin(), label_.end(), kFree);
      std::fill(bestedge_.begin(), bestedge_.end(), -1);
      for (int b = n_; b < 2 * n_; ++b) blossombestedges_[b].reset();
      std::fill(allowedge_.begin(), allowedge_.end(), 0);
      queue_.clear();
      for (int v = 0; v < n_; ++v) {
        if (mate_[v] == -1 && label_[inblossom_[v]] == kFree) assign_label(v, kOuter, -1);
      }
      bool augmented = false;
      while (true) {
        augmented = grow_forest();
        if (augmented) break;
        if (!dual_step()) break;
      }
      if (!augmented) break;
      for (int b = n_; b < 2 * n_; ++b) {
        if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == kOuter &&
            dualvar_[b] == 0) {
          expand_blossom(b, true);
        }
      }
    }
    std::vector<int> out(static_cast<std::size_t>(n_), -1);
    for (int v = 0; v < n_; ++v) {
      if (mate_[v] >= 0) out[v] = endpoint_[mate_[v]];
    }
    return out;
  }

 const std::vector<std::int64_t>& duals() const { return dualvar_; }
  const std::vector<int>& blossom_parents() const { return blossomparent_; }

 private:
  std::int64_t slack(int k) const {
    const auto& e = edges_[k];
    return dualvar_[e.u] + dualvar_[e.v] - 2 * e.weight;
  }

  // Python-style indexing into a cyclic child list.
  static int& cyc(std::vector<int>& v, int j) {
    return v[static_cast<std::size_t>(j < 0 ? j + static_cast<int>(v.size()) : j)];
  }

  void leaves(int b, std::vector<int>& out) const {
    if (b < n_) {
      out.push_back(b);
      return;
    }
    for (int c : blossomchilds_[b]) leaves(c, out);
  }

  std::vector<int> leaves(int b) const {
    std::vector<int> out;
    leaves(b, out);
    return out;
  }

  void assign_label(int w, int t, int p) {
    const int b = inblossom_[w];
    label_[w] = label_[b] = t;
    labelend_[w] = labelend_[b] = p;
    bestedge_[w] = bestedge_[b] = -1;
    if (t == kOuter) {
      leaves(b, queue_);
    } else if (t == kInner) {
      const int base = blossombase_[b];
      assign_label(endpoint_[mate_[base]], kOuter, mate_[base] ^ 1);
    }
  }

  // Returns the base of a new blossom, or -1 when v and w lie on an
  // augmenting path.
  int scan_blossom(int v, int w) {
    std::vector<int> path;
    int base = -1;
    while (v != -1 || w != -1) {
      int b = inblossom_[v];
      if (label_[b] & 4) {
        base = blossombase_[b];
        break;
      }
      path.push_back(b);
      label_[b] = kBreadcrumb;
      if (labelend_[b] == -1) {
        v = -1;
      } else {
        v = endpoint_[labelend_[b]];
        b = inblossom_[v];
        v = endpoint_[labelend_[b]];
      }
      if (w != -1) std::swap(v, w);
    }
    for (int b : path) label_[b] = kOuter;
    return base;
  }

  void add_blossom(int base, int k) {
    int v = edges_[k].u;
    int w = edges_[k].v;
    const int bb = inblossom_[base];
    int bv = inblossom_[v];
    int bw = inblossom_[w];
    const int b = unusedblossoms_.back();
    unusedblossoms_.pop_back();
    blossombase_[b] = base;
    blossomparent_[b] = -1;
    blossomparent_[bb] = b;
    std::vector<int>& path = blossomchilds_[b];
    std::vector<int>& endps = blossomendps_[b];
    path.clear();
    endps.clear();
    while (bv != bb) {
      blossomparent_[bv] = b;
      path.push_back(bv);
      endps.push_back(labelend_[bv]);
      v = endpoint_[labelend_[bv]];
      bv = inblossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      blossomparent_[bw] = b;
      path.push_back(bw);
      endps.push_back(labelend_[bw] ^ 1);
      w = endpoint_[labelend_[bw]];
      bw = inblossom_[w];
    }
    label_[b] = kOuter;
    labelend_[b] = labelend_[bb];
    dualvar_[b] = 0;
    for (int leaf : leaves(b)) {
      if (label_[inblossom_[leaf]] == kInner) queue_.push_back(leaf);
      inblossom_[leaf] = b;
    }

    std::vector<int> bestedgeto(2 * static_cast<std::size_t>(n_), -1);
    auto consider = [&](int edge) {
      int i = edges_[edge].u;
      int j = edges_[edge].v;
      if (inblossom_[j] == b) std::swap(i, j);
      const int bj = inblossom_[j];
      if (bj != b && label_[bj] == kOuter &&
          (bestedgeto[bj] == -1 || slack(edge) < slack(bestedgeto[bj]))) {
        bestedgeto[bj] = edge;
      }
    };
    for (int sub : path) {
      if (!blossombestedges_[sub]) {
        for (int leaf : leaves(sub)) {
          for (int p : neighbend_[leaf]) consider(p / 2);
        }
      } else {
        for (int edge : *blossombestedges_[sub]) consider(edge);
      }
      blossombestedges_[sub].reset();
      bestedge_[sub] = -1;
    }
    std::vector<int> best;
    for (int edge : bestedgeto) {
      if (edge != -1) best.push_back(edge);
    }
    int mybest = -1;
    for (int edge : best) {
      if (mybest == -1 || slack(edge) < slack(mybest)) mybest = edge;
    }
    blossombestedges_[b] = std::move(best);
    bestedge_[b] = mybest;
  }

  void expand_blossom(int b, bool endstage) {
    const std::vector<int> childs = blossomchilds_[b];
    for (int s : childs) {
      blossomparent_[s] = -1;
      if (s < n_) {
        inblossom_[s] = s;
      } else if (endstage && dualvar_[s] == 0) {
        expand_blossom(s, endstage);
      } else {
        for (int leaf : leaves(s)) inblossom_[leaf] = s;
      }
    }
    if (!endstage && label_[b] == kInner) {
      std::vector<int>& ch = blossomchilds_[b];
      std::vector<int>& endps = blossomendps_[b];
      const int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
      int j = static_cast<int>(std::find(ch.begin(), ch.end(), entrychild) - ch.begin());
      int jstep, endptrick;
      if (j & 1) {
        j -= static_cast<int>(ch.size());
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      int p = labelend_[b];
      while (j != 0) {
        label_[endpoint_[p ^ 1]] = kFree;
        label_[endpoint_[cyc(endps, j - endptrick) ^ endptrick ^ 1]] = kFree;
        assign_label(endpoint_[p ^ 1], kInner, p);
        allowedge_[cyc(endps, j - endptrick) / 2] = 1;
        j += jstep;
        p = cyc(endps, j - endptrick) ^ endptrick;
        allowedge_[p / 2] = 1;
        j += jstep;
      }
      int bv = cyc(ch, j);
      label_[endpoint_[p ^ 1]] = label_[bv] = kInner;
      labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
      bestedge_[bv] = -1;
      j += jstep;
      while (cyc(ch, j) != entrychild) {
        bv = cyc(ch, j);
        if (label_[bv] == kOuter) {
          j += jstep;
          continue;
        }
        int reached = -1;
        for (int leaf : leaves(bv)) {
          if (label_[leaf] != kFree) {
            reached = leaf;
            break;
          }
        }
        if (reached >= 0) {
          label_[reached] = kFree;
          label_[endpoint_[mate_[blossombase_[bv]]]] = kFree;
          assign_label(reached, kInner, labelend_[reached]);
        }
        j += jstep;
      }
    }
    label_[b] = labelend_[b] = -1;
    blossomchilds_[b].clear();
    blossomendps_[b].clear();
    blossombase_[b] = -1;
    blossombestedges_[b].reset();
    bestedge_[b] = -1;
    unusedblossoms_.push_back(b);
  }

  void augment_blossom(int b, int v) {
    int t = v;
    while (blossomparent_[t] != b) t = blossomparent_[t];
    if (t >= n_) augment_blossom(t, v);
    std::vector<int>& ch = blossomchilds_[b];
    std::vector<int>& endps = blossomendps_[b];
    const int i = static_cast<int>(std::find(ch.begin(), ch.end(), t) - ch.begin());
    int j = i;
    int jstep, endptrick;
    if (i & 1) {
      j -= static_cast<int>(ch.size());
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    while (j != 0) {
      j += jstep;
      t = cyc(ch, j);
      const int p = cyc(endps, j - endptrick) ^ endptrick;
      if (t >= n_) augment_blossom(t, endpoint_[p]);
      j += jstep;
      t = cyc(ch, j);
      if (t >= n_) augment_blossom(t, endpoint_[p ^ 1]);
      mate_[endpoint_[p]] = p ^ 1;
      mate_[endpoint_[p ^ 1]] = p;
    }
    std::rotate(ch.begin(), ch.begin() + i, ch.end());
    std::rotate(endps.begin(), endps.begin() + i, endps.end());
    blossombase_[b] = blossombase_[ch[0]];
  }

  void augment_matching(int k) {
    const int ends[2][2] = {{edges_[k].u, 2 * k + 1}, {edges_[k].v, 2 * k}};
    for (const auto& sp : ends) {
      int s = sp[0];
      int p = sp[1];
      while (true) {
        const int bs = inblossom_[s];
        if (bs >= n_) augment_blossom(bs, s);
        mate_[s] = p;
        if (labelend_[bs] == -1) break;
        const int t = endpoint_[labelend_[bs]];
        const int bt = inblossom_[t];
        s = endpoint_[labelend_[bt]];
        const int j = endpoint_[labelend_[bt] ^ 1];
        if (bt >= n_) augment_blossom(bt, j);
        mate_[j] = labelend_[bt];
        p = labelend_[bt] ^ 1;
      }
    }
  }

  // Labels along tight edges until the queue drains; true once augmented.
  bool grow_forest() {
    while (!queue_.empty()) {
      const int v = queue_.back();
      queue_.pop_back();
      for (int p : neighbend_[v]) {
        const int k = p / 2;
        const int w = endpoint_[p];
        if (inblossom_[v] == inblossom_[w]) continue;
        std::int64_t kslack = 0;
        if (!allowedge_[k]) {
          kslack = slack(k);
          if (kslack <= 0) allowedge_[k] = 1;
        }
        if (allowedge_[k]) {
          if (label_[inblossom_[w]] == kFree) {
            assign_label(w, kInner, p ^ 1);
          } else if (label_[inblossom_[w]] == kOuter) {
            const int base = scan_blossom(v, w);
            if (base >= 0) {
              add_blossom(base, k);
            } else {
              augment_matching(k);
              return true;
            }
          } else if (label_[w] == kFree) {
            label_[w] = kInner;
            labelend_[w] = p ^ 1;
          }
        } else if (label_[inblossom_[w]] == kOuter) {
          const int b = inblossom_[v];
          if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
        } else if (label_[w] == kFree) {
          if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
        }
      }
    }
    return false;
  }

  // Adjusts duals by the largest feasible delta; false when optimal.
  bool dual_step() {
    int deltatype = -1;
    std::int64_t delta = 0;
    int deltaedge = -1;
    int deltablossom = -1;
    if (!max_cardinality_) {
      deltatype = 1;
      delta = *std::min_element(dualvar_.begin(), dualvar_.begin() + n_);
    }
    for (int v = 0; v < n_; ++v) {
      if (label_[inblossom_[v]] == kFree && bestedge_[v] != -1) {
        const std::int64_t d = slack(bestedge_[v]);
        if (deltatype == -1 || d < delta) {
          delta = d;
          deltatype = 2;
          deltaedge = bestedge_[v];
        }
      }
    }
    for (int b = 0; b < 2 * n_; ++b) {
      if (blossomparent_[b] == -1 && label_[b] == kOuter && bestedge_[b] != -1) {
        const std::int64_t kslack = slack(bestedge_[b]);
        if (kslack % 2 != 0) throw std::logic_error("blossom: odd slack between outer blossoms");
        const std::int64_t d = kslack / 2;
        if (deltatype == -1 || d < delta) {
          delta = d;
          deltatype = 3;
          deltaedge = bestedge_[b];
        }
      }
    }
    for (int b = n_; b < 2 * n_; ++b) {
      if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == kInner &&
          (deltatype == -1 || dualvar_[b] < delta)) {
        delta = dualvar_[b];
        deltatype = 4;
        deltablossom = b;
      }
    }
    if (deltatype == -1) {
      deltatype = 1;
      delta = std::max<std::int64_t>(0, *std::min_element(dualvar_.begin(), dualvar_.begin() + n_));
    }
    for (int v = 0; v < n_; ++v) {
      const int l = label_[inblossom_[v]];
      if (l == kOuter) {
        dualvar_[v] -= delta;
      } else if (l == kInner) {
        dualvar_[v] += delta;
      }
    }
    for (int b = n_; b < 2 * n_; ++b) {
      if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
        if (label_[b] == kOuter) {
          dualvar_[b] += delta;
        } else if (label_[b] == kInner) {
          dualvar_[b] -= delta;
        }
      }
    }
    switch (deltatype) {
      case 1:
        return false;
      case 2: {
        allowedge_[deltaedge] = 1;
        int i = edges_[deltaedge].u;
        if (label_[inblossom_[i]] == kFree) i = edges_[deltaedge].v;
        queue_.push_back(i);
        break;
      }
      case 3:
        allowedge_[deltaedge] = 1;
        queue_.push_back(edges_[deltaedge].u);
        break;
      case 4:
        expand_blossom(deltablossom, false);
        break;
    }
    return true;
  }

  int n_;
  const std::vector<WeightedEdge>& edges_;
  bool max_cardinality_;
  std::vector<int> endpoint_;
  std::vector<std::vector<int>> neighbend_;
  std::vector<int> mate_;
  std::vector<int> label_;
  std::vector<int> labelend_;
  std::vector<int> inblossom_;
  std::vector<int> blossomparent_;
  std::vector<std::vector<int>> blossomchilds_;
  std::vector<std::vector<int>> blossomendps_;
  std::vector<int> blossombase_;
  std::vector<int> bestedge_;
  std::vector<std::optional<std::vector<int>>> blossombestedges_;
  std::vector<int> unusedblossoms_;
  std::vector<std::int64_t> dualvar_;
  std::vector<char> allowedge_;
  std::vector<int> queue_;
};

}  // namespace

std::vector<int> max_weight_matching(int n, const std::vector<WeightedEdge>& edges,
                                     bool max_cardinality) {
  if (n < 0) throw std::invalid_argument("max_weight_matching: negative vertex count");
  BlossomMatcher matcher(n, edges, max_cardinality);
  return matcher.solve();
}

MatchingCertificate max_weight_matching_certified(int n, const std::vector<WeightedEdge>& edges,
                                                  bool max_cardinality) {
  if (n < 0) throw std::invalid_argument("max_weight_matching: negative vertex count");
  BlossomMatcher matcher(n, edges, max_cardinality);
  MatchingCertificate out;
  out.mate = matcher.solve();
  out.dual = matcher.duals();
  out.blossom_parent = matcher.blossom_parents();
  return out;
}

std::int64_t MatchingCertificate::slack(int u, int v, std::int64_t weight) const {
  std::int64_t s = dual[u] + dual[v] - 2 * weight;
  // Outermost blossoms first; add 2 z_B for every blossom holding both ends.
  std::vector<int> up;
  std::vector<int> vp;
  for (int b = u; b != -1; b = blossom_parent[b]) up.push_back(b);
  for (int b = v; b != -1; b = blossom_parent[b]) vp.push_back(b);
  auto iu = up.rbegin();
  auto iv = vp.rbegin();
  for (; iu != up.rend() && iv != vp.rend() && *iu == *iv; ++iu, ++iv) s += 2 * dual[*iu];
  return s;
}

}  // namespace graphbal::detail
