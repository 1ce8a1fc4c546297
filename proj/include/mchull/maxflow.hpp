#pragma once

// Boykov-Kolmogorov augmenting-path max-flow on an implicit grid graph.
//
// Nodes are cells of a (padded) grid; arcs are the stencil directions, stored
// as direction pairs (2k, 2k+1) = (+e_k, -e_k) so that the reverse of
// direction a is a ^ 1. Capacities are integers, which makes termination and
// the residual reachability sets exact.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mchull {

class GridMaxflow {
 public:
  using Cap = std::int64_t;
  using ArcCap = std::int32_t;

  // `num_cells` is the padded grid size; `delta` holds the linear offset of
  // each direction. Callers must guarantee that every node's neighbors are
  // inside the padded grid.
  GridMaxflow(std::size_t num_cells, std::vector<std::ptrdiff_t> delta)
      : n_(num_cells),
        dirs_(static_cast<int>(delta.size())),
        delta_(std::move(delta)),
        is_node_(num_cells, 0),
        tr_(num_cells, 0),
        rc_(num_cells * delta_.size(), 0) {
    if (dirs_ % 2 != 0) throw std::logic_error("direction list must come in +/- pairs");
  }

  void add_node(std::size_t p) { is_node_[p] = 1; }
  bool is_node(std::size_t p) const { return is_node_[p] != 0; }

  // Adds source->p and p->sink capacities; the common part is pushed
  // immediately.
  void add_terminal(std::size_t p, Cap source_cap, Cap sink_cap) {
    tr_[p] += source_cap - sink_cap;
    const Cap common = std::min(source_cap, sink_cap);
    flow_ += common;
  }

  // Symmetric pair capacity on direction a (and its reverse from the
  // neighbor).
  void set_pair(std::size_t p, int a, ArcCap cap) {
    rc_[p * dirs_ + a] = cap;
    rc_[(p + delta_[a]) * dirs_ + (a ^ 1)] = cap;
  }

  std::int64_t augmentations() const { return augmentations_; }

  Cap maxflow() {
    constexpr std::uint8_t kFree = 0, kSource = 1, kSink = 2;
    tree_.assign(n_, kFree);
    parent_.assign(n_, kNone);
    ts_.assign(n_, 0);
    dist_.assign(n_, 0);
    queued_.assign(n_, 0);
    active_.clear();
    orphans_.clear();
    time_ = 0;

    for (std::size_t p = 0; p < n_; ++p) {
      if (!is_node_[p] || tr_[p] == 0) continue;
      tree_[p] = tr_[p] > 0 ? kSource : kSink;
      parent_[p] = kTerminal;
      dist_[p] = 1;
      activate(p);
    }

    while (true) {
      std::size_t s_end = 0, t_end = 0;
      int link = -1;
      while (!active_.empty()) {
        const std::size_t p = active_.front();
        if (tree_[p] == kFree) {
          active_.pop_front();
          queued_[p] = 0;
          continue;
        }
        const bool src = tree_[p] == kSource;
        for (int a = 0; a < dirs_; ++a) {
          const std::size_t q = p + delta_[a];
          if (!is_node_[q]) continue;
          const ArcCap r = src ? rc_[p * dirs_ + a] : rc_[q * dirs_ + (a ^ 1)];
          if (r == 0) continue;
          if (tree_[q] == kFree) {
            tree_[q] = tree_[p];
            parent_[q] = static_cast<std::int8_t>(a ^ 1);
            ts_[q] = ts_[p];
            dist_[q] = dist_[p] + 1;
            activate(q);
          } else if (tree_[q] != tree_[p]) {
            if (src) {
              s_end = p;
              t_end = q;
              link = a;
            } else {
              s_end = q;
              t_end = p;
              link = a ^ 1;
            }
            break;
          } else if (ts_[q] <= ts_[p] && dist_[q] > dist_[p]) {
            parent_[q] = static_cast<std::int8_t>(a ^ 1);
            ts_[q] = ts_[p];
            dist_[q] = dist_[p] + 1;
          }
        }
        if (link >= 0) break;
        active_.pop_front();
        queued_[p] = 0;
      }
      if (link < 0) break;

      ++time_;
      augment(s_end, t_end, link);
      ++augmentations_;
      while (!orphans_.empty()) {
        const std::size_t v = orphans_.front();
        orphans_.pop_front();
        adopt(v);
      }
    }
    return flow_;
  }

  // Nodes reachable from the source in the residual graph.
  std::vector<std::uint8_t> source_reachable() const {
    std::vector<std::uint8_t> seen(n_, 0);
    std::vector<std::size_t> stack;
    for (std::size_t p = 0; p < n_; ++p) {
      if (is_node_[p] && tr_[p] > 0) {
        seen[p] = 1;
        stack.push_back(p);
      }
    }
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      for (int a = 0; a < dirs_; ++a) {
        const std::size_t q = p + delta_[a];
        if (is_node_[q] && !seen[q] && rc_[p * dirs_ + a] > 0) {
          seen[q] = 1;
          stack.push_back(q);
        }
      }
    }
    return seen;
  }

  // Nodes from which the sink is reachable in the residual graph.
  std::vector<std::uint8_t> sink_reaching() const {
    std::vector<std::uint8_t> seen(n_, 0);
    std::vector<std::size_t> stack;
    for (std::size_t p = 0; p < n_; ++p) {
      if (is_node_[p] && tr_[p] < 0) {
        seen[p] = 1;
        stack.push_back(p);
      }
    }
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      for (int a = 0; a < dirs_; ++a) {
        const std::size_t q = p + delta_[a];
        if (is_node_[q] && !seen[q] && rc_[q * dirs_ + (a ^ 1)] > 0) {
          seen[q] = 1;
          stack.push_back(q);
        }
      }
    }
    return seen;
  }

 private:
  static constexpr std::int8_t kTerminal = -1;
  static constexpr std::int8_t kOrphan = -2;
  static constexpr std::int8_t kNone = -3;
  static constexpr std::int64_t kInfDist = std::numeric_limits<std::int64_t>::max();

  void activate(std::size_t p) {
    if (!queued_[p]) {
      queued_[p] = 1;
      active_.push_back(p);
    }
  }

  void make_orphan(std::size_t p) {
    parent_[p] = kOrphan;
    orphans_.push_back(p);
  }

  std::size_t parent_node(std::size_t p) const { return p + delta_[parent_[p]]; }

  void augment(std::size_t s_end, std::size_t t_end, int link) {
    Cap f = rc_[s_end * dirs_ + link];
    for (std::size_t v = s_end; parent_[v] != kTerminal;) {
      const std::size_t u = parent_node(v);
      f = std::min<Cap>(f, rc_[u * dirs_ + (parent_[v] ^ 1)]);
      v = u;
      if (parent_[v] == kTerminal) f = std::min(f, tr_[v]);
    }
    if (parent_[s_end] == kTerminal) f = std::min(f, tr_[s_end]);
    for (std::size_t v = t_end; parent_[v] != kTerminal;) {
      f = std::min<Cap>(f, rc_[v * dirs_ + parent_[v]]);
      v = parent_node(v);
      if (parent_[v] == kTerminal) f = std::min(f, -tr_[v]);
    }
    if (parent_[t_end] == kTerminal) f = std::min(f, -tr_[t_end]);

    rc_[s_end * dirs_ + link] -= static_cast<ArcCap>(f);
    rc_[t_end * dirs_ + (link ^ 1)] += static_cast<ArcCap>(f);

    std::size_t v = s_end;
    while (parent_[v] != kTerminal) {
      const int d = parent_[v];
      const std::size_t u = v + delta_[d];
      rc_[u * dirs_ + (d ^ 1)] -= static_cast<ArcCap>(f);
      rc_[v * dirs_ + d] += static_cast<ArcCap>(f);
      if (rc_[u * dirs_ + (d ^ 1)] == 0) make_orphan(v);
      v = u;
    }
    tr_[v] -= f;
    if (tr_[v] == 0) make_orphan(v);

    v = t_end;
    while (parent_[v] != kTerminal) {
      const int d = parent_[v];
      const std::size_t u = v + delta_[d];
      rc_[v * dirs_ + d] -= static_cast<ArcCap>(f);
      rc_[u * dirs_ + (d ^ 1)] += static_cast<ArcCap>(f);
      if (rc_[v * dirs_ + d] == 0) make_orphan(v);
      v = u;
    }
    tr_[v] += f;
    if (tr_[v] == 0) make_orphan(v);

    flow_ += f;
  }

  // Arc from a tree neighbor q into v (source tree) or from v into q (sink
  // tree) has residual capacity.
  bool tree_arc_open(bool src, std::size_t v, std::size_t q, int a) const {
    return src ? rc_[q * dirs_ + (a ^ 1)] > 0 : rc_[v * dirs_ + a] > 0;
  }

  void adopt(std::size_t v) {
    const std::uint8_t tree = tree_[v];
    const bool src = tree == 1;
    int best = kNone;
    std::int64_t best_d = kInfDist;
    for (int a = 0; a < dirs_; ++a) {
      const std::size_t q = v + delta_[a];
      if (!is_node_[q] || tree_[q] != tree || parent_[q] == kNone) continue;
      if (!tree_arc_open(src, v, q, a)) continue;
      // Trace q back to a terminal.
      std::int64_t d = 0;
      std::size_t w = q;
      while (true) {
        if (ts_[w] == time_) {
          d += dist_[w];
          break;
        }
        ++d;
        if (parent_[w] == kTerminal) {
          ts_[w] = time_;
          dist_[w] = 1;
          break;
        }
        if (parent_[w] == kOrphan) {
          d = kInfDist;
          break;
        }
        w = parent_node(w);
      }
      if (d == kInfDist) continue;
      if (d < best_d) {
        best = a;
        best_d = d;
      }
      for (w = q; ts_[w] != time_; w = parent_node(w)) {
        ts_[w] = time_;
        dist_[w] = d--;
      }
    }
    if (best != kNone) {
      parent_[v] = static_cast<std::int8_t>(best);
      ts_[v] = time_;
      dist_[v] = best_d + 1;
      return;
    }
    for (int a = 0; a < dirs_; ++a) {
      const std::size_t q = v + delta_[a];
      if (!is_node_[q] || tree_[q] != tree || parent_[q] == kNone) continue;
      if (tree_arc_open(src, v, q, a)) activate(q);
      if (parent_[q] >= 0 && parent_node(q) == v) make_orphan(q);
    }
    tree_[v] = 0;
    parent_[v] = kNone;
  }

  std::size_t n_;
  int dirs_;
  std::vector<std::ptrdiff_t> delta_;
  std::vector<std::uint8_t> is_node_;
  std::vector<Cap> tr_;
  std::vector<ArcCap> rc_;
  Cap flow_ = 0;
  std::int64_t augmentations_ = 0;

  std::vector<std::uint8_t> tree_;
  std::vector<std::int8_t> parent_;
  std::vector<std::int64_t> ts_;
  std::vector<std::int64_t> dist_;
  std::vector<std::uint8_t> queued_;
  std::deque<std::size_t> active_;
  std::deque<std::size_t> orphans_;
  std::int64_t time_ = 0;
};

}  // namespace mchull
