#include "uscut/maxflow.hpp"

#include <deque>
#include <limits>
#include <queue>

namespace uscut {
namespace {

using EdgeId = std::int32_t;

constexpr EdgeId kNoParent = -1;
constexpr EdgeId kTerminal = -2;
constexpr EdgeId kOrphan = -3;
constexpr int kInfiniteDist = std::numeric_limits<int>::max();

enum class Tree : std::uint8_t { free, source, sink };

// Residual graph in CSR form. Edge 2k is the k-th arc, 2k+1 its reverse.
// parent[v] always names the edge leading from v towards its tree root, so
// the tree parent is head[parent[v]] in both trees.
class BkSolver {
public:
    explicit BkSolver(const FlowNetwork& net)
        : n_(net.node_count()), s_(net.source()), t_(net.sink()) {
        const double sentinel = net.infinity_sentinel();
        const auto arcs = net.arcs();
        head_.reserve(arcs.size() * 2);
        rcap_.reserve(arcs.size() * 2);
        std::vector<int> degree(static_cast<std::size_t>(n_), 0);
        for (const auto& a : arcs) {
            head_.push_back(a.head);
            rcap_.push_back(a.infinite() ? sentinel : a.capacity);
            head_.push_back(a.tail);
            rcap_.push_back(0.0);
            ++degree[static_cast<std::size_t>(a.tail)];
            ++degree[static_cast<std::size_t>(a.head)];
        }
        first_.assign(static_cast<std::size_t>(n_) + 1, 0);
        for (int v = 0; v < n_; ++v) {
            first_[static_cast<std::size_t>(v) + 1] = first_[static_cast<std::size_t>(v)] + degree[static_cast<std::size_t>(v)];
        }
        adj_.resize(head_.size());
        std::vector<int> fill(first_.begin(), first_.end() - 1);
        for (EdgeId e = 0; e < static_cast<EdgeId>(head_.size()); ++e) {
            const NodeId tail = head_[static_cast<std::size_t>(e ^ 1)];
            adj_[static_cast<std::size_t>(fill[static_cast<std::size_t>(tail)]++)] = e;
        }

        tree_.assign(static_cast<std::size_t>(n_), Tree::free);
        parent_.assign(static_cast<std::size_t>(n_), kNoParent);
        ts_.assign(static_cast<std::size_t>(n_), 0);
        dist_.assign(static_cast<std::size_t>(n_), 0);
        in_active_.assign(static_cast<std::size_t>(n_), 0);
    }

    double run() {
        if (s_ == t_) {
            return 0.0;
        }
        tree_[idx(s_)] = Tree::source;
        parent_[idx(s_)] = kTerminal;
        dist_[idx(s_)] = 1;
        tree_[idx(t_)] = Tree::sink;
        parent_[idx(t_)] = kTerminal;
        dist_[idx(t_)] = 1;
        set_active(s_);
        set_active(t_);

        NodeId current = -1;
        while (true) {
            NodeId i = current;
            if (i < 0 || parent_[idx(i)] == kNoParent) {
                i = next_active();
                if (i < 0) {
                    break;
                }
            }
            current = -1;

            const EdgeId bridge = grow(i);
            ++time_;
            if (bridge != kNoParent) {
                current = i;
                augment(bridge);
                adopt_orphans();
            }
        }
        return flow_;
    }

    bool residual_positive(EdgeId e) const noexcept { return rcap_[static_cast<std::size_t>(e)] > 0.0; }
    std::span<const EdgeId> out_edges(NodeId v) const noexcept {
        return std::span<const EdgeId>(adj_).subspan(static_cast<std::size_t>(first_[idx(v)]),
                                                     static_cast<std::size_t>(first_[idx(v) + 1] - first_[idx(v)]));
    }
    NodeId head(EdgeId e) const noexcept { return head_[static_cast<std::size_t>(e)]; }

private:
    static std::size_t idx(NodeId v) noexcept { return static_cast<std::size_t>(v); }
    static EdgeId sister(EdgeId e) noexcept { return e ^ 1; }
    double& rcap(EdgeId e) noexcept { return rcap_[static_cast<std::size_t>(e)]; }

    void set_active(NodeId v) {
        if (!in_active_[idx(v)]) {
            in_active_[idx(v)] = 1;
            active_.push(v);
        }
    }

    NodeId next_active() {
        while (!active_.empty()) {
            const NodeId v = active_.front();
            active_.pop();
            in_active_[idx(v)] = 0;
            if (parent_[idx(v)] != kNoParent) {
                return v;
            }
        }
        return -1;
    }

    // Grows the tree of i by one layer. Returns the S->T edge joining the two
    // trees, or kNoParent.
    EdgeId grow(NodeId i) {
        const bool in_source = tree_[idx(i)] == Tree::source;
        for (const EdgeId a : out_edges(i)) {
            const EdgeId forward = in_source ? a : sister(a);
            if (!residual_positive(forward)) {
                continue;
            }
            const NodeId j = head(a);
            if (parent_[idx(j)] == kNoParent) {
                tree_[idx(j)] = tree_[idx(i)];
                parent_[idx(j)] = sister(a);
                ts_[idx(j)] = ts_[idx(i)];
                dist_[idx(j)] = dist_[idx(i)] + 1;
                set_active(j);
            } else if (tree_[idx(j)] != tree_[idx(i)]) {
                return forward;
            } else if (ts_[idx(j)] <= ts_[idx(i)] && dist_[idx(j)] > dist_[idx(i)]) {
                // j is closer to the root through i
                parent_[idx(j)] = sister(a);
                ts_[idx(j)] = ts_[idx(i)];
                dist_[idx(j)] = dist_[idx(i)] + 1;
            }
        }
        return kNoParent;
    }

    void make_orphan_front(NodeId v) {
        parent_[idx(v)] = kOrphan;
        orphans_.push_front(v);
    }

    void make_orphan_rear(NodeId v) {
        parent_[idx(v)] = kOrphan;
        orphans_.push_back(v);
    }

    void augment(EdgeId bridge) {
        const NodeId s_end = head(sister(bridge));
        const NodeId t_end = head(bridge);

        double bottleneck = rcap(bridge);
        for (NodeId v = s_end;;) {
            const EdgeId a = parent_[idx(v)];
            if (a == kTerminal) {
                break;
            }
            bottleneck = std::min(bottleneck, rcap(sister(a)));
            v = head(a);
        }
        for (NodeId v = t_end;;) {
            const EdgeId a = parent_[idx(v)];
            if (a == kTerminal) {
                break;
            }
            bottleneck = std::min(bottleneck, rcap(a));
            v = head(a);
        }

        rcap(bridge) -= bottleneck;
        rcap(sister(bridge)) += bottleneck;
        for (NodeId v = s_end;;) {
            const EdgeId a = parent_[idx(v)];
            if (a == kTerminal) {
                break;
            }
            const NodeId up = head(a);
            rcap(a) += bottleneck;
            rcap(sister(a)) -= bottleneck;
            if (!(rcap(sister(a)) > 0.0)) {
                make_orphan_front(v);
            }
            v = up;
        }
        for (NodeId v = t_end;;) {
            const EdgeId a = parent_[idx(v)];
            if (a == kTerminal) {
                break;
            }
            const NodeId up = head(a);
            rcap(sister(a)) += bottleneck;
            rcap(a) -= bottleneck;
            if (!(rcap(a) > 0.0)) {
                make_orphan_front(v);
            }
            v = up;
        }
        flow_ += bottleneck;
    }

    // Distance from j to its tree root, or kInfiniteDist if the chain ends in
    // an orphan. Caches distances with the current timestamp.
    int origin_distance(NodeId j) {
        int d = 0;
        NodeId v = j;
        while (true) {
            if (ts_[idx(v)] == time_) {
                d += dist_[idx(v)];
                break;
            }
            const EdgeId a = parent_[idx(v)];
            ++d;
            if (a == kTerminal) {
                ts_[idx(v)] = time_;
                dist_[idx(v)] = 1;
                break;
            }
            if (a == kOrphan) {
                return kInfiniteDist;
            }
            v = head(a);
        }
        for (NodeId u = j; ts_[idx(u)] != time_; u = head(parent_[idx(u)])) {
            ts_[idx(u)] = time_;
            dist_[idx(u)] = d--;
        }
        return dist_[idx(j)];
    }

    void process_orphan(NodeId i) {
        const Tree side = tree_[idx(i)];
        const bool in_source = side == Tree::source;

        EdgeId best = kNoParent;
        int best_dist = kInfiniteDist;
        for (const EdgeId a : out_edges(i)) {
            // Candidate parent j must still be able to carry flow along the
            // tree direction: j->i for the source tree, i->j for the sink tree.
            const EdgeId carrying = in_source ? sister(a) : a;
            if (!residual_positive(carrying)) {
                continue;
            }
            const NodeId j = head(a);
            if (tree_[idx(j)] != side || parent_[idx(j)] == kNoParent) {
                continue;
            }
            const int d = origin_distance(j);
            if (d < best_dist) {
                best = a;
                best_dist = d;
            }
        }

        if (best != kNoParent) {
            parent_[idx(i)] = best;
            ts_[idx(i)] = time_;
            dist_[idx(i)] = best_dist + 1;
            return;
        }

        parent_[idx(i)] = kNoParent;
        tree_[idx(i)] = Tree::free;
        for (const EdgeId a : out_edges(i)) {
            const NodeId j = head(a);
            if (tree_[idx(j)] != side || parent_[idx(j)] == kNoParent) {
                continue;
            }
            const EdgeId carrying = in_source ? sister(a) : a;
            if (residual_positive(carrying)) {
                set_active(j);
            }
            const EdgeId pj = parent_[idx(j)];
            if (pj != kTerminal && pj != kOrphan && head(pj) == i) {
                make_orphan_rear(j);
            }
        }
    }

    void adopt_orphans() {
        while (!orphans_.empty()) {
            const NodeId v = orphans_.front();
            orphans_.pop_front();
            process_orphan(v);
        }
    }

    int n_;
    NodeId s_;
    NodeId t_;
    std::vector<NodeId> head_;
    std::vector<double> rcap_;
    std::vector<int> first_;
    std::vector<EdgeId> adj_;

    std::vector<Tree> tree_;
    std::vector<EdgeId> parent_;
    std::vector<long> ts_;
    std::vector<int> dist_;
    std::vector<std::uint8_t> in_active_;
    std::queue<NodeId> active_;
    std::deque<NodeId> orphans_;
    long time_ = 0;
    double flow_ = 0.0;
};

} // namespace

CutResult max_flow_min_cut(const FlowNetwork& net) {
    BkSolver solver(net);
    CutResult out;
    out.max_flow_value = solver.run();

    std::vector<std::uint8_t> reach(static_cast<std::size_t>(net.node_count()), 0);
    std::queue<NodeId> bfs;
    reach[static_cast<std::size_t>(net.source())] = 1;
    bfs.push(net.source());
    while (!bfs.empty()) {
        const NodeId v = bfs.front();
        bfs.pop();
        for (const EdgeId e : solver.out_edges(v)) {
            const NodeId w = solver.head(e);
            if (!reach[static_cast<std::size_t>(w)] && solver.residual_positive(e)) {
                reach[static_cast<std::size_t>(w)] = 1;
                bfs.push(w);
            }
        }
    }

    out.cut_value = 0.0;
    for (const auto& a : net.arcs()) {
        if (reach[static_cast<std::size_t>(a.tail)] && !reach[static_cast<std::size_t>(a.head)]) {
            out.cut_value += a.capacity;
        }
    }
    out.source_side.assign(reach.begin(), reach.begin() + net.interior_count());
    return out;
}

} // namespace uscut
