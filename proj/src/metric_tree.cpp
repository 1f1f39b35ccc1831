#include "crt/metric_tree.hpp"

#include "crt/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>

namespace crt {

MetricTree MetricTree::segment(double length) {
    if (length < 0.0) throw InvalidInput("metric tree: segment lengths must be nonnegative");
    MetricTree out;
    out.nodes_.push_back({length, -1, -1, -1});
    out.finalize();
    return out;
}

MetricTree MetricTree::graft(double length, const MetricTree& left, const MetricTree& right) {
    if (length < 0.0) throw InvalidInput("metric tree: segment lengths must be nonnegative");
    MetricTree out;
    out.nodes_.push_back({length, -1, -1, -1});
    for (int side = 0; side < 2; ++side) {
        const MetricTree* part = side == 0 ? &left : &right;
        const int offset = static_cast<int>(out.nodes_.size());
        for (Node node : part->nodes_) {
            if (node.left >= 0) node.left += offset;
            if (node.right >= 0) node.right += offset;
            node.parent = node.parent >= 0 ? node.parent + offset : 0;
            out.nodes_.push_back(node);
        }
        (side == 0 ? out.nodes_[0].left : out.nodes_[0].right) = offset;
    }
    out.finalize();
    return out;
}

void MetricTree::finalize() {
    top_height_.assign(nodes_.size(), 0.0);
    depth_.assign(nodes_.size(), 0);
    // Parents precede children in the node list.
    for (std::size_t u = 0; u < nodes_.size(); ++u) {
        const int p = nodes_[u].parent;
        top_height_[u] = nodes_[u].length + (p >= 0 ? top_height_[p] : 0.0);
        depth_[u] = p >= 0 ? depth_[p] + 1 : 0;
    }
}

double MetricTree::height_of(std::size_t point) const { return point == 0 ? 0.0 : top_height_[point - 1]; }

double MetricTree::distance(std::size_t p, std::size_t q) const {
    if (p == 0 || q == 0) return std::abs(height_of(p) - height_of(q));
    int u = static_cast<int>(p) - 1, w = static_cast<int>(q) - 1;
    const double hu = top_height_[u], hw = top_height_[w];
    while (depth_[u] > depth_[w]) u = nodes_[u].parent;
    while (depth_[w] > depth_[u]) w = nodes_[w].parent;
    while (u != w) {
        u = nodes_[u].parent;
        w = nodes_[w].parent;
    }
    return hu + hw - 2.0 * top_height_[u];
}

DistanceMatrix MetricTree::distance_matrix() const {
    const std::size_t n = point_count();
    DistanceMatrix d(n, std::vector<double>(n, 0.0));
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) d[p][q] = d[q][p] = distance(p, q);
    return d;
}

double MetricTree::diameter() const {
    double best = 0.0;
    for (std::size_t p = 0; p < point_count(); ++p)
        for (std::size_t q = p + 1; q < point_count(); ++q) best = std::max(best, distance(p, q));
    return best;
}

std::string MetricTree::to_json() const {
    std::function<nlohmann::json(int)> encode = [&](int u) -> nlohmann::json {
        if (u < 0) return nullptr;
        nlohmann::json j;
        j["len"] = nodes_[u].length;
        j["left"] = encode(nodes_[u].left);
        j["right"] = encode(nodes_[u].right);
        return j;
    };
    return encode(0).dump();
}

MetricTree theta(const RealSkeleton& sk) {
    if (sk.x.size() != sk.shape.vertex_count()) throw SizeMismatch("theta: one length per shape vertex required");
    // Build bottom-up over reverse preorder.
    std::vector<MetricTree> built(sk.shape.vertex_count());
    for (auto v = static_cast<PlaneTree::Vertex>(sk.shape.vertex_count()); v-- > 0;) {
        if (sk.shape.is_leaf(v)) {
            built[v] = MetricTree::segment(sk.x[v]);
        } else {
            built[v] = MetricTree::graft(sk.x[v], built[sk.shape.left(v)], built[sk.shape.right(v)]);
            built[sk.shape.left(v)] = MetricTree();
            built[sk.shape.right(v)] = MetricTree();
        }
    }
    return built[0];
}

DistanceMatrix vertex_distances(const PlaneTree& t) {
    const std::size_t n = t.vertex_count();
    DistanceMatrix d(n, std::vector<double>(n, 0.0));
    for (PlaneTree::Vertex p = 0; p < n; ++p)
        for (PlaneTree::Vertex q = p + 1; q < n; ++q) d[p][q] = d[q][p] = t.distance(p, q);
    return d;
}

bool is_tree_metric(const DistanceMatrix& d, double tolerance) {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l) {
                    const double s1 = d[i][j] + d[k][l], s2 = d[i][k] + d[j][l], s3 = d[i][l] + d[j][k];
                    if (s1 > std::max(s2, s3) + tolerance) return false;
                }
    return true;
}

namespace {

// Is there a correspondence of distortion at most bound? Any correspondence
// contains a map A -> B plus, for the points of B left uncovered, a choice
// of partner in A, so the search runs over those.
class CorrespondenceSearch {
public:
    CorrespondenceSearch(const DistanceMatrix& a, const DistanceMatrix& b, double bound)
        : a_(a), b_(b), bound_(bound), covered_(b.size(), 0) {}

    bool feasible() { return assign(0); }

private:
    bool compatible(std::size_t x, std::size_t y) const {
        for (const auto& [px, py] : pairs_)
            if (std::abs(a_[x][px] - b_[y][py]) > bound_) return false;
        return true;
    }

    bool assign(std::size_t x) {
        if (x == a_.size()) return cover(0);
        for (std::size_t y = 0; y < b_.size(); ++y) {
            if (!compatible(x, y)) continue;
            pairs_.emplace_back(x, y);
            ++covered_[y];
            if (assign(x + 1)) return true;
            --covered_[y];
            pairs_.pop_back();
        }
        return false;
    }

    bool cover(std::size_t y) {
        while (y < b_.size() && covered_[y] > 0) ++y;
        if (y == b_.size()) return true;
        for (std::size_t x = 0; x < a_.size(); ++x) {
            if (!compatible(x, y)) continue;
            pairs_.emplace_back(x, y);
            ++covered_[y];
            if (cover(y + 1)) return true;
            --covered_[y];
            pairs_.pop_back();
        }
        return false;
    }

    const DistanceMatrix& a_;
    const DistanceMatrix& b_;
    double bound_;
    std::vector<int> covered_;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

}  // namespace

double gh_exact_small(const DistanceMatrix& a, const DistanceMatrix& b) {
    if (a.empty() || b.empty()) throw InvalidInput("gh_exact_small: spaces must be nonempty");
    if (a.size() > 7 || b.size() > 7) throw CapExceeded("gh_exact_small: at most 7 points per space");
    std::vector<double> candidates{0.0};
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            for (std::size_t k = 0; k < b.size(); ++k)
                for (std::size_t l = 0; l < b.size(); ++l) candidates.push_back(std::abs(a[i][j] - b[k][l]));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    // The least distortion is one of the candidates; feasibility is monotone.
    std::size_t lo = 0, hi = candidates.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (CorrespondenceSearch(a, b, candidates[mid] + 1e-12).feasible()) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return 0.5 * candidates[lo];
}

}  // namespace crt
