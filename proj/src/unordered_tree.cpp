#include "crt/unordered_tree.hpp"

#include "crt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace crt {

using Vertex = PlaneTree::Vertex;

bool code_less(std::string_view lhs, std::string_view rhs) {
    if (lhs.size() != rhs.size()) return lhs.size() < rhs.size();
    return lhs < rhs;
}

std::string canonical_code(const PlaneTree& t) {
    // Reverse preorder visits children before their parent.
    std::vector<std::string> codes(t.vertex_count());
    for (Vertex v = static_cast<Vertex>(t.vertex_count()); v-- > 0;) {
        if (t.is_leaf(v)) {
            codes[v] = "o";
            continue;
        }
        std::string& l = codes[t.left(v)];
        std::string& r = codes[t.right(v)];
        const bool swap = code_less(l, r);
        std::string code;
        code.reserve(l.size() + r.size() + 2);
        code.push_back('(');
        code += swap ? r : l;
        code += swap ? l : r;
        code.push_back(')');
        codes[v] = std::move(code);
        std::string().swap(l);
        std::string().swap(r);
    }
    return codes[0];
}

UnorderedTree UnorderedTree::canonicalize(const PlaneTree& t) {
    UnorderedTree out;
    out.code_ = canonical_code(t);
    out.rep_ = PlaneTree::parse(out.code_);
    return out;
}

UnorderedTree UnorderedTree::parse(std::string_view text) { return canonicalize(PlaneTree::parse(text)); }

UnorderedTree canonicalize(const PlaneTree& t) { return UnorderedTree::canonicalize(t); }

bool equivalent(const PlaneTree& lhs, const PlaneTree& rhs) {
    return lhs.leaf_count() == rhs.leaf_count() && canonical_code(lhs) == canonical_code(rhs);
}

std::vector<UnorderedTree> enumerate_unordered(std::size_t n) {
    if (n == 0) throw InvalidInput("enumerate_unordered: n must be at least 1");
    if (n > 15) throw CapExceeded("enumerate_unordered: n is capped at 15");
    std::vector<std::vector<UnorderedTree>> by_size(n + 1);
    by_size[1].push_back(UnorderedTree());
    for (std::size_t k = 2; k <= n; ++k) {
        for (std::size_t small = 1; 2 * small <= k; ++small) {
            const auto& larger = by_size[k - small];
            const auto& smaller = by_size[small];
            for (std::size_t i = 0; i < larger.size(); ++i) {
                // Lists are sorted, so i >= j keeps the left code not smaller.
                const std::size_t j_end = (2 * small == k) ? i + 1 : smaller.size();
                for (std::size_t j = 0; j < j_end; ++j)
                    by_size[k].push_back(UnorderedTree::canonicalize(
                        PlaneTree::join(larger[i].representative(), smaller[j].representative())));
            }
        }
        std::sort(by_size[k].begin(), by_size[k].end());
    }
    return by_size[n];
}

UnorderedSampler::UnorderedSampler(std::vector<double> weights, double ratio) : weights_(std::move(weights)) {
    ratio_powers_.assign(weights_.size(), 1.0);
    for (std::size_t k = 1; k < ratio_powers_.size(); ++k) ratio_powers_[k] = ratio_powers_[k - 1] * ratio;
}

UnorderedSampler::UnorderedSampler(const CountTable& counts) {
    if (counts.family() != Family::Unordered) throw InvalidInput("UnorderedSampler: count table must be unordered");
    constexpr double ratio = 0.4;  // below the radius of convergence, so weights stay bounded
    HighFloat power = 1;
    std::vector<double> weights(counts.max_n() + 1, 0.0);
    for (std::size_t k = 1; k <= counts.max_n(); ++k) {
        power *= HighFloat(ratio);
        weights[k] = static_cast<double>(HighFloat(counts[k]) * power);
    }
    *this = UnorderedSampler(std::move(weights), ratio);
}

UnorderedSampler UnorderedSampler::with_max_size(std::size_t max_n) {
    const WeightTable nu = weight_table(WeightKind::Nu, std::max<std::size_t>(max_n, 2));
    return UnorderedSampler(nu.weights, nu.rho);
}

double UnorderedSampler::split_probability(std::size_t n, std::size_t small) const {
    if (n > max_n()) throw InvalidInput("UnorderedSampler: n exceeds the weight table");
    if (small == 0 || 2 * small > n) return 0.0;
    const std::size_t large = n - small;
    if (large != small) return weights_[large] * weights_[small] / weights_[n];
    return 0.5 * (weights_[small] * weights_[small] + ratio_powers_[small] * weights_[small]) / weights_[n];
}

std::size_t UnorderedSampler::draw_split(std::size_t n, Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    const std::size_t half = n / 2;
    for (std::size_t small = 1; small < half; ++small) {
        acc += split_probability(n, small);
        if (u < acc) return small;
    }
    return half;  // absorbs rounding in the cumulative sum
}

void UnorderedSampler::sample_into(std::size_t n, Rng& rng, std::vector<std::uint8_t>& out) const {
    if (n == 1) {
        out.push_back(0);
        return;
    }
    const std::size_t small = draw_split(n, rng);
    const std::size_t large = n - small;
    out.push_back(1);
    if (large != small) {
        sample_into(large, rng, out);
        sample_into(small, rng, out);
        return;
    }
    if (small <= 3) {
        // One class per size up to 3 leaves.
        sample_into(small, rng, out);
        sample_into(small, rng, out);
        return;
    }
    // Uniform multiset of two classes: ordered pairs of distinct classes are
    // kept with probability 1/2, equal pairs always.
    std::vector<std::uint8_t> first, second;
    while (true) {
        first.clear();
        second.clear();
        sample_into(small, rng, first);
        sample_into(small, rng, second);
        const bool same = canonical_code(PlaneTree::from_preorder(first)) ==
                          canonical_code(PlaneTree::from_preorder(second));
        if (same || rng.coin()) break;
    }
    out.insert(out.end(), first.begin(), first.end());
    out.insert(out.end(), second.begin(), second.end());
}

void UnorderedSampler::sample_preorder(std::size_t n, Rng& rng, std::vector<std::uint8_t>& out) const {
    if (n == 0) throw InvalidInput("sample_unordered_uniform: n must be at least 1");
    if (n > max_n()) throw InvalidInput("sample_unordered_uniform: n exceeds the weight table");
    out.clear();
    out.reserve(2 * n - 1);
    sample_into(n, rng, out);
}

PlaneTree UnorderedSampler::sample_representative(std::size_t n, Rng& rng) const {
    std::vector<std::uint8_t> flags;
    sample_preorder(n, rng, flags);
    return PlaneTree::from_preorder(std::move(flags));
}

UnorderedTree UnorderedSampler::sample(std::size_t n, Rng& rng) const {
    return UnorderedTree::canonicalize(sample_representative(n, rng));
}

UnorderedTree sample_unordered_uniform(std::size_t n, Rng& rng, const CountTable& counts) {
    return UnorderedSampler(counts).sample(n, rng);
}

GoodnessReport goodness(const PlaneTree& t, std::int64_t a) {
    if (static_cast<std::int64_t>(t.leaf_count()) <= a) throw InvalidInput("is_a_good: the tree must have more than a leaves");
    if (a < 1) throw InvalidInput("is_a_good: a must be at least 1");
    const TrimResult trimmed = trim_with_origin(t, a);
    GoodnessReport report;
    std::vector<std::int64_t> marks = contract(trimmed.tree).marked.marks;
    std::sort(marks.begin(), marks.end());
    report.marks_distinct = std::adjacent_find(marks.begin(), marks.end()) == marks.end();
    report.forest_sizes_distinct = true;
    const PlaneTree& t0 = trimmed.tree;
    for (Vertex v = 0; v < t0.vertex_count(); ++v) {
        if (vertex_kind(t0, v) != VertexKind::I0) continue;
        if (t.leaves(trimmed.origin[v + 1]) == t.leaves(trimmed.origin[v + 2])) report.forest_sizes_distinct = false;
    }
    return report;
}

bool is_a_good(const PlaneTree& t, std::int64_t a) { return goodness(t, a).good(); }
bool is_a_good(const UnorderedTree& t, std::int64_t a) { return is_a_good(t.representative(), a); }

namespace {

// Trimmed tree of a representative, grouped by contracted vertex.
struct ChainNode {
    std::int64_t mark = 0;
    std::vector<Vertex> hanging;   // vertices of t hanging off the chain, top first
    int children[2] = {-1, -1};    // indices into the node list, internal only
    Vertex forest[2] = {0, 0};     // vertices of t under an I0 end, leaf only
    std::int64_t mass = 0;         // forest size, leaf only
};

struct ChainStructure {
    std::vector<ChainNode> nodes;  // nodes[0] is the root
};

ChainStructure chain_structure(const PlaneTree& t, std::int64_t a) {
    const TrimResult trimmed = trim_with_origin(t, a);
    const PlaneTree& t0 = trimmed.tree;
    ChainStructure out;
    struct Pending {
        Vertex start;
        int node;
    };
    out.nodes.emplace_back();
    std::vector<Pending> pending{{0, 0}};
    while (!pending.empty()) {
        const Pending item = pending.back();
        pending.pop_back();
        Vertex v = item.start;
        ChainNode node;
        while (vertex_kind(t0, v) == VertexKind::I1) {
            const bool leaf_left = t0.is_leaf(t0.left(v));
            node.hanging.push_back(trimmed.origin[leaf_left ? t0.left(v) : t0.right(v)]);
            v = leaf_left ? t0.right(v) : t0.left(v);
        }
        node.mark = static_cast<std::int64_t>(node.hanging.size());
        if (vertex_kind(t0, v) == VertexKind::I2) {
            for (int side = 0; side < 2; ++side) {
                node.children[side] = static_cast<int>(out.nodes.size());
                out.nodes.emplace_back();
                pending.push_back({side == 0 ? t0.left(v) : t0.right(v), node.children[side]});
            }
        } else {
            node.forest[0] = trimmed.origin[v + 1];
            node.forest[1] = trimmed.origin[v + 2];
            node.mass = t.leaves(node.forest[0]) + t.leaves(node.forest[1]);
        }
        out.nodes[item.node] = std::move(node);
    }
    return out;
}

// Preorder of nodes with children ordered by decreasing mark.
std::vector<int> good_order(const ChainStructure& chains) {
    std::vector<int> order;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        order.push_back(id);
        const ChainNode& node = chains.nodes[id];
        if (node.children[0] < 0) continue;
        int first = node.children[0], second = node.children[1];
        if (chains.nodes[first].mark < chains.nodes[second].mark) std::swap(first, second);
        stack.push_back(second);
        stack.push_back(first);
    }
    return order;
}

Skeleton good_skeleton(const ChainStructure& chains, const std::vector<int>& order, std::int64_t a) {
    Skeleton sk;
    sk.a = a;
    std::vector<std::uint8_t> flags;
    for (int id : order) {
        const ChainNode& node = chains.nodes[id];
        const bool internal = node.children[0] >= 0;
        flags.push_back(internal ? 1 : 0);
        sk.x.push_back(node.mark);
        if (!internal) sk.y.push_back(node.mass);
    }
    sk.shape = PlaneTree::from_preorder(std::move(flags));
    return sk;
}

}  // namespace

Skeleton skeleton_unordered(const PlaneTree& t, std::int64_t a) {
    if (!is_a_good(t, a)) throw NotAGood("skeleton_unordered: tree is not " + std::to_string(a) + "-good");
    const ChainStructure chains = chain_structure(t, a);
    return good_skeleton(chains, good_order(chains), a);
}

Skeleton skeleton_unordered(const UnorderedTree& t, std::int64_t a) { return skeleton_unordered(t.representative(), a); }

bool is_good_skeleton(const Skeleton& sk) {
    std::vector<std::int64_t> marks = sk.x;
    std::sort(marks.begin(), marks.end());
    if (std::adjacent_find(marks.begin(), marks.end()) != marks.end()) return false;
    for (Vertex u = 0; u < sk.shape.vertex_count(); ++u)
        if (!sk.shape.is_leaf(u) && sk.x[sk.shape.left(u)] <= sk.x[sk.shape.right(u)]) return false;
    return true;
}

UnorderedDecomposition decompose_unordered(const PlaneTree& t, std::int64_t a) {
    if (!is_a_good(t, a)) throw NotAGood("decompose_unordered: tree is not " + std::to_string(a) + "-good");
    const ChainStructure chains = chain_structure(t, a);
    const std::vector<int> order = good_order(chains);
    UnorderedDecomposition out;
    out.skeleton = good_skeleton(chains, order, a);
    const FiberElement section = fiber_element(out.skeleton.shape, out.skeleton.x,
                                               FiberChoice(static_cast<std::size_t>(out.skeleton.total_x()), false));
    for (const ChainSlot& slot : section.slots) {
        const ChainNode& node = chains.nodes[order[slot.shape_vertex]];
        out.subtrees.push_back(UnorderedTree::canonicalize(t.subtree(node.hanging[slot.position])));
    }
    for (int id : order) {
        const ChainNode& node = chains.nodes[id];
        if (node.children[0] >= 0) continue;
        Vertex big = node.forest[0], little = node.forest[1];
        if (t.leaves(big) < t.leaves(little)) std::swap(big, little);
        out.forests.push_back({UnorderedTree::canonicalize(t.subtree(big)), UnorderedTree::canonicalize(t.subtree(little))});
    }
    return out;
}

UnorderedTree reconstruct_unordered(const Skeleton& sk, const std::vector<UnorderedTree>& subtrees,
                                    const std::vector<UnorderedForest>& forests) {
    if (sk.x.size() != sk.shape.vertex_count() || sk.y.size() != sk.shape.leaf_count())
        throw SizeMismatch("reconstruct_unordered: skeleton marks do not fit its shape");
    if (!is_good_skeleton(sk)) throw NotAGood("reconstruct_unordered: skeleton is not good");
    for (auto v : sk.y)
        if (v <= sk.a || v > 2 * sk.a) throw InvalidInput("reconstruct_unordered: y masses must lie in (a, 2a]");
    if (static_cast<std::int64_t>(subtrees.size()) != sk.total_x())
        throw SizeMismatch("reconstruct_unordered: number of subtrees must equal |x|");
    if (forests.size() != sk.y.size()) throw SizeMismatch("reconstruct_unordered: one forest per skeleton leaf required");
    for (const auto& s : subtrees)
        if (static_cast<std::int64_t>(s.leaf_count()) > sk.a)
            throw SizeMismatch("reconstruct_unordered: attached subtrees must have at most a leaves");
    for (std::size_t j = 0; j < forests.size(); ++j) {
        const auto big = static_cast<std::int64_t>(forests[j].larger.leaf_count());
        const auto little = static_cast<std::int64_t>(forests[j].smaller.leaf_count());
        if (big <= little) throw OrderViolation("reconstruct_unordered: forest " + std::to_string(j) + " needs |t| > |t'|");
        if (big > sk.a || big + little <= sk.a)
            throw ForestConstraintViolated("reconstruct_unordered: forest " + std::to_string(j) + " not in F_a");
        if (big + little != sk.y[j]) throw SizeMismatch("reconstruct_unordered: forest " + std::to_string(j) + " does not match y");
    }
    const FiberElement section =
        fiber_element(sk.shape, sk.x, FiberChoice(static_cast<std::size_t>(sk.total_x()), false));
    std::vector<const PlaneTree*> subtree_ptrs;
    for (const auto& s : subtrees) subtree_ptrs.push_back(&s.representative());
    std::vector<std::pair<const PlaneTree*, const PlaneTree*>> forest_ptrs;
    for (const auto& f : forests) forest_ptrs.emplace_back(&f.larger.representative(), &f.smaller.representative());
    return UnorderedTree::canonicalize(graft(section.tree, subtree_ptrs, forest_ptrs));
}

Rational exact_mean_height(std::size_t n, Family family) {
    if (n == 0) throw InvalidInput("exact_mean_height: n must be at least 1");
    if (n > 12) throw CapExceeded("exact_mean_height: n is capped at 12");
    boost::multiprecision::cpp_int total = 0, count = 0;
    if (family == Family::Plane) {
        for (const auto& t : enumerate_plane(n)) {
            total += t.height();
            ++count;
        }
    } else {
        for (const auto& t : enumerate_unordered(n)) {
            total += t.representative().height();
            ++count;
        }
    }
    return Rational(total, count);
}

}  // namespace crt
