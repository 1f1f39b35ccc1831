#include "crt/skeleton.hpp"

#include "crt/errors.hpp"

#include <cmath>
#include <numeric>
#include <tuple>

namespace crt {

using Vertex = PlaneTree::Vertex;

std::int64_t MarkedTree::total_mark() const { return std::accumulate(marks.begin(), marks.end(), std::int64_t{0}); }

std::int64_t Skeleton::total_x() const { return std::accumulate(x.begin(), x.end(), std::int64_t{0}); }
std::int64_t Skeleton::total_y() const { return std::accumulate(y.begin(), y.end(), std::int64_t{0}); }

bool Skeleton::operator<(const Skeleton& other) const {
    return std::tie(shape, x, y, a) < std::tie(other.shape, other.x, other.y, other.a);
}

TrimResult trim_with_origin(const PlaneTree& t, std::int64_t a) {
    if (a < 0) throw InvalidInput("trim: a must be nonnegative");
    std::vector<std::uint8_t> flags;
    TrimResult out;
    Vertex v = 0;
    while (v < t.vertex_count()) {
        out.origin.push_back(v);
        if (!t.is_leaf(v) && static_cast<std::int64_t>(t.leaves(v)) > a) {
            flags.push_back(1);
            ++v;
        } else {
            flags.push_back(0);
            v = t.subtree_end(v);
        }
    }
    out.tree = PlaneTree::from_preorder(std::move(flags));
    return out;
}

PlaneTree trim(const PlaneTree& t, std::int64_t a) { return trim_with_origin(t, a).tree; }

Contraction contract(const PlaneTree& t) {
    if (t.leaf_count() < 2) throw InvalidInput("contract: the tree must have at least two leaves");
    Contraction out;
    std::vector<std::uint8_t> flags;
    std::vector<Vertex> pending{t.root()};
    while (!pending.empty()) {
        Vertex v = pending.back();
        pending.pop_back();
        std::int64_t chain = 0;
        VertexKind kind = vertex_kind(t, v);
        while (kind == VertexKind::I1) {
            v = t.is_leaf(t.left(v)) ? t.right(v) : t.left(v);
            kind = vertex_kind(t, v);
            ++chain;
        }
        out.marked.marks.push_back(chain);
        out.image.push_back(v);
        if (kind == VertexKind::I2) {
            flags.push_back(1);
            pending.push_back(t.right(v));
            pending.push_back(t.left(v));
        } else {
            flags.push_back(0);
        }
    }
    out.marked.shape = PlaneTree::from_preorder(std::move(flags));
    return out;
}

Skeleton skeleton_plane(const PlaneTree& t, std::int64_t a) {
    if (a < 1) throw InvalidInput("skeleton: a must be at least 1");
    if (static_cast<std::int64_t>(t.leaf_count()) <= a)
        throw InvalidInput("skeleton: the tree must have more than a leaves");
    const TrimResult trimmed = trim_with_origin(t, a);
    if (trimmed.tree.leaf_count() < 2) throw Error("skeleton: trimmed tree reduced to its root");
    const Contraction contraction = contract(trimmed.tree);
    Skeleton sk;
    sk.shape = contraction.marked.shape;
    sk.x = contraction.marked.marks;
    sk.a = a;
    for (Vertex u = 0; u < sk.shape.vertex_count(); ++u) {
        if (!sk.shape.is_leaf(u)) continue;
        sk.y.push_back(t.leaves(trimmed.origin[contraction.image[u]]));
    }
    return sk;
}

RealSkeleton rescale(const Skeleton& sk, std::size_t n) {
    RealSkeleton out;
    out.shape = sk.shape;
    const double root_n = std::sqrt(static_cast<double>(n));
    for (auto v : sk.x) out.x.push_back(static_cast<double>(v) / root_n);
    for (auto v : sk.y) out.y.push_back(static_cast<double>(v) / static_cast<double>(n));
    return out;
}

RealSkeleton rescaled_skeleton(const PlaneTree& t, std::int64_t a, std::size_t n) {
    if (n == 0) throw InvalidInput("rescaled_skeleton: n must be positive");
    return rescale(skeleton_plane(t, a), n);
}

FiberChoice fiber_choice_from_index(std::uint64_t index, std::size_t length) {
    if (length < 64 && (index >> length) != 0) throw InvalidInput("fiber selector out of range");
    FiberChoice choice(length, false);
    for (std::size_t i = 0; i < length && i < 64; ++i) choice[i] = ((index >> i) & 1U) != 0;
    return choice;
}

std::uint64_t fiber_index(const FiberChoice& choice) {
    if (choice.size() > 64) throw InvalidInput("fiber choice longer than 64 bits has no integer index");
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < choice.size(); ++i)
        if (choice[i]) index |= std::uint64_t{1} << i;
    return index;
}

FiberElement fiber_element(const PlaneTree& shape, const std::vector<std::int64_t>& marks, const FiberChoice& choice) {
    if (marks.size() != shape.vertex_count()) throw SizeMismatch("fiber: one mark per shape vertex required");
    const std::int64_t total = std::accumulate(marks.begin(), marks.end(), std::int64_t{0});
    if (static_cast<std::int64_t>(choice.size()) != total) throw SizeMismatch("fiber: choice length must equal |x|");
    for (auto m : marks)
        if (m < 0) throw InvalidInput("fiber: marks must be nonnegative");

    struct Task {
        bool slot;
        std::uint32_t vertex;
        std::uint32_t position;
    };
    FiberElement out;
    std::vector<std::uint8_t> flags;
    std::size_t next_bit = 0;
    std::vector<Task> tasks{{false, 0, 0}};
    while (!tasks.empty()) {
        const Task task = tasks.back();
        tasks.pop_back();
        if (task.slot) {
            flags.push_back(0);
            out.slots.push_back({task.vertex, task.position});
            continue;
        }
        const Vertex u = task.vertex;
        flags.push_back(1);
        if (task.position == marks[u]) {
            if (shape.is_leaf(u)) {
                flags.push_back(0);
                flags.push_back(0);
            } else {
                tasks.push_back({false, shape.right(u), 0});
                tasks.push_back({false, shape.left(u), 0});
            }
            continue;
        }
        const bool leaf_on_left = choice[next_bit++];
        const Task rest{false, u, task.position + 1};
        const Task slot{true, u, task.position};
        if (leaf_on_left) {
            tasks.push_back(rest);
            tasks.push_back(slot);
        } else {
            tasks.push_back(slot);
            tasks.push_back(rest);
        }
    }
    out.tree = PlaneTree::from_preorder(std::move(flags));
    return out;
}

PlaneTree fiber_tree(const MarkedTree& marked, std::uint64_t selector) {
    const auto total = static_cast<std::size_t>(marked.total_mark());
    if (total >= 64) throw InvalidInput("fiber_tree: integer selectors need |x| < 64");
    return fiber_element(marked.shape, marked.marks, fiber_choice_from_index(selector, total)).tree;
}

FiberChoice fiber_choice_of(const PlaneTree& t0) {
    FiberChoice choice;
    for (Vertex v = 0; v < t0.vertex_count(); ++v)
        if (vertex_kind(t0, v) == VertexKind::I1) choice.push_back(t0.is_leaf(t0.left(v)));
    return choice;
}

PlaneDecomposition decompose_plane(const PlaneTree& t, std::int64_t a) {
    PlaneDecomposition out;
    out.skeleton = skeleton_plane(t, a);
    const TrimResult trimmed = trim_with_origin(t, a);
    const PlaneTree& t0 = trimmed.tree;
    out.choice = fiber_choice_of(t0);
    for (Vertex v = 0; v < t0.vertex_count(); ++v) {
        const VertexKind kind = vertex_kind(t0, v);
        if (kind == VertexKind::I0) {
            out.forests.push_back({t.subtree(trimmed.origin[v + 1]), t.subtree(trimmed.origin[v + 2])});
        } else if (kind == VertexKind::Leaf && vertex_kind(t0, t0.parent(v)) == VertexKind::I1) {
            out.subtrees.push_back(t.subtree(trimmed.origin[v]));
        }
    }
    return out;
}

PlaneTree graft(const PlaneTree& t0, const std::vector<const PlaneTree*>& subtrees,
                const std::vector<std::pair<const PlaneTree*, const PlaneTree*>>& forests) {
    std::vector<std::uint8_t> flags;
    std::size_t next_subtree = 0, next_forest = 0;
    Vertex v = 0;
    while (v < t0.vertex_count()) {
        const VertexKind kind = vertex_kind(t0, v);
        if (kind == VertexKind::I0) {
            if (next_forest >= forests.size()) throw SizeMismatch("graft: fewer forests than I0 vertices");
            flags.push_back(1);
            const auto& forest = forests[next_forest++];
            forest.first->append_preorder(0, flags);
            forest.second->append_preorder(0, flags);
            v += 3;
        } else if (kind == VertexKind::Leaf) {
            if (next_subtree >= subtrees.size()) throw SizeMismatch("graft: fewer subtrees than skeleton leaves");
            subtrees[next_subtree++]->append_preorder(0, flags);
            ++v;
        } else {
            flags.push_back(1);
            ++v;
        }
    }
    if (next_subtree != subtrees.size()) throw SizeMismatch("graft: more subtrees than skeleton leaves");
    if (next_forest != forests.size()) throw SizeMismatch("graft: more forests than I0 vertices");
    return PlaneTree::from_preorder(std::move(flags));
}

namespace {

void check_skeleton_masses(const Skeleton& sk) {
    if (sk.a < 1) throw InvalidInput("skeleton: a must be at least 1");
    if (sk.x.size() != sk.shape.vertex_count()) throw SizeMismatch("skeleton: one x mark per shape vertex required");
    if (sk.y.size() != sk.shape.leaf_count()) throw SizeMismatch("skeleton: one y mass per shape leaf required");
    for (auto v : sk.x)
        if (v < 0) throw InvalidInput("skeleton: x marks must be nonnegative");
    for (auto v : sk.y)
        if (v <= sk.a || v > 2 * sk.a) throw InvalidInput("skeleton: y masses must lie in (a, 2a]");
}

}  // namespace

PlaneTree reconstruct_plane(const Skeleton& sk, const FiberChoice& choice, const std::vector<PlaneTree>& subtrees,
                            const std::vector<TwoForest>& forests) {
    check_skeleton_masses(sk);
    if (static_cast<std::int64_t>(subtrees.size()) != sk.total_x())
        throw SizeMismatch("reconstruct: number of subtrees must equal |x|");
    if (forests.size() != sk.y.size()) throw SizeMismatch("reconstruct: one forest per skeleton leaf required");
    for (const auto& s : subtrees)
        if (static_cast<std::int64_t>(s.leaf_count()) > sk.a)
            throw SizeMismatch("reconstruct: attached subtrees must have at most a leaves");
    for (std::size_t j = 0; j < forests.size(); ++j) {
        const auto l = static_cast<std::int64_t>(forests[j].first.leaf_count());
        const auto r = static_cast<std::int64_t>(forests[j].second.leaf_count());
        if (l > sk.a || r > sk.a || l + r <= sk.a)
            throw ForestConstraintViolated("reconstruct: forest " + std::to_string(j) + " not in F_a");
        if (l + r != sk.y[j]) throw SizeMismatch("reconstruct: forest " + std::to_string(j) + " does not match y");
    }
    const FiberElement t0 = fiber_element(sk.shape, sk.x, choice);
    std::vector<const PlaneTree*> subtree_ptrs;
    for (const auto& s : subtrees) subtree_ptrs.push_back(&s);
    std::vector<std::pair<const PlaneTree*, const PlaneTree*>> forest_ptrs;
    for (const auto& f : forests) forest_ptrs.emplace_back(&f.first, &f.second);
    return graft(t0.tree, subtree_ptrs, forest_ptrs);
}

}  // namespace crt
