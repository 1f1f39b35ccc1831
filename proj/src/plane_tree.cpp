#include "crt/plane_tree.hpp"

#include "crt/errors.hpp"

#include <algorithm>

namespace crt {

PlaneTree::PlaneTree() : PlaneTree(std::vector<std::uint8_t>{0}) {}

PlaneTree::PlaneTree(std::vector<std::uint8_t> flags) : flags_(std::move(flags)) {
    const std::size_t size = flags_.size();
    right_.assign(size, kNoVertex);
    parent_.assign(size, kNoVertex);
    leaves_.assign(size, 1);
    depth_.assign(size, 0);
    std::vector<Vertex> awaiting_right;  // internal vertices whose right child is still to come
    for (Vertex v = 1; v < size; ++v) {
        Vertex p;
        if (flags_[v - 1] != 0) {
            p = v - 1;
        } else {
            p = awaiting_right.back();
            awaiting_right.pop_back();
            right_[p] = v;
        }
        if (flags_[v - 1] != 0) awaiting_right.push_back(v - 1);
        parent_[v] = p;
        depth_[v] = depth_[p] + 1;
    }
    for (Vertex v = static_cast<Vertex>(size); v-- > 0;) {
        if (flags_[v] != 0) leaves_[v] = leaves_[v + 1] + leaves_[right_[v]];
    }
}

PlaneTree PlaneTree::from_preorder(std::vector<std::uint8_t> flags) {
    std::size_t open = 1;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (open == 0) throw InvalidInput("preorder flags: trailing vertices after a complete tree");
        --open;
        if (flags[i] != 0) {
            flags[i] = 1;
            open += 2;
        }
    }
    if (open != 0 || flags.empty()) throw InvalidInput("preorder flags: incomplete tree");
    return PlaneTree(std::move(flags));
}

PlaneTree PlaneTree::join(const PlaneTree& left, const PlaneTree& right) {
    std::vector<std::uint8_t> flags;
    flags.reserve(1 + left.flags_.size() + right.flags_.size());
    flags.push_back(1);
    flags.insert(flags.end(), left.flags_.begin(), left.flags_.end());
    flags.insert(flags.end(), right.flags_.begin(), right.flags_.end());
    return PlaneTree(std::move(flags));
}

PlaneTree PlaneTree::parse(std::string_view text) {
    // Each "(" opens an internal vertex expecting two children and a ")".
    std::vector<std::uint8_t> flags;
    std::vector<int> children_seen;
    std::size_t pos = 0;
    auto fail = [&](const std::string& why) {
        throw InvalidInput("tree text '" + std::string(text) + "': " + why + " at offset " + std::to_string(pos));
    };
    bool done = false;
    for (; pos < text.size(); ++pos) {
        const char ch = text[pos];
        if (done) fail("trailing characters");
        if (ch == 'o' || ch == '(') {
            if (!children_seen.empty() && children_seen.back() == 2) fail("more than two children");
            if (!children_seen.empty()) ++children_seen.back();
            if (ch == 'o') {
                flags.push_back(0);
                if (children_seen.empty()) done = true;
            } else {
                flags.push_back(1);
                children_seen.push_back(0);
            }
        } else if (ch == ')') {
            if (children_seen.empty() || children_seen.back() != 2) fail("internal vertex without two children");
            children_seen.pop_back();
            if (children_seen.empty()) done = true;
        } else {
            fail(std::string("unexpected character '") + ch + "'");
        }
    }
    if (!done) fail("incomplete tree");
    return PlaneTree(std::move(flags));
}

void PlaneTree::append_text(std::string& out) const {
    std::vector<int> pending;  // children still to print per open internal vertex
    for (std::uint8_t flag : flags_) {
        if (flag != 0) {
            out.push_back('(');
            pending.push_back(2);
            continue;
        }
        out.push_back('o');
        while (!pending.empty() && --pending.back() == 0) {
            out.push_back(')');
            pending.pop_back();
        }
    }
}

std::string PlaneTree::to_string() const {
    std::string out;
    out.reserve(3 * leaf_count());
    append_text(out);
    return out;
}

Address PlaneTree::address(Vertex v) const {
    Address word(depth_[v], '1');
    for (Vertex u = v; u != 0; u = parent_[u]) word[depth_[u] - 1] = (u == parent_[u] + 1) ? '1' : '2';
    return word;
}

std::optional<PlaneTree::Vertex> PlaneTree::find(std::string_view address) const {
    Vertex v = 0;
    for (char ch : address) {
        if (is_leaf(v) || (ch != '1' && ch != '2')) return std::nullopt;
        v = ch == '1' ? left(v) : right(v);
    }
    return v;
}

void PlaneTree::append_preorder(Vertex v, std::vector<std::uint8_t>& out) const {
    out.insert(out.end(), flags_.begin() + v, flags_.begin() + subtree_end(v));
}

PlaneTree PlaneTree::subtree(Vertex v) const {
    return PlaneTree(std::vector<std::uint8_t>(flags_.begin() + v, flags_.begin() + subtree_end(v)));
}

std::uint32_t PlaneTree::height() const { return *std::max_element(depth_.begin(), depth_.end()); }

std::uint32_t PlaneTree::distance(Vertex v, Vertex w) const {
    std::uint32_t steps = 0;
    while (v != w) {
        if (depth_[v] >= depth_[w]) {
            v = parent_[v];
        } else {
            w = parent_[w];
        }
        ++steps;
    }
    return steps;
}

VertexKind vertex_kind(const PlaneTree& t, PlaneTree::Vertex v) {
    if (t.is_leaf(v)) return VertexKind::Leaf;
    const int internal_children = (t.is_leaf(t.left(v)) ? 0 : 1) + (t.is_leaf(t.right(v)) ? 0 : 1);
    return internal_children == 0 ? VertexKind::I0 : internal_children == 1 ? VertexKind::I1 : VertexKind::I2;
}

VertexClassification classify(const PlaneTree& t) {
    VertexClassification out;
    for (PlaneTree::Vertex v = 0; v < t.vertex_count(); ++v) {
        switch (vertex_kind(t, v)) {
            case VertexKind::Leaf:
                out.leaves.push_back(v);
                if (v != 0 && vertex_kind(t, t.parent(v)) == VertexKind::I1) out.skeleton_leaves.push_back(v);
                break;
            case VertexKind::I0: out.i0.push_back(v); break;
            case VertexKind::I1: out.i1.push_back(v); break;
            case VertexKind::I2: out.i2.push_back(v); break;
        }
    }
    return out;
}

std::vector<Address> addresses(const PlaneTree& t, const std::vector<PlaneTree::Vertex>& vertices) {
    std::vector<Address> out;
    out.reserve(vertices.size());
    for (auto v : vertices) out.push_back(t.address(v));
    return out;
}

std::vector<PlaneTree> enumerate_plane(std::size_t n) {
    if (n == 0) throw InvalidInput("enumerate_plane: n must be at least 1");
    if (n > 14) throw CapExceeded("enumerate_plane: n is capped at 14");
    std::vector<std::vector<PlaneTree>> by_size(n + 1);
    by_size[1].push_back(PlaneTree::leaf());
    for (std::size_t k = 2; k <= n; ++k) {
        for (std::size_t left = 1; left < k; ++left) {
            for (const auto& l : by_size[left])
                for (const auto& r : by_size[k - left]) by_size[k].push_back(PlaneTree::join(l, r));
        }
        std::sort(by_size[k].begin(), by_size[k].end());
    }
    return by_size[n];
}

void sample_plane_preorder(std::size_t n, Rng& rng, std::vector<std::uint8_t>& out) {
    out.clear();
    if (n == 0) throw InvalidInput("sample_plane_uniform: n must be at least 1");
    // Leaf insertion: pick one of the current vertices and a side; a new
    // internal vertex takes its place, with the old subtree and a new leaf as children.
    const std::size_t total = 2 * n - 1;
    std::vector<std::uint32_t> parent(total, 0), left(total, 0), right(total, 0);
    std::vector<std::uint8_t> internal(total, 0);
    std::uint32_t root = 0;
    constexpr std::uint32_t kNone = 0xffffffffU;
    parent[0] = kNone;
    std::uint32_t count = 1;
    for (std::size_t step = 1; step < n; ++step) {
        const std::uint64_t draw = rng.below(2 * static_cast<std::uint64_t>(count));
        const auto target = static_cast<std::uint32_t>(draw >> 1);
        const bool leaf_on_left = (draw & 1U) != 0;
        const std::uint32_t joint = count, fresh = count + 1;
        count += 2;
        const std::uint32_t up = parent[target];
        parent[joint] = up;
        if (up == kNone) {
            root = joint;
        } else if (left[up] == target) {
            left[up] = joint;
        } else {
            right[up] = joint;
        }
        internal[joint] = 1;
        parent[fresh] = joint;
        parent[target] = joint;
        left[joint] = leaf_on_left ? fresh : target;
        right[joint] = leaf_on_left ? target : fresh;
    }
    out.reserve(total);
    std::vector<std::uint32_t> stack{root};
    while (!stack.empty()) {
        const std::uint32_t v = stack.back();
        stack.pop_back();
        out.push_back(internal[v]);
        if (internal[v] != 0) {
            stack.push_back(right[v]);
            stack.push_back(left[v]);
        }
    }
}

PlaneTree sample_plane_uniform(std::size_t n, Rng& rng) {
    std::vector<std::uint8_t> flags;
    sample_plane_preorder(n, rng, flags);
    return PlaneTree::from_preorder(std::move(flags));
}

}  // namespace crt
