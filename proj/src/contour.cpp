#include "crt/errors.hpp"
#include "crt/skeleton.hpp"

#include <utility>

namespace crt {

using Vertex = PlaneTree::Vertex;

std::vector<int> ContourPath::heights() const {
    std::vector<int> out{0};
    out.reserve(steps.size() + 1);
    for (auto s : steps) out.push_back(out.back() + s);
    return out;
}

std::string ContourPath::to_string() const {
    std::string out;
    out.reserve(steps.size());
    for (auto s : steps) out.push_back(s > 0 ? '+' : '-');
    return out;
}

ContourPath ContourPath::parse(std::string_view text) {
    ContourPath out;
    for (char ch : text) {
        if (ch == '+') {
            out.steps.push_back(1);
        } else if (ch == '-') {
            out.steps.push_back(-1);
        } else if (ch != ' ' && ch != '\t' && ch != '\r') {
            throw MalformedPath(std::string("contour text: unexpected character '") + ch + "'");
        }
    }
    return out;
}

namespace {

// Walks around the tree; visit(v) is called at every time step, including time 0.
template <typename Visit>
void walk_contour(const PlaneTree& t, std::vector<std::int8_t>* steps, Visit visit) {
    std::vector<std::pair<Vertex, int>> stack{{t.root(), 0}};
    visit(t.root());
    while (!stack.empty()) {
        auto [v, stage] = stack.back();
        stack.pop_back();
        if (t.is_leaf(v)) continue;
        if (stage == 0) {
            if (steps) steps->push_back(1);
            visit(t.left(v));
            stack.emplace_back(v, 1);
            stack.emplace_back(t.left(v), 0);
        } else if (stage == 1) {
            if (steps) {
                steps->push_back(-1);
                steps->push_back(1);
            }
            visit(v);
            visit(t.right(v));
            stack.emplace_back(v, 2);
            stack.emplace_back(t.right(v), 0);
        } else {
            if (steps) steps->push_back(-1);
            visit(v);
        }
    }
}

}  // namespace

ContourPath contour(const PlaneTree& t) {
    ContourPath out;
    out.steps.reserve(4 * (t.leaf_count() - 1));
    walk_contour(t, &out.steps, [](Vertex) {});
    return out;
}

std::vector<Vertex> contour_vertices(const PlaneTree& t) {
    std::vector<Vertex> out;
    out.reserve(4 * t.leaf_count() - 3);
    walk_contour(t, nullptr, [&](Vertex v) { out.push_back(v); });
    return out;
}

PlaneTree decode_contour(const ContourPath& path) {
    struct Node {
        std::uint32_t parent;
        std::uint32_t children[2];
        int count;
    };
    std::vector<Node> nodes{{0, {0, 0}, 0}};
    std::uint32_t current = 0;
    for (std::size_t i = 0; i < path.steps.size(); ++i) {
        const auto step = path.steps[i];
        if (step == 1) {
            Node& node = nodes[current];
            if (node.count == 2) throw MalformedPath("contour: vertex with more than two children at step " + std::to_string(i));
            const auto fresh = static_cast<std::uint32_t>(nodes.size());
            node.children[node.count++] = fresh;
            nodes.push_back({current, {0, 0}, 0});
            current = fresh;
        } else if (step == -1) {
            if (current == 0) throw MalformedPath("contour: path goes below zero at step " + std::to_string(i));
            current = nodes[current].parent;
        } else {
            throw MalformedPath("contour: steps must be +1 or -1");
        }
    }
    if (current != 0) throw MalformedPath("contour: path does not return to zero");
    std::vector<std::uint8_t> flags;
    flags.reserve(nodes.size());
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        const Node& node = nodes[v];
        if (node.count == 1) throw MalformedPath("contour: vertex with a single child");
        flags.push_back(node.count == 2 ? 1 : 0);
        if (node.count == 2) {
            stack.push_back(node.children[1]);
            stack.push_back(node.children[0]);
        }
    }
    return PlaneTree::from_preorder(std::move(flags));
}

}  // namespace crt
