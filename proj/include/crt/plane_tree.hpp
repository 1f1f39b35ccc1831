#pragma once

#include "crt/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crt {

// Vertex address: word over {'1','2'}; the root is the empty word.
using Address = std::string;

// Rooted binary plane tree stored as its preorder sequence of
// internal/leaf flags. Vertices are preorder indices, so the preorder
// of vertices is the lexicographic order of their addresses.
class PlaneTree {
public:
    using Vertex = std::uint32_t;
    static constexpr Vertex kNoVertex = 0xffffffffU;

    PlaneTree();  // single leaf

    static PlaneTree leaf() { return PlaneTree(); }
    static PlaneTree join(const PlaneTree& left, const PlaneTree& right);
    // flags[v] != 0 iff vertex v (preorder) is internal.
    static PlaneTree from_preorder(std::vector<std::uint8_t> flags);
    // Text format: leaf "o", internal "(" left right ")".
    static PlaneTree parse(std::string_view text);

    std::string to_string() const;
    void append_text(std::string& out) const;

    std::size_t vertex_count() const { return flags_.size(); }
    std::size_t leaf_count() const { return leaves_[0]; }
    Vertex root() const { return 0; }

    bool is_leaf(Vertex v) const { return flags_[v] == 0; }
    Vertex left(Vertex v) const { return v + 1; }
    Vertex right(Vertex v) const { return right_[v]; }
    Vertex child(Vertex v, int which) const { return which == 1 ? left(v) : right(v); }
    Vertex parent(Vertex v) const { return parent_[v]; }
    std::uint32_t leaves(Vertex v) const { return leaves_[v]; }
    std::uint32_t depth(Vertex v) const { return depth_[v]; }
    // One past the last preorder index of the subtree rooted at v.
    Vertex subtree_end(Vertex v) const { return v + 2 * leaves_[v] - 1; }

    Address address(Vertex v) const;
    std::optional<Vertex> find(std::string_view address) const;
    PlaneTree subtree(Vertex v) const;
    std::uint32_t height() const;
    std::uint32_t distance(Vertex v, Vertex w) const;

    const std::vector<std::uint8_t>& preorder() const { return flags_; }
    void append_preorder(Vertex v, std::vector<std::uint8_t>& out) const;

    bool operator==(const PlaneTree& other) const { return flags_ == other.flags_; }
    bool operator!=(const PlaneTree& other) const { return !(*this == other); }
    bool operator<(const PlaneTree& other) const { return flags_ < other.flags_; }

private:
    explicit PlaneTree(std::vector<std::uint8_t> flags);

    std::vector<std::uint8_t> flags_;
    std::vector<Vertex> right_;
    std::vector<Vertex> parent_;
    std::vector<std::uint32_t> leaves_;
    std::vector<std::uint32_t> depth_;
};

enum class VertexKind { Leaf, I0, I1, I2 };

VertexKind vertex_kind(const PlaneTree& t, PlaneTree::Vertex v);

struct VertexClassification {
    // All lists are in preorder (lexicographic order of addresses).
    std::vector<PlaneTree::Vertex> leaves;
    std::vector<PlaneTree::Vertex> i0;
    std::vector<PlaneTree::Vertex> i1;
    std::vector<PlaneTree::Vertex> i2;
    std::vector<PlaneTree::Vertex> skeleton_leaves;
};

VertexClassification classify(const PlaneTree& t);

std::vector<Address> addresses(const PlaneTree& t, const std::vector<PlaneTree::Vertex>& vertices);

// All plane trees with n leaves, in increasing preorder-flag order.
std::vector<PlaneTree> enumerate_plane(std::size_t n);

PlaneTree sample_plane_uniform(std::size_t n, Rng& rng);

// Preorder flags of a uniform plane tree with n leaves, written into out.
void sample_plane_preorder(std::size_t n, Rng& rng, std::vector<std::uint8_t>& out);

struct TwoForest {
    PlaneTree first;
    PlaneTree second;
    std::size_t size() const { return first.leaf_count() + second.leaf_count(); }
    bool operator==(const TwoForest& other) const { return first == other.first && second == other.second; }
};

}  // namespace crt
