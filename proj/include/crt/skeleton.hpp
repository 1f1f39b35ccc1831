#pragma once

#include "crt/plane_tree.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace crt {

struct MarkedTree {
    PlaneTree shape;
    std::vector<std::int64_t> marks;  // preorder of shape
    std::int64_t total_mark() const;
    bool operator==(const MarkedTree& other) const { return shape == other.shape && marks == other.marks; }
};

struct Contraction {
    MarkedTree marked;
    // image[u] = vertex of the source tree represented by shape vertex u.
    std::vector<PlaneTree::Vertex> image;
};

struct Skeleton {
    PlaneTree shape;
    std::vector<std::int64_t> x;  // preorder of shape
    std::vector<std::int64_t> y;  // leaves of shape, left to right
    std::int64_t a = 0;

    std::int64_t total_x() const;
    std::int64_t total_y() const;
    std::size_t shape_leaves() const { return shape.leaf_count(); }
    bool operator==(const Skeleton& other) const {
        return shape == other.shape && x == other.x && y == other.y && a == other.a;
    }
    bool operator<(const Skeleton& other) const;
};

// Skeleton with real marks: rescaled discrete skeletons and excursion skeletons.
struct RealSkeleton {
    PlaneTree shape;
    std::vector<double> x;  // preorder
    std::vector<double> y;  // leaf order
};

struct TrimResult {
    PlaneTree tree;
    std::vector<PlaneTree::Vertex> origin;  // vertex of the input for each trimmed vertex
};

TrimResult trim_with_origin(const PlaneTree& t, std::int64_t a);
PlaneTree trim(const PlaneTree& t, std::int64_t a);

Contraction contract(const PlaneTree& t);

Skeleton skeleton_plane(const PlaneTree& t, std::int64_t a);

RealSkeleton rescaled_skeleton(const PlaneTree& t, std::int64_t a, std::size_t n);
RealSkeleton rescale(const Skeleton& sk, std::size_t n);

// Fiber of the contraction: bit i chooses the side of the leaf child at the
// i-th I1 vertex in preorder (false: leaf on the right, chain continues left).
using FiberChoice = std::vector<bool>;

FiberChoice fiber_choice_from_index(std::uint64_t index, std::size_t length);
std::uint64_t fiber_index(const FiberChoice& choice);

struct ChainSlot {
    std::uint32_t shape_vertex = 0;  // preorder index in the shape
    std::uint32_t position = 0;      // chain position counted from the top
};

struct FiberElement {
    PlaneTree tree;
    std::vector<ChainSlot> slots;  // one per skeleton leaf of tree, in preorder
};

FiberElement fiber_element(const PlaneTree& shape, const std::vector<std::int64_t>& marks, const FiberChoice& choice);
PlaneTree fiber_tree(const MarkedTree& marked, std::uint64_t selector);

// Choice bits of a tree t0 whose I1 vertices are read in preorder.
FiberChoice fiber_choice_of(const PlaneTree& t0);

struct PlaneDecomposition {
    Skeleton skeleton;
    FiberChoice choice;
    std::vector<PlaneTree> subtrees;  // at skeleton leaves of t[a], preorder
    std::vector<TwoForest> forests;   // at I0 vertices of t[a], preorder
};

PlaneDecomposition decompose_plane(const PlaneTree& t, std::int64_t a);
PlaneTree reconstruct_plane(const Skeleton& sk, const FiberChoice& choice, const std::vector<PlaneTree>& subtrees,
                            const std::vector<TwoForest>& forests);

// Grafting shared by both reconstructions: subtrees replace the skeleton
// leaves of t0 and forests replace the leaf pairs under its I0 vertices.
PlaneTree graft(const PlaneTree& t0, const std::vector<const PlaneTree*>& subtrees,
                const std::vector<std::pair<const PlaneTree*, const PlaneTree*>>& forests);

struct ContourPath {
    std::vector<std::int8_t> steps;  // +1 / -1

    std::vector<int> heights() const;
    std::string to_string() const;  // '+' and '-' characters
    static ContourPath parse(std::string_view text);
    bool operator==(const ContourPath& other) const { return steps == other.steps; }
};

ContourPath contour(const PlaneTree& t);
// Vertex visited at each time 0..4n-4 of the contour.
std::vector<PlaneTree::Vertex> contour_vertices(const PlaneTree& t);
PlaneTree decode_contour(const ContourPath& path);

}  // namespace crt
