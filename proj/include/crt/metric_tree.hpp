#pragma once

#include "crt/plane_tree.hpp"
#include "crt/skeleton.hpp"

#include <string>
#include <vector>

namespace crt {

using DistanceMatrix = std::vector<std::vector<double>>;

// Rooted binary tree of segments. Node u is a segment of the given length
// whose top end carries the children. Point 0 is the root, point u + 1 is
// the top end of node u.
class MetricTree {
public:
    struct Node {
        double length = 0.0;
        int left = -1;
        int right = -1;
        int parent = -1;
    };

    static MetricTree segment(double length);
    // Segment of the given length with two trees grafted at its top.
    static MetricTree graft(double length, const MetricTree& left, const MetricTree& right);

    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t point_count() const { return nodes_.size() + 1; }
    double height_of(std::size_t point) const;
    double distance(std::size_t p, std::size_t q) const;
    DistanceMatrix distance_matrix() const;
    double diameter() const;

    // Nested {"len": x, "left": ..., "right": ...} with null children at leaves.
    std::string to_json() const;

private:
    std::vector<Node> nodes_;
    std::vector<double> top_height_;  // root-to-top distance per node
    std::vector<int> depth_;
    void finalize();
};

// Grafts segments of lengths x along the shape.
MetricTree theta(const RealSkeleton& sk);

// Graph distances between all vertices of t, in preorder.
DistanceMatrix vertex_distances(const PlaneTree& t);

// Four-point condition within tolerance.
bool is_tree_metric(const DistanceMatrix& d, double tolerance = 1e-9);

// Exact Gromov-Hausdorff distance between two finite metric spaces with at
// most 7 points each, as half the least distortion of a correspondence.
double gh_exact_small(const DistanceMatrix& a, const DistanceMatrix& b);

}  // namespace crt
