#pragma once

#include <vector>

#include "qnmf/qmatrix.hpp"

namespace qnmf {

// Non-local patch grouping parameters (patch side m, group size n).
struct PatchGroupSpec {
    int patch_side{6};
    int group_size{60};
    int search_window{30};
    int stride{4};

    void validate() const;
};

struct PatchPos {
    int row{0}, col{0};
    bool operator==(const PatchPos&) const = default;
};

// Reference top-left positions on a stride grid, with the last row/column
// forced in so every pixel is covered by at least one patch.
std::vector<PatchPos> reference_positions(int rows, int cols, int patch_side, int stride);

// The group_size candidate positions minimizing squared quaternion-Frobenius
// patch distance inside the search window (clamped inside the image). The
// reference itself ranks first; ties break by row-major scan order.
std::vector<PatchPos> block_match(const QMatrix& img, PatchPos ref, const PatchGroupSpec& spec);

// Each patch vectorized column-major into one column: patch_side^2 x n.
QMatrix extract_group(const QMatrix& img, const std::vector<PatchPos>& positions, int patch_side);

// Mean-of-writes aggregation of overlapping patch estimates.
class GroupAggregator {
public:
    GroupAggregator(int rows, int cols) : acc_(rows, cols), count_(rows, cols, 0.0) {}

    void add(const QMatrix& group, const std::vector<PatchPos>& positions, int patch_side);

    // Pixels that received no write fall back to the given image.
    QMatrix finalize(const QMatrix& fallback) const;

private:
    QMatrix acc_;
    RealMatrix count_;
};

} // namespace qnmf
