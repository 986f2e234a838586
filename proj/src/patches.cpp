#include "qnmf/patches.hpp"

#include <algorithm>
#include <stdexcept>

namespace qnmf {

void PatchGroupSpec::validate() const {
    if (patch_side < 2) throw std::invalid_argument("PatchGroupSpec: patch_side must be >= 2");
    if (group_size < 1) throw std::invalid_argument("PatchGroupSpec: group_size must be >= 1");
    if (search_window < patch_side)
        throw std::invalid_argument("PatchGroupSpec: search_window must be >= patch_side");
    if (stride < 1) throw std::invalid_argument("PatchGroupSpec: stride must be >= 1");
}

std::vector<PatchPos> reference_positions(int rows, int cols, int patch_side, int stride) {
    if (rows < patch_side || cols < patch_side)
        throw std::invalid_argument("reference_positions: image smaller than patch");
    std::vector<int> rs, cs;
    for (int r = 0; r <= rows - patch_side; r += stride) rs.push_back(r);
    if (rs.back() != rows - patch_side) rs.push_back(rows - patch_side);
    for (int c = 0; c <= cols - patch_side; c += stride) cs.push_back(c);
    if (cs.back() != cols - patch_side) cs.push_back(cols - patch_side);
    std::vector<PatchPos> out;
    out.reserve(rs.size() * cs.size());
    for (int r : rs)
        for (int c : cs) out.push_back({r, c});
    return out;
}

std::vector<PatchPos> block_match(const QMatrix& img, PatchPos ref, const PatchGroupSpec& spec) {
    spec.validate();
    const int m = spec.patch_side;
    const int max_r = img.rows() - m, max_c = img.cols() - m;
    if (ref.row < 0 || ref.col < 0 || ref.row > max_r || ref.col > max_c)
        throw std::invalid_argument("block_match: reference patch outside image");

    auto window_range = [&](int center, int hi) {
        int lo = center - spec.search_window / 2;
        lo = std::min(lo, hi - spec.search_window + 1);
        lo = std::max(lo, 0);
        const int end = std::min(lo + spec.search_window - 1, hi);
        return std::pair<int, int>{lo, end};
    };
    const auto [r0, r1] = window_range(ref.row, max_r);
    const auto [c0, c1] = window_range(ref.col, max_c);

    struct Cand {
        double dist;
        long scan;
        PatchPos pos;
    };
    std::vector<Cand> cands;
    cands.reserve(size_t(r1 - r0 + 1) * (c1 - c0 + 1));
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) {
            if (r == ref.row && c == ref.col) continue;
            double d = 0.0;
            for (int u = 0; u < m; ++u)
                for (int v = 0; v < m; ++v)
                    d += (img(r + u, c + v) - img(ref.row + u, ref.col + v)).norm_sq();
            cands.push_back({d, long(r) * img.cols() + c, {r, c}});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return a.dist != b.dist ? a.dist < b.dist : a.scan < b.scan;
    });

    std::vector<PatchPos> out;
    out.reserve(spec.group_size);
    out.push_back(ref);
    for (const auto& c : cands) {
        if (int(out.size()) >= spec.group_size) break;
        out.push_back(c.pos);
    }
    return out;
}

QMatrix extract_group(const QMatrix& img, const std::vector<PatchPos>& positions, int patch_side) {
    const int m = patch_side;
    QMatrix g(m * m, int(positions.size()));
    for (size_t p = 0; p < positions.size(); ++p) {
        const auto [r, c] = positions[p];
        for (int v = 0; v < m; ++v)
            for (int u = 0; u < m; ++u) g(v * m + u, int(p)) = img(r + u, c + v);
    }
    return g;
}

void GroupAggregator::add(const QMatrix& group, const std::vector<PatchPos>& positions,
                          int patch_side) {
    const int m = patch_side;
    if (group.rows() != m * m || group.cols() != int(positions.size()))
        throw std::invalid_argument("GroupAggregator: group shape mismatch");
    for (size_t p = 0; p < positions.size(); ++p) {
        const auto [r, c] = positions[p];
        for (int v = 0; v < m; ++v)
            for (int u = 0; u < m; ++u) {
                acc_(r + u, c + v) += group(v * m + u, int(p));
                count_(r + u, c + v) += 1.0;
            }
    }
}

QMatrix GroupAggregator::finalize(const QMatrix& fallback) const {
    QMatrix out(acc_.rows(), acc_.cols());
    for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < out.cols(); ++j)
            out(i, j) = count_(i, j) > 0.0 ? acc_(i, j) * (1.0 / count_(i, j)) : fallback(i, j);
    return out;
}

} // namespace qnmf
