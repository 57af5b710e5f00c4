#include "boxdet/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "boxdet/errors.hpp"

namespace boxdet {

namespace {

// Interference-canceled observation x'_i for the next undecided layer.
// With k decided symbols the next layer is i = n - k (1-based), row n - k - 1.
Cx cancel_interference(const PathNode& node, const CVector& x, const CMatrix& r) {
    const std::size_t n = r.rows;
    const std::size_t row = n - node.decided.size() - 1;
    Cx acc = x[row];
    for (std::size_t t = 0; t < node.decided.size(); ++t)
        acc -= r(row, n - 1 - t) * node.decided[t];
    return acc;
}

double checked_pow(unsigned base, unsigned exp, double limit) {
    double v = 1.0;
    for (unsigned i = 0; i < exp; ++i) {
        v *= base;
        if (v > limit) return v;
    }
    return v;
}

}  // namespace

PathNode ped_extend(const PathNode& node, const CVector& x, const CMatrix& r, Cx candidate) {
    const std::size_t n = r.rows;
    if (node.decided.size() >= n) throw std::invalid_argument("ped_extend: path already complete");
    const std::size_t row = n - node.decided.size() - 1;
    const Cx residual = cancel_interference(node, x, r) - r(row, row) * candidate;
    PathNode child;
    child.decided = node.decided;
    child.decided.push_back(candidate);
    child.ped = node.ped + std::norm(residual);
    return child;
}

double min_r_diagonal(const CMatrix& r) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.rows; ++i) m = std::min(m, std::abs(r(i, i)));
    return m;
}

bool path_less(const CVector& a, const CVector& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return a.size() < b.size();
}

DetectionResult result_from_path(const PathNode& leaf, const Qam& qam, DetectorStats stats) {
    DetectionResult res;
    res.final_metric = leaf.ped;
    res.stats = stats;
    const std::size_t n = leaf.decided.size();
    res.symbols.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.symbols[i] = leaf.decided[n - 1 - i];
    res.bits.reserve(n * qam.bits_per_symbol);
    for (const Cx& s : res.symbols) append_symbol_bits(s, qam, res.bits);
    return res;
}

namespace {

DetectionResult quantized_linear_result(const CVector& estimate, const CVector& x,
                                        const CMatrix& r, const Qam& qam) {
    const std::size_t n = estimate.size();
    DetectionResult res;
    res.symbols.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.symbols[i] = grid_point(qam, nearest_point(estimate[i], qam));
    res.bits.reserve(n * qam.bits_per_symbol);
    for (const Cx& s : res.symbols) append_symbol_bits(s, qam, res.bits);

    CVector rs = mat_vec(r, res.symbols);
    double metric = 0.0;
    for (std::size_t i = 0; i < n; ++i) metric += std::norm(x[i] - rs[i]);
    res.final_metric = metric;
    return res;
}

}  // namespace

DetectionResult zf_detect(const CVector& y, const CMatrix& h, const Qam& qam) {
    const QrFactors qr = qr_decompose(h);
    const CVector x = herm_mul_vec(qr.q, y);
    const CVector z = back_substitute(qr.r, x);
    return quantized_linear_result(z, x, qr.r, qam);
}

DetectionResult lmmse_detect(const CVector& y, const CMatrix& h, const Qam& qam, double noise_var) {
    // Solve (H^H H + sigma^2 I) z = H^H y through the QR of the square
    // normal-equation matrix.
    CMatrix m = herm_mul_mat(h, h);
    for (std::size_t i = 0; i < m.rows; ++i) m(i, i) += noise_var;
    const QrFactors mqr = qr_decompose(m);
    const CVector rhs = herm_mul_vec(h, y);
    const CVector z = back_substitute(mqr.r, herm_mul_vec(mqr.q, rhs));

    const QrFactors hqr = qr_decompose(h);
    const CVector x = herm_mul_vec(hqr.q, y);
    return quantized_linear_result(z, x, hqr.r, qam);
}

namespace {

struct MlSearch {
    const CVector& x;
    const CMatrix& r;
    const Qam& qam;
    DetectorStats stats;
    PathNode best;
    bool have_best = false;

    void descend(PathNode& node) {
        const std::size_t n = r.rows;
        const std::size_t row = n - node.decided.size() - 1;
        const Cx xi = cancel_interference(node, x, r);
        const Cx rii = r(row, row);

        for (unsigned lr = 0; lr < qam.side; ++lr) {
            for (unsigned li = 0; li < qam.side; ++li) {
                const Cx s = grid_point(qam, GridIndex{static_cast<int>(lr), static_cast<int>(li)});
                const double ped = node.ped + std::norm(xi - rii * s);
                ++stats.ped_evals;
                node.decided.push_back(s);
                const double saved = node.ped;
                node.ped = ped;
                if (node.decided.size() == n) {
                    ++stats.visited_nodes;
                    ++stats.comparisons;
                    if (!have_best || ped < best.ped) {
                        best = node;
                        have_best = true;
                    }
                } else {
                    descend(node);
                }
                node.ped = saved;
                node.decided.pop_back();
            }
        }
    }
};

}  // namespace

DetectionResult ml_brute_force(const CVector& x, const CMatrix& r, const Qam& qam) {
    if (checked_pow(qam.order, static_cast<unsigned>(r.rows), 1e7) > 1e7)
        throw SearchSpaceTooLarge("ml_brute_force: A^N exceeds 10^7");
    if (min_r_diagonal(r) < kSingularDiagonal)
        throw SingularChannel("ml_brute_force: singular triangular factor");

    MlSearch search{x, r, qam, {}, {}, false};
    PathNode root;
    root.decided.reserve(r.rows);
    search.descend(root);
    return result_from_path(search.best, qam, search.stats);
}

namespace {

struct SphereSearch {
    const CVector& x;
    const CMatrix& r;
    const Qam& qam;
    DetectorStats stats;
    PathNode best;
    double radius = std::numeric_limits<double>::infinity();
    bool have_best = false;

    void descend(PathNode& node) {
        const std::size_t n = r.rows;
        const std::size_t row = n - node.decided.size() - 1;
        const Cx xi = cancel_interference(node, x, r);
        const double rii = r(row, row).real();
        const Cx ref = xi / rii;

        // Children ordered nearest-first around the interference-canceled
        // reference; ties keep grid-index order.
        std::vector<std::pair<double, GridIndex>> order;
        order.reserve(qam.order);
        for (unsigned lr = 0; lr < qam.side; ++lr)
            for (unsigned li = 0; li < qam.side; ++li) {
                const GridIndex g{static_cast<int>(lr), static_cast<int>(li)};
                order.push_back({std::norm(ref - grid_point(qam, g)), g});
            }
        std::stable_sort(order.begin(), order.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });

        for (const auto& [dist2, g] : order) {
            const Cx s = grid_point(qam, g);
            const double ped = node.ped + std::norm(xi - rii * s);
            ++stats.ped_evals;
            ++stats.visited_nodes;
            ++stats.comparisons;
            if (ped > radius) break;  // ascending order: the rest is outside too

            node.decided.push_back(s);
            const double saved = node.ped;
            node.ped = ped;
            if (node.decided.size() == n) {
                if (!have_best || ped < best.ped ||
                    (ped == best.ped && path_less(node.decided, best.decided))) {
                    best = node;
                    radius = ped;
                    have_best = true;
                }
            } else {
                descend(node);
            }
            node.ped = saved;
            node.decided.pop_back();
        }
    }
};

}  // namespace

DetectionResult sphere_detect(const CVector& x, const CMatrix& r, const Qam& qam) {
    if (min_r_diagonal(r) < kSingularDiagonal)
        throw SingularChannel("sphere_detect: singular triangular factor");

    SphereSearch search{x, r, qam, {}, {}};
    PathNode root;
    root.decided.reserve(r.rows);
    search.descend(root);
    return result_from_path(search.best, qam, search.stats);
}

DetectionResult kbest_detect(const CVector& x, const CMatrix& r, const Qam& qam, unsigned k) {
    if (k < 1) throw std::invalid_argument("kbest_detect: k must be >= 1");
    if (min_r_diagonal(r) < kSingularDiagonal)
        throw SingularChannel("kbest_detect: singular triangular factor");

    const std::size_t n = r.rows;
    DetectorStats stats;
    std::vector<PathNode> survivors{PathNode{}};

    for (std::size_t layer = 0; layer < n; ++layer) {
        const std::size_t row = n - 1 - layer;
        std::vector<PathNode> expanded;
        expanded.reserve(survivors.size() * qam.order);
        for (const PathNode& parent : survivors) {
            const Cx xi = cancel_interference(parent, x, r);
            const Cx rii = r(row, row);
            for (unsigned lr = 0; lr < qam.side; ++lr)
                for (unsigned li = 0; li < qam.side; ++li) {
                    const Cx s = grid_point(qam, GridIndex{static_cast<int>(lr), static_cast<int>(li)});
                    PathNode child;
                    child.decided = parent.decided;
                    child.decided.push_back(s);
                    child.ped = parent.ped + std::norm(xi - rii * s);
                    expanded.push_back(std::move(child));
                }
        }
        stats.ped_evals += expanded.size();
        stats.visited_nodes += expanded.size();

        // Full stable sort keeps (parent index, grid index) order on ties.
        std::stable_sort(expanded.begin(), expanded.end(),
                         [](const PathNode& a, const PathNode& b) { return a.ped < b.ped; });
        if (expanded.size() > k) expanded.resize(k);
        survivors = std::move(expanded);
    }

    return result_from_path(survivors.front(), qam, stats);
}

}  // namespace boxdet
