#pragma once

// Marching-squares tracing of the implicit curves P_theta(x) + sign*P_theta'(y) = 0
// on [-4,4]^2: segment extraction, connected components, symmetry classification,
// and the count of near-linear diagonal runs that realize a similarity's
// horizontal map inside the band-product rectangles.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include <butterfly/similarity.hpp>

namespace butterfly {

struct CurveSegment {
    double x1{0}, y1{0}, x2{0}, y2{0};
};

enum class CurveSymmetry { odd, even4 };

struct ImplicitCurve {
    Rational theta;
    Rational theta_prime;
    int sign{1};        // f = P_theta(x) + sign * P_theta'(y)
    int resolution{0};  // samples per axis
    bool restricted{false};
    std::vector<CurveSegment> segments;
    std::vector<std::pair<i64, i64>> vertex_ids;  // grid-edge ids backing each segment
    std::vector<i64> component_of;                // per segment, first-appearance order
    i64 component_count{0};
};

namespace detail {

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// coincidence-tolerant vertex components over (id, x, y) triples
inline DisjointSet vertex_components(const std::vector<std::pair<i64, i64>>& vertex_ids,
                                     const std::vector<CurveSegment>& segments,
                                     std::map<i64, int>& index_of) {
    index_of.clear();
    std::vector<std::pair<double, double>> coords;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        for (int side = 0; side < 2; ++side) {
            const i64 vid = side == 0 ? vertex_ids[s].first : vertex_ids[s].second;
            if (index_of.emplace(vid, static_cast<int>(coords.size())).second)
                coords.emplace_back(side == 0 ? segments[s].x1 : segments[s].x2,
                                    side == 0 ? segments[s].y1 : segments[s].y2);
        }
    }
    DisjointSet dsu(coords.size());
    for (std::size_t s = 0; s < segments.size(); ++s)
        dsu.unite(index_of.at(vertex_ids[s].first), index_of.at(vertex_ids[s].second));
    // stitch vertices that coincide without sharing a grid edge (node-exact hits)
    std::vector<int> order(coords.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return coords[a] < coords[b]; });
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const auto& a = coords[order[i]];
        const auto& b = coords[order[i + 1]];
        if (std::abs(a.first - b.first) <= 1e-9 && std::abs(a.second - b.second) <= 1e-9)
            dsu.unite(order[i], order[i + 1]);
    }
    return dsu;
}

inline double point_segment_distance(double px, double py, const CurveSegment& s) {
    const double dx = s.x2 - s.x1, dy = s.y2 - s.y1;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((px - s.x1) * dx + (py - s.y1) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double qx = s.x1 + t * dx - px, qy = s.y1 + t * dy - py;
    return std::sqrt(qx * qx + qy * qy);
}

inline double nearest_distance(double px, double py, const std::vector<CurveSegment>& segs) {
    double best = std::numeric_limits<double>::infinity();
    for (const CurveSegment& s : segs) best = std::min(best, point_segment_distance(px, py, s));
    return best;
}

}  // namespace detail

inline ImplicitCurve trace_curve(const Rational& theta, const Rational& theta_prime, int sign,
                                 int resolution = 1024, bool restricted = false) {
    if (resolution < 64) throw std::invalid_argument("curve: grid resolution below 64");
    if (sign != 1 && sign != -1) throw std::invalid_argument("curve: sign must be +1 or -1");

    const int n = resolution;
    std::vector<double> grid(static_cast<std::size_t>(n)), px(grid), py(grid);
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] = -4.0 + 8.0 * i / (n - 1);
        px[static_cast<std::size_t>(i)] = charpoly_eval(theta, grid[static_cast<std::size_t>(i)]);
        py[static_cast<std::size_t>(i)] =
            charpoly_eval(theta_prime, grid[static_cast<std::size_t>(i)]);
    }
    const double s = static_cast<double>(sign);

    ImplicitCurve curve;
    curve.theta = theta;
    curve.theta_prime = theta_prime;
    curve.sign = sign;
    curve.resolution = n;
    curve.restricted = restricted;

    const i64 vbase = static_cast<i64>(n) * (n - 1);  // horizontal edges come first
    struct Vertex {
        i64 id;
        double x, y;
    };
    for (int j = 0; j + 1 < n; ++j) {
        for (int i = 0; i + 1 < n; ++i) {
            const double f0 = px[static_cast<std::size_t>(i)] + s * py[static_cast<std::size_t>(j)];
            const double f1 =
                px[static_cast<std::size_t>(i + 1)] + s * py[static_cast<std::size_t>(j)];
            const double f2 =
                px[static_cast<std::size_t>(i + 1)] + s * py[static_cast<std::size_t>(j + 1)];
            const double f3 =
                px[static_cast<std::size_t>(i)] + s * py[static_cast<std::size_t>(j + 1)];
            const int mask = (f0 < 0 ? 1 : 0) | (f1 < 0 ? 2 : 0) | (f2 < 0 ? 4 : 0) |
                             (f3 < 0 ? 8 : 0);
            if (mask == 0 || mask == 15) continue;

            const auto on_bottom = [&] {
                const double t = f0 / (f0 - f1);
                return Vertex{static_cast<i64>(j) * (n - 1) + i,
                              grid[static_cast<std::size_t>(i)] +
                                  t * (grid[static_cast<std::size_t>(i + 1)] -
                                       grid[static_cast<std::size_t>(i)]),
                              grid[static_cast<std::size_t>(j)]};
            };
            const auto on_top = [&] {
                const double t = f3 / (f3 - f2);
                return Vertex{static_cast<i64>(j + 1) * (n - 1) + i,
                              grid[static_cast<std::size_t>(i)] +
                                  t * (grid[static_cast<std::size_t>(i + 1)] -
                                       grid[static_cast<std::size_t>(i)]),
                              grid[static_cast<std::size_t>(j + 1)]};
            };
            const auto on_left = [&] {
                const double t = f0 / (f0 - f3);
                return Vertex{vbase + static_cast<i64>(j) * n + i,
                              grid[static_cast<std::size_t>(i)],
                              grid[static_cast<std::size_t>(j)] +
                                  t * (grid[static_cast<std::size_t>(j + 1)] -
                                       grid[static_cast<std::size_t>(j)])};
            };
            const auto on_right = [&] {
                const double t = f1 / (f1 - f2);
                return Vertex{vbase + static_cast<i64>(j) * n + i + 1,
                              grid[static_cast<std::size_t>(i + 1)],
                              grid[static_cast<std::size_t>(j)] +
                                  t * (grid[static_cast<std::size_t>(j + 1)] -
                                       grid[static_cast<std::size_t>(j)])};
            };
            const auto emit = [&](const Vertex& a, const Vertex& b) {
                curve.segments.push_back(CurveSegment{a.x, a.y, b.x, b.y});
                curve.vertex_ids.emplace_back(a.id, b.id);
            };

            switch (mask) {
                case 1: case 14: emit(on_left(), on_bottom()); break;
                case 2: case 13: emit(on_bottom(), on_right()); break;
                case 3: case 12: emit(on_left(), on_right()); break;
                case 4: case 11: emit(on_right(), on_top()); break;
                case 6: case 9: emit(on_bottom(), on_top()); break;
                case 7: case 8: emit(on_top(), on_left()); break;
                case 5:
                case 10: {
                    // saddle: split by the sign of f at the cell center
                    const double cx = 0.5 * (grid[static_cast<std::size_t>(i)] +
                                             grid[static_cast<std::size_t>(i + 1)]);
                    const double cy = 0.5 * (grid[static_cast<std::size_t>(j)] +
                                             grid[static_cast<std::size_t>(j + 1)]);
                    const double fc =
                        charpoly_eval(theta, cx) + s * charpoly_eval(theta_prime, cy);
                    const bool joined = (fc < 0) == (mask == 5);
                    if (joined) {
                        emit(on_bottom(), on_right());
                        emit(on_top(), on_left());
                    } else {
                        emit(on_left(), on_bottom());
                        emit(on_right(), on_top());
                    }
                    break;
                }
                default: break;
            }
        }
    }

    if (restricted) {
        std::vector<CurveSegment> keep;
        std::vector<std::pair<i64, i64>> keep_ids;
        for (std::size_t k = 0; k < curve.segments.size(); ++k) {
            const CurveSegment& seg = curve.segments[k];
            if (std::abs(charpoly_eval(theta, seg.x1)) <= 4.0 + kBandTol &&
                std::abs(charpoly_eval(theta, seg.x2)) <= 4.0 + kBandTol) {
                keep.push_back(seg);
                keep_ids.push_back(curve.vertex_ids[k]);
            }
        }
        curve.segments = std::move(keep);
        curve.vertex_ids = std::move(keep_ids);
    }

    std::map<i64, int> index_of;
    detail::DisjointSet dsu = detail::vertex_components(curve.vertex_ids, curve.segments, index_of);
    std::map<int, i64> component_id;
    curve.component_of.reserve(curve.segments.size());
    for (std::size_t k = 0; k < curve.segments.size(); ++k) {
        const int root = dsu.find(index_of.at(curve.vertex_ids[k].first));
        const auto [it, fresh] = component_id.emplace(root, curve.component_count);
        if (fresh) ++curve.component_count;
        curve.component_of.push_back(it->second);
    }
    return curve;
}

inline CurveSymmetry classify_symmetry(const ImplicitCurve& curve) {
    if (curve.segments.empty()) throw numerical_error("curve: nothing to classify");
    const double threshold = 2.0 * std::sqrt(2.0) * 8.0 / (curve.resolution - 1);
    const std::size_t count = std::min<std::size_t>(curve.segments.size(), 256);
    const std::size_t stride = curve.segments.size() / count;

    const auto near = [&](double x, double y) {
        return detail::nearest_distance(x, y, curve.segments) < threshold;
    };
    bool even4 = true, odd = true;
    for (std::size_t k = 0; k < count && (even4 || odd); ++k) {
        const CurveSegment& seg = curve.segments[k * stride];
        const double mx = 0.5 * (seg.x1 + seg.x2), my = 0.5 * (seg.y1 + seg.y2);
        if (even4 && !(near(-mx, my) && near(mx, -my) && near(-mx, -my))) even4 = false;
        if (odd && !near(-mx, -my)) odd = false;
    }
    if (even4) return CurveSymmetry::even4;
    if (odd) return CurveSymmetry::odd;
    throw numerical_error("curve: matches neither symmetry class");
}

// Count the near-linear runs realizing the horizontal map of the vertical-power
// similarity that pairs theta with theta_prime: connected pieces of the curve
// inside the band-product rectangles I_k x I'_{r p + k}.
inline i64 diagonal_segments(const ImplicitCurve& curve) {
    if (!curve.restricted)
        throw std::invalid_argument("curve: diagonal runs need the restricted trace");
    const Rational &th = curve.theta, &tp = curve.theta_prime;
    if (th.p == 0 || tp.p != th.p || (tp.q - th.q) % th.p != 0 || tp.q < th.q)
        throw std::invalid_argument("curve: fractions are not a vertical-power pair");
    const i64 steps = (tp.q - th.q) / th.p;
    i64 r = -1;
    for (i64 cand = 0; cand <= steps; ++cand) {
        const bool odd_parity = ((steps + cand) * th.p) % 2 != 0;
        if (odd_parity == (curve.sign == 1)) {
            r = cand;
            break;
        }
    }
    if (r < 0) throw std::invalid_argument("curve: sign does not match any similarity offset");

    const BandSpectrum src = band_edges(th);
    const BandSpectrum dst = band_edges(tp);

    std::vector<std::size_t> marked;
    std::vector<i64> rect_of;
    for (std::size_t k = 0; k < curve.segments.size(); ++k) {
        const CurveSegment& seg = curve.segments[k];
        const double mx = 0.5 * (seg.x1 + seg.x2), my = 0.5 * (seg.y1 + seg.y2);
        const i64 band = locate_band(src, mx);
        if (band == 0) continue;
        const auto& image = dst.bands[static_cast<std::size_t>(r * th.p + band - 1)];
        if (my < image.first - kBandTol || my > image.second + kBandTol) continue;
        marked.push_back(k);
        rect_of.push_back(band);
    }

    std::vector<CurveSegment> segs;
    std::vector<std::pair<i64, i64>> vids;
    for (const std::size_t k : marked) {
        segs.push_back(curve.segments[k]);
        vids.push_back(curve.vertex_ids[k]);
    }
    std::map<i64, int> index_of;
    detail::DisjointSet dsu = detail::vertex_components(vids, segs, index_of);
    std::vector<std::pair<i64, int>> runs;
    for (std::size_t k = 0; k < segs.size(); ++k)
        runs.emplace_back(rect_of[k], dsu.find(index_of.at(vids[k].first)));
    std::sort(runs.begin(), runs.end());
    runs.erase(std::unique(runs.begin(), runs.end()), runs.end());
    return static_cast<i64>(runs.size());
}

}  // namespace butterfly
