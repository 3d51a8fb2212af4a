#pragma once

// SVG rendering of the Hofstadter butterfly and of its similarity-map images.
// All numeric output goes through a fixed 12-significant-digit formatter so
// documents are byte-identical across runs.

#include <algorithm>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <butterfly/similarity.hpp>

namespace butterfly {

inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct RenderConfig {
    int width{800};
    int height{600};
    i64 qmax{30};
    double margin{20.0};
};

inline void validate_config(const RenderConfig& cfg) {
    if (cfg.width < 64 || cfg.height < 64)
        throw std::invalid_argument("render: dimensions below 64 pixels");
    if (cfg.qmax < 1) throw std::invalid_argument("render: qmax must be at least 1");
    if (cfg.margin < 0 || 2 * cfg.margin >= std::min(cfg.width, cfg.height))
        throw std::invalid_argument("render: margin leaves no drawing area");
}

struct ButterflyRow {
    Rational theta;
    std::shared_ptr<const BandSpectrum> spectrum;
};

struct ButterflyImage {
    std::vector<ButterflyRow> rows;  // ascending theta
};

inline ButterflyImage build_butterfly(i64 qmax, SpectrumCache* cache = nullptr) {
    if (qmax < 1) throw std::invalid_argument("render: qmax must be at least 1");
    ButterflyImage img;
    for (const Rational& th : farey(qmax)) img.rows.push_back({th, spectrum_for(th, cache)});
    return img;
}

namespace detail {

struct Viewport {
    double x0, y0, w, h;  // inner drawing area
    double px(double x) const { return x0 + (x + 4.0) / 8.0 * w; }
    double py(double theta) const { return y0 + (1.0 - theta) * h; }
};

inline Viewport viewport_of(const RenderConfig& cfg) {
    return {cfg.margin, cfg.margin, cfg.width - 2.0 * cfg.margin, cfg.height - 2.0 * cfg.margin};
}

inline double stroke_for(i64 q) { return std::max(0.5, 4.0 / static_cast<double>(q)); }

inline void svg_open(std::string& out, const RenderConfig& cfg) {
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(cfg.width) +
           "\" height=\"" + std::to_string(cfg.height) + "\" viewBox=\"0 0 " +
           std::to_string(cfg.width) + " " + std::to_string(cfg.height) + "\">\n";
    out += "<rect width=\"" + std::to_string(cfg.width) + "\" height=\"" +
           std::to_string(cfg.height) + "\" fill=\"#ffffff\"/>\n";
}

inline void svg_band(std::string& out, const Viewport& vp, double lo, double hi, double theta,
                     i64 q) {
    const std::string y = fmt_num(vp.py(theta));
    out += "<line x1=\"" + fmt_num(vp.px(lo)) + "\" y1=\"" + y + "\" x2=\"" + fmt_num(vp.px(hi)) +
           "\" y2=\"" + y + "\" stroke=\"#000000\" stroke-width=\"" + fmt_num(stroke_for(q)) +
           "\"/>\n";
}

}  // namespace detail

inline std::string render_butterfly(const RenderConfig& cfg, SpectrumCache* cache = nullptr) {
    validate_config(cfg);
    const detail::Viewport vp = detail::viewport_of(cfg);
    std::string out;
    detail::svg_open(out, cfg);
    const ButterflyImage img = build_butterfly(cfg.qmax, cache);
    for (const ButterflyRow& row : img.rows)
        for (const auto& band : row.spectrum->bands)
            detail::svg_band(out, vp, band.first, band.second,
                             static_cast<double>(row.theta.p) / row.theta.q, row.theta.q);
    out += "</svg>\n";
    return out;
}

// Image of the full butterfly under a similarity: each source band lands
// exactly on its image band at the image frequency's row. Touching source
// bands map to separate segments, so the x = 0 split is visible whenever the
// image bands are disjoint.
inline std::string render_similarity_overlay(const Similarity& s, const RenderConfig& cfg,
                                             SpectrumCache* cache = nullptr) {
    validate_config(cfg);
    validate_similarity(s);
    const detail::Viewport vp = detail::viewport_of(cfg);
    std::string out;
    detail::svg_open(out, cfg);
    for (const Rational& th : farey(cfg.qmax)) {
        const Rational img = map_theta(s, th);
        const auto spec = spectrum_for(img, cache);
        for (i64 k = 1; k <= th.q; ++k) {
            const i64 kk = map_band_index(s, th, k);
            const auto& band = spec->bands[static_cast<std::size_t>(kk - 1)];
            detail::svg_band(out, vp, band.first, band.second,
                             static_cast<double>(img.p) / img.q, img.q);
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace butterfly
