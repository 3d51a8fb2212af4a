// Command-line front end: spectra, characteristic polynomials, butterfly and
// similarity-overlay figures, gap labels, curve tracing, and counting
// functions, exported as JSON, CSV, or SVG with deterministic formatting.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical or I/O failure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <butterfly/curves.hpp>
#include <butterfly/gaps.hpp>
#include <butterfly/ids.hpp>
#include <butterfly/render.hpp>

using namespace butterfly;

namespace {

Rational parse_fraction(const std::string& text) {
    long long p = 0, q = 0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lld/%lld%c", &p, &q, &extra) == 2) return reduce(p, q);
    if (std::sscanf(text.c_str(), "%lld%c", &p, &extra) == 1) return reduce(p, 1);
    throw std::invalid_argument("fraction: expected p/q, got '" + text + "'");
}

ProjMat parse_matrix(const std::string& text) {
    long long a = 0, b = 0, c = 0, d = 0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lld,%lld,%lld,%lld%c", &a, &b, &c, &d, &extra) != 4)
        throw std::invalid_argument("matrix: expected a,b,c,d, got '" + text + "'");
    return ProjMat::from(a, b, c, d);
}

Sign parse_sign(const std::string& text) {
    if (text == "+" || text == "plus") return Sign::plus;
    if (text == "-" || text == "minus") return Sign::minus;
    throw std::invalid_argument("sign: expected + or -, got '" + text + "'");
}

std::string fraction_str(const Rational& r) {
    return std::to_string(r.p) + "/" + std::to_string(r.q);
}

// relative paths resolve against ATLAS_OUT_DIR when it is set
std::string resolve_out(const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    const char* dir = std::getenv("ATLAS_OUT_DIR");
    if (!dir || !*dir) return path;
    std::string full = dir;
    if (full.back() != '/') full += '/';
    return full + path;
}

void write_output(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    const std::string path = resolve_out(out);
    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << text))
        throw std::runtime_error("failed to write '" + path + "'");
}

std::string bands_json(const BandSpectrum& bs) {
    std::string out = "{\"theta\":\"" + fraction_str(bs.theta) + "\",\"edges\":[";
    for (std::size_t i = 0; i < bs.edges.size(); ++i) {
        if (i) out += ",";
        out += fmt_num(bs.edges[i]);
    }
    out += "],\"bands\":[";
    for (std::size_t i = 0; i < bs.bands.size(); ++i) {
        if (i) out += ",";
        out += "[" + fmt_num(bs.bands[i].first) + "," + fmt_num(bs.bands[i].second) + "]";
    }
    out += "]}\n";
    return out;
}

std::string bands_csv(const BandSpectrum& bs, bool header) {
    std::string out = header ? "theta,k,lo,hi\n" : "";
    for (std::size_t i = 0; i < bs.bands.size(); ++i)
        out += fraction_str(bs.theta) + "," + std::to_string(i + 1) + "," +
               fmt_num(bs.bands[i].first) + "," + fmt_num(bs.bands[i].second) + "\n";
    return out;
}

void cmd_spectrum(const std::string& theta, const std::string& format, const std::string& out) {
    const BandSpectrum bs = band_edges(parse_fraction(theta));
    if (format == "csv")
        write_output(bands_csv(bs, true), out);
    else if (format == "json")
        write_output(bands_json(bs), out);
    else
        throw std::invalid_argument("spectrum: format must be json or csv");
}

void cmd_charpoly(const std::string& theta, const std::string& format, const std::string& out) {
    const CharPoly cp = charpoly_coeffs(parse_fraction(theta));
    std::string text;
    if (format == "csv") {
        text = "degree,coefficient\n";
        for (std::size_t i = 0; i < cp.coeffs.size(); ++i)
            text += std::to_string(cp.coeffs.size() - 1 - i) + "," +
                    std::to_string(cp.coeffs[i]) + "\n";
    } else if (format == "json") {
        text = "{\"theta\":\"" + fraction_str(cp.theta) + "\",\"coefficients\":[";
        for (std::size_t i = 0; i < cp.coeffs.size(); ++i) {
            if (i) text += ",";
            text += std::to_string(cp.coeffs[i]);
        }
        text += "]}\n";
    } else {
        throw std::invalid_argument("charpoly: format must be json or csv");
    }
    write_output(text, out);
}

void cmd_butterfly(const RenderConfig& cfg, const std::string& format, const std::string& out) {
    SpectrumCache cache;
    if (format == "svg") {
        write_output(render_butterfly(cfg, &cache), out);
        return;
    }
    const ButterflyImage img = build_butterfly(cfg.qmax, &cache);
    std::string text;
    if (format == "csv") {
        text = "theta,k,lo,hi\n";
        for (const ButterflyRow& row : img.rows) text += bands_csv(*row.spectrum, false);
    } else if (format == "json") {
        text = "{\"rows\":[";
        for (std::size_t i = 0; i < img.rows.size(); ++i) {
            if (i) text += ",";
            const std::string row = bands_json(*img.rows[i].spectrum);
            text += row.substr(0, row.size() - 1);  // strip trailing newline
        }
        text += "]}\n";
    } else {
        throw std::invalid_argument("butterfly: format must be svg, csv, or json");
    }
    write_output(text, out);
}

void cmd_similarity(const std::string& matrix, i64 r, const std::string& sign,
                    const std::string& theta, const std::string& x_text,
                    const std::string& render_path, const RenderConfig& cfg,
                    const std::string& out) {
    const Similarity s = make_similarity(parse_matrix(matrix), r, parse_sign(sign));
    if (!render_path.empty()) {
        SpectrumCache cache;
        write_output(render_similarity_overlay(s, cfg, &cache), render_path);
        return;
    }
    if (theta.empty() || x_text.empty())
        throw std::invalid_argument("similarity: need --theta and --x, or --render");
    const Rational th = parse_fraction(theta);
    const MappedPoint mp = map_point(s, th, std::stod(x_text));
    std::string text = "{\"theta_out\":\"" + fraction_str(mp.theta_out) + "\",\"points\":[";
    for (std::size_t i = 0; i < mp.points.size(); ++i) {
        if (i) text += ",";
        text += fmt_num(mp.points[i]);
    }
    text += "],\"bands\":[";
    for (std::size_t i = 0; i < mp.band_index_out.size(); ++i) {
        if (i) text += ",";
        text += std::to_string(mp.band_index_out[i]);
    }
    text += "]}\n";
    write_output(text, out);
}

void cmd_gaps(const std::string& theta, const std::string& format, const std::string& out) {
    const Rational th = parse_fraction(theta);
    const BandSpectrum bs = band_edges(th);
    std::string text;
    if (format == "csv") {
        text = "k,s,t,lo,hi\n";
        for (i64 k = 1; k <= th.q - 1; ++k) {
            const GapLabel g = label_gap(th, k);
            text += std::to_string(k) + "," + std::to_string(g.s) + "," + std::to_string(g.t) +
                    "," + fmt_num(bs.bands[static_cast<std::size_t>(k - 1)].second) + "," +
                    fmt_num(bs.bands[static_cast<std::size_t>(k)].first) + "\n";
        }
    } else if (format == "json") {
        text = "{\"theta\":\"" + fraction_str(th) + "\",\"gaps\":[";
        for (i64 k = 1; k <= th.q - 1; ++k) {
            const GapLabel g = label_gap(th, k);
            if (k > 1) text += ",";
            text += "{\"k\":" + std::to_string(k) + ",\"s\":" + std::to_string(g.s) +
                    ",\"t\":" + std::to_string(g.t) + ",\"lo\":" +
                    fmt_num(bs.bands[static_cast<std::size_t>(k - 1)].second) + ",\"hi\":" +
                    fmt_num(bs.bands[static_cast<std::size_t>(k)].first) + "}";
        }
        text += "]}\n";
    } else {
        throw std::invalid_argument("gaps: format must be csv or json");
    }
    write_output(text, out);
}

void cmd_curve(const std::string& from, const std::string& to, int sign, int grid,
               bool restricted, const std::string& svg_out, const std::string& csv_out) {
    const ImplicitCurve curve =
        trace_curve(parse_fraction(from), parse_fraction(to), sign, grid, restricted);

    std::string summary = "{\"component_count\":" + std::to_string(curve.component_count);
    try {
        summary += std::string(",\"symmetry\":\"") +
                   (classify_symmetry(curve) == CurveSymmetry::odd ? "odd" : "even4") + "\"";
    } catch (const numerical_error&) {
        summary += ",\"symmetry\":\"none\"";
    }
    if (restricted) {
        try {
            summary += ",\"diagonal_segments\":" + std::to_string(diagonal_segments(curve));
        } catch (const std::invalid_argument&) {
            // fractions outside the vertical-power family have no diagonal count
        }
    }
    summary += "}\n";
    std::fputs(summary.c_str(), stdout);

    if (!svg_out.empty()) {
        RenderConfig cfg;
        validate_config(cfg);
        const detail::Viewport vp = detail::viewport_of(cfg);
        std::string svg;
        detail::svg_open(svg, cfg);
        for (const CurveSegment& seg : curve.segments)
            svg += "<line x1=\"" + fmt_num(vp.px(seg.x1)) + "\" y1=\"" +
                   fmt_num(vp.y0 + vp.h - (seg.y1 + 4.0) / 8.0 * vp.h) + "\" x2=\"" +
                   fmt_num(vp.px(seg.x2)) + "\" y2=\"" +
                   fmt_num(vp.y0 + vp.h - (seg.y2 + 4.0) / 8.0 * vp.h) +
                   "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
        svg += "</svg>\n";
        write_output(svg, svg_out);
    }
    if (!csv_out.empty()) {
        std::string csv = "x1,y1,x2,y2,component_id\n";
        for (std::size_t i = 0; i < curve.segments.size(); ++i) {
            const CurveSegment& seg = curve.segments[i];
            csv += fmt_num(seg.x1) + "," + fmt_num(seg.y1) + "," + fmt_num(seg.x2) + "," +
                   fmt_num(seg.y2) + "," + std::to_string(curve.component_of[i]) + "\n";
        }
        write_output(csv, csv_out);
    }
}

int run(int argc, char** argv) {
    CLI::App app{"rational almost-Mathieu spectra and butterfly self-similarity maps"};
    app.require_subcommand(1);

    std::string out, format = "json", theta, matrix, sign = "+", x_text, render_path;
    std::string from, to;
    i64 r = 0;
    int curve_sign = 1, grid = 1024;
    bool restricted = false;
    std::string csv_out;
    RenderConfig cfg;
    double x_value = 0.0;

    auto* c_spectrum = app.add_subcommand("spectrum", "band intervals of one frequency");
    c_spectrum->add_option("--theta", theta, "frequency p/q")->required();
    c_spectrum->add_option("--format", format, "json or csv");
    c_spectrum->add_option("--out", out, "output file (default stdout)");
    c_spectrum->callback([&] { cmd_spectrum(theta, format, out); });

    auto* c_charpoly = app.add_subcommand("charpoly", "integer characteristic polynomial");
    c_charpoly->add_option("--theta", theta, "frequency p/q")->required();
    c_charpoly->add_option("--format", format, "json or csv");
    c_charpoly->add_option("--out", out, "output file (default stdout)");
    c_charpoly->callback([&] { cmd_charpoly(theta, format, out); });

    auto* c_butterfly = app.add_subcommand("butterfly", "full Farey-sweep figure");
    c_butterfly->add_option("--qmax", cfg.qmax, "largest denominator");
    c_butterfly->add_option("--width", cfg.width, "viewport width");
    c_butterfly->add_option("--height", cfg.height, "viewport height");
    c_butterfly->add_option("--margin", cfg.margin, "viewport margin");
    std::string b_format = "svg";
    c_butterfly->add_option("--format", b_format, "svg, csv, or json");
    c_butterfly->add_option("--out", out, "output file (default stdout)");
    c_butterfly->callback([&] { cmd_butterfly(cfg, b_format, out); });

    auto* c_similarity = app.add_subcommand("similarity", "apply one self-similarity map");
    c_similarity->add_option("--matrix", matrix, "a,b,c,d row-major")->required();
    c_similarity->add_option("--r", r, "offset index");
    c_similarity->add_option("--sign", sign, "+ or -");
    c_similarity->add_option("--theta", theta, "source frequency p/q");
    c_similarity->add_option("--x", x_text, "source spectrum point");
    c_similarity->add_option("--render", render_path, "write the overlay figure to this file");
    c_similarity->add_option("--qmax", cfg.qmax, "overlay sweep depth");
    c_similarity->add_option("--out", out, "output file (default stdout)");
    c_similarity->callback(
        [&] { cmd_similarity(matrix, r, sign, theta, x_text, render_path, cfg, out); });

    auto* c_factor = app.add_subcommand("factor", "semigroup word of a matrix");
    c_factor->add_option("--matrix", matrix, "a,b,c,d row-major")->required();
    c_factor->callback(
        [&] { write_output(factor_word(parse_matrix(matrix)).str() + "\n", out); });

    auto* c_gaps = app.add_subcommand("gaps", "Diophantine labels of the spectral gaps");
    c_gaps->add_option("--theta", theta, "frequency p/q")->required();
    std::string g_format = "csv";
    c_gaps->add_option("--format", g_format, "csv or json");
    c_gaps->add_option("--out", out, "output file (default stdout)");
    c_gaps->callback([&] { cmd_gaps(theta, g_format, out); });

    auto* c_curve = app.add_subcommand("curve", "trace one implicit polynomial curve");
    c_curve->add_option("--from", from, "first frequency p/q")->required();
    c_curve->add_option("--to", to, "second frequency p'/q'")->required();
    c_curve->add_option("--sign", curve_sign, "+1 or -1");
    c_curve->add_option("--grid", grid, "samples per axis");
    c_curve->add_flag("--restricted", restricted, "clip to |P(x)| <= 4");
    c_curve->add_option("--out", out, "SVG output file");
    c_curve->add_option("--csv", csv_out, "CSV segment dump file");
    c_curve->callback([&] { cmd_curve(from, to, curve_sign, grid, restricted, out, csv_out); });

    auto* c_ids = app.add_subcommand("ids", "integrated density of states of the free band");
    c_ids->add_option("--x", x_value, "evaluation point")->required();
    c_ids->callback([&] { write_output(fmt_num(ids_F(x_value)) + "\n", out); });

    auto* c_trace = app.add_subcommand("trace", "counting function below x");
    c_trace->add_option("--theta", theta, "frequency p/q")->required();
    c_trace->add_option("--x", x_value, "evaluation point")->required();
    c_trace->callback(
        [&] { write_output(fmt_num(trace_below(parse_fraction(theta), x_value)) + "\n", out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const numerical_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 2;
    } catch (const std::overflow_error& e) {
        std::fprintf(stderr, "overflow: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
