#include "memlens/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace memlens {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12f", v);
    std::string s(buf);
    if (s == "-0.000000000000") s.erase(0, 1);
    return s;
}

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

bool drawn(const LagEstimate& e) {
    return e.test && e.test->significant && !e.test->degenerate && e.nats > 0.0;
}

}  // namespace

std::string format_csv(std::span<const LabeledProfile> profiles, bool with_label) {
    std::string out;
    if (with_label) out += "label,";
    out += "lag,estimate_nats,estimate_bits,threshold_nats,significant,degenerate_null,n_samples,"
           "n_distinct_contexts\n";
    for (const auto& lp : profiles) {
        for (const auto& e : lp.profile.lags) {
            if (with_label) out += csv_field(lp.label) + ",";
            out += std::to_string(e.lag) + ",";
            out += format_real(e.nats) + ",";
            out += format_real(e.nats / std::numbers::ln2) + ",";
            out += (e.test ? format_real(e.test->threshold) : std::string()) + ",";
            out += std::string(e.test && e.test->significant ? "true" : "false") + ",";
            out += std::string(e.test && e.test->degenerate ? "true" : "false") + ",";
            out += std::to_string(e.n_samples) + ",";
            out += std::to_string(e.n_distinct_contexts) + "\n";
        }
    }
    return out;
}

std::string render_svg(std::span<const LabeledProfile> profiles) {
    constexpr double margin_left = 70, margin_right = 20, panel_height = 140, panel_gap = 30;
    constexpr double slot = 22, bar = 14, label_band = 110, title_band = 24;

    std::size_t n_lags = 0;
    for (const auto& lp : profiles) n_lags = std::max(n_lags, lp.profile.lags.size());
    const double plot_width = std::max(1.0, static_cast<double>(profiles.size())) * slot;
    const double width = margin_left + plot_width + margin_right;
    const double height = title_band + static_cast<double>(n_lags) * (panel_height + panel_gap) + label_band;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width, 0) + "\" height=\"" +
           fixed(height, 0) + "\" viewBox=\"0 0 " + fixed(width, 0) + " " + fixed(height, 0) +
           "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fixed(margin_left, 1) +
           "\" y=\"16\" font-size=\"13\">Estimated memory use per lag (significant bars only)</text>\n";

    for (std::size_t lag = 0; lag < n_lags; ++lag) {
        const double top = title_band + static_cast<double>(lag) * (panel_height + panel_gap);
        const double baseline = top + panel_height;
        double scale_max = 0.0;
        for (const auto& lp : profiles)
            if (lag < lp.profile.lags.size() && drawn(lp.profile.lags[lag]))
                scale_max = std::max(scale_max, lp.profile.lags[lag].nats);
        if (scale_max <= 0.0) scale_max = 1.0;

        svg += "<g class=\"panel\" data-lag=\"" + std::to_string(lag) + "\">\n";
        svg += "<text x=\"8\" y=\"" + fixed(top + panel_height / 2, 1) + "\">M" + std::to_string(lag) +
               " (nats)</text>\n";
        svg += "<line x1=\"" + fixed(margin_left, 1) + "\" y1=\"" + fixed(baseline, 1) + "\" x2=\"" +
               fixed(margin_left + plot_width, 1) + "\" y2=\"" + fixed(baseline, 1) +
               "\" stroke=\"black\"/>\n";
        svg += "<line x1=\"" + fixed(margin_left, 1) + "\" y1=\"" + fixed(top, 1) + "\" x2=\"" +
               fixed(margin_left, 1) + "\" y2=\"" + fixed(baseline, 1) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fixed(margin_left - 4, 1) + "\" y=\"" + fixed(top + 4, 1) +
               "\" text-anchor=\"end\">" + fixed(scale_max, 3) + "</text>\n";

        for (std::size_t k = 0; k < profiles.size(); ++k) {
            const auto& lags = profiles[k].profile.lags;
            if (lag >= lags.size() || !drawn(lags[lag])) continue;
            const double h = panel_height * lags[lag].nats / scale_max;
            const double x = margin_left + static_cast<double>(k) * slot + (slot - bar) / 2;
            svg += "<rect x=\"" + fixed(x, 1) + "\" y=\"" + fixed(baseline - h, 3) + "\" width=\"" +
                   fixed(bar, 1) + "\" height=\"" + fixed(h, 3) + "\" fill=\"#4472c4\"><title>" +
                   xml_escape(profiles[k].label) + ": " + format_real(lags[lag].nats) +
                   " nats</title></rect>\n";
        }
        svg += "</g>\n";
    }

    const double label_top = title_band + static_cast<double>(n_lags) * (panel_height + panel_gap);
    for (std::size_t k = 0; k < profiles.size(); ++k) {
        const double x = margin_left + static_cast<double>(k) * slot + slot / 2;
        svg += "<text x=\"" + fixed(x, 1) + "\" y=\"" + fixed(label_top, 1) + "\" transform=\"rotate(60 " +
               fixed(x, 1) + " " + fixed(label_top, 1) + ")\">" + xml_escape(profiles[k].label) +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace memlens
