#include "celltraj/heatmap.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "celltraj/errors.hpp"

namespace celltraj {

namespace {

constexpr int kCell = 44;       // cell edge in px
constexpr int kLabelZone = 40;  // label band before the bar strips
constexpr int kBarZone = 60;    // marginal bar strips
constexpr int kMargin = kLabelZone + kBarZone;
constexpr int kPad = 16;
constexpr double kBarMax = 54.0;  // longest bar inside the strip

std::string fmt_g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

// White at 0 to #08306b at the maximum; each channel decreases linearly in
// the value, so color order matches value order.
std::string ramp_color(double v) {
    const int r = 255 - static_cast<int>(std::lround(v * 247.0));
    const int g = 255 - static_cast<int>(std::lround(v * 207.0));
    const int b = 255 - static_cast<int>(std::lround(v * 148.0));
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_heatmap(const TransportPlan& plan, const std::vector<std::string>& labels) {
    const int d = plan.dim();
    if (static_cast<int>(labels.size()) != d) {
        std::ostringstream msg;
        msg << "heatmap needs one label per type: got " << labels.size() << " labels for "
            << d << " types";
        throw InputError(msg.str());
    }

    const Matrix& pi = plan.pi();
    const double peak = pi.maxCoeff();
    const Vector rows = plan.row_marginal();
    const Vector cols = pi.colwise().sum();
    const double row_peak = rows.maxCoeff();
    const double col_peak = cols.maxCoeff();

    const int size = kMargin + d * kCell + kPad;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\""
        << size << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
    svg << "  <rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size
        << "\" fill=\"#ffffff\"/>\n";

    for (int k = 0; k < d; ++k) {
        const int cx = kMargin + k * kCell + kCell / 2;
        svg << "  <text x=\"" << cx << "\" y=\"" << kLabelZone - 8
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << escape_xml(labels[static_cast<std::size_t>(k)]) << "</text>\n";
        const double h = col_peak > 0.0 ? kBarMax * cols[k] / col_peak : 0.0;
        svg << "  <rect class=\"col-bar\" x=\"" << kMargin + k * kCell + 2 << "\" y=\""
            << fmt_g(kMargin - 2 - h) << "\" width=\"" << kCell - 4 << "\" height=\""
            << fmt_g(h) << "\" fill=\"#6baed6\"><title>" << fmt_g(cols[k])
            << "</title></rect>\n";
    }
    for (int j = 0; j < d; ++j) {
        const int cy = kMargin + j * kCell + kCell / 2;
        svg << "  <text x=\"" << kLabelZone - 8 << "\" y=\"" << cy + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
            << escape_xml(labels[static_cast<std::size_t>(j)]) << "</text>\n";
        const double w = row_peak > 0.0 ? kBarMax * rows[j] / row_peak : 0.0;
        svg << "  <rect class=\"row-bar\" x=\"" << fmt_g(kMargin - 2 - w) << "\" y=\""
            << kMargin + j * kCell + 2 << "\" width=\"" << fmt_g(w) << "\" height=\""
            << kCell - 4 << "\" fill=\"#6baed6\"><title>" << fmt_g(rows[j])
            << "</title></rect>\n";
    }

    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
            const double v = peak > 0.0 ? pi(j, k) / peak : 0.0;
            svg << "  <rect class=\"cell\" data-row=\"" << j << "\" data-col=\"" << k
                << "\" x=\"" << kMargin + k * kCell << "\" y=\"" << kMargin + j * kCell
                << "\" width=\"" << kCell << "\" height=\"" << kCell << "\" fill=\""
                << ramp_color(v) << "\" stroke=\"#cccccc\" stroke-width=\"0.5\"><title>"
                << fmt_g(pi(j, k)) << "</title></rect>\n";
        }
    }

    svg << "</svg>\n";
    return svg.str();
}

void write_heatmap(const TransportPlan& plan, const std::vector<std::string>& labels,
                   const std::string& path) {
    const std::string svg = render_heatmap(plan, labels);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot open output file for writing: " + path);
    }
    out << svg;
    if (!out) {
        throw InputError("failed while writing: " + path);
    }
}

}  // namespace celltraj
