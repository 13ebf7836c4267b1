#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "triage/core.hpp"
#include "triage/experiment.hpp"

namespace triage {

namespace svg {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct Series {
    std::string label;
    std::vector<double> budgets;
    std::vector<double> mean, lo, hi;
};

inline const char* color(std::size_t index) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b"};
    return palette[index % 6];
}

} // namespace svg

/// Renders a sweep report as a two-panel SVG line chart: accuracy on the
/// left, QWK on the right, one curve per (model, method) with a min/max band
/// over trials. Output bytes are a pure function of the input rows.
inline std::string render_sweep_svg(const std::vector<SweepRow>& rows) {
    if (rows.empty()) throw validation_error("empty sweep report");

    const bool many_models = [&] {
        for (const auto& row : rows)
            if (row.model_tag != rows.front().model_tag) return true;
        return false;
    }();

    // curves keyed by label in first-appearance order
    std::vector<std::string> labels;
    std::map<std::string, std::map<double, std::vector<double>>> acc_points, qwk_points;
    for (const auto& row : rows) {
        const std::string label =
            many_models ? row.model_tag + "/" + row.method : row.method;
        if (acc_points.find(label) == acc_points.end()) labels.push_back(label);
        acc_points[label][row.budget_fraction].push_back(row.accuracy_after);
        qwk_points[label][row.budget_fraction].push_back(row.qwk_after);
    }

    auto collect = [](const std::map<double, std::vector<double>>& points) {
        svg::Series s;
        for (const auto& [budget, values] : points) {
            double mean = 0.0, lo = values.front(), hi = values.front();
            for (double v : values) {
                mean += v;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            s.budgets.push_back(budget);
            s.mean.push_back(mean / static_cast<double>(values.size()));
            s.lo.push_back(lo);
            s.hi.push_back(hi);
        }
        return s;
    };

    struct Panel {
        std::string title;
        std::vector<svg::Series> series;
        double ymin = 1.0, ymax = 0.0;
    };
    Panel panels[2];
    panels[0].title = "global accuracy after sampling";
    panels[1].title = "global QWK after sampling";
    double xmin = rows.front().budget_fraction, xmax = xmin;
    for (const auto& label : labels) {
        svg::Series acc = collect(acc_points[label]);
        svg::Series qwk = collect(qwk_points[label]);
        acc.label = label;
        qwk.label = label;
        for (double b : acc.budgets) {
            xmin = std::min(xmin, b);
            xmax = std::max(xmax, b);
        }
        for (std::size_t i = 0; i < acc.budgets.size(); ++i) {
            panels[0].ymin = std::min(panels[0].ymin, acc.lo[i]);
            panels[0].ymax = std::max(panels[0].ymax, acc.hi[i]);
            panels[1].ymin = std::min(panels[1].ymin, qwk.lo[i]);
            panels[1].ymax = std::max(panels[1].ymax, qwk.hi[i]);
        }
        panels[0].series.push_back(std::move(acc));
        panels[1].series.push_back(std::move(qwk));
    }
    if (xmax == xmin) {
        xmin -= 0.05;
        xmax += 0.05;
    }

    const double panel_w = 380.0, panel_h = 300.0, margin_l = 55.0, margin_t = 30.0,
                 margin_b = 45.0, gap = 70.0;
    const double width = margin_l + panel_w + gap + panel_w + 20.0;
    const double height = margin_t + panel_h + margin_b + 20.0 * (static_cast<double>(labels.size()) + 1.0);

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg::num(width) +
           "\" height=\"" + svg::num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (int p = 0; p < 2; ++p) {
        Panel& panel = panels[p];
        double ymin = panel.ymin, ymax = panel.ymax;
        const double pad = std::max(0.02, (ymax - ymin) * 0.08);
        ymin -= pad;
        ymax = std::min(1.0 + pad, ymax + pad);
        const double x0 = margin_l + p * (panel_w + gap);
        const double y0 = margin_t;
        auto sx = [&](double b) {
            return x0 + (b - xmin) / (xmax - xmin) * panel_w;
        };
        auto sy = [&](double v) {
            return y0 + panel_h - (v - ymin) / (ymax - ymin) * panel_h;
        };

        out += "<text x=\"" + svg::num(x0 + panel_w / 2) + "\" y=\"" +
               svg::num(y0 - 10) + "\" text-anchor=\"middle\">" + panel.title +
               "</text>\n";
        out += "<rect x=\"" + svg::num(x0) + "\" y=\"" + svg::num(y0) + "\" width=\"" +
               svg::num(panel_w) + "\" height=\"" + svg::num(panel_h) +
               "\" fill=\"none\" stroke=\"#333\"/>\n";

        for (int tick = 0; tick <= 4; ++tick) {
            const double v = ymin + (ymax - ymin) * tick / 4.0;
            out += "<line x1=\"" + svg::num(x0 - 4) + "\" y1=\"" + svg::num(sy(v)) +
                   "\" x2=\"" + svg::num(x0) + "\" y2=\"" + svg::num(sy(v)) +
                   "\" stroke=\"#333\"/>\n";
            out += "<text x=\"" + svg::num(x0 - 8) + "\" y=\"" + svg::num(sy(v) + 4) +
                   "\" text-anchor=\"end\">" + svg::num(v) + "</text>\n";
        }
        std::vector<double> xticks;
        for (const auto& s : panel.series)
            for (double b : s.budgets)
                if (std::find(xticks.begin(), xticks.end(), b) == xticks.end())
                    xticks.push_back(b);
        std::sort(xticks.begin(), xticks.end());
        for (double b : xticks) {
            out += "<line x1=\"" + svg::num(sx(b)) + "\" y1=\"" +
                   svg::num(y0 + panel_h) + "\" x2=\"" + svg::num(sx(b)) + "\" y2=\"" +
                   svg::num(y0 + panel_h + 4) + "\" stroke=\"#333\"/>\n";
            out += "<text x=\"" + svg::num(sx(b)) + "\" y=\"" +
                   svg::num(y0 + panel_h + 18) + "\" text-anchor=\"middle\">" +
                   svg::num(b) + "</text>\n";
        }
        out += "<text x=\"" + svg::num(x0 + panel_w / 2) + "\" y=\"" +
               svg::num(y0 + panel_h + 36) +
               "\" text-anchor=\"middle\">human budget (fraction)</text>\n";

        for (std::size_t s = 0; s < panel.series.size(); ++s) {
            const auto& series = panel.series[s];
            const char* c = svg::color(s);
            if (series.budgets.size() > 1) {
                std::string band = "<polygon fill=\"" + std::string(c) +
                                   "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
                for (std::size_t i = 0; i < series.budgets.size(); ++i)
                    band += svg::num(sx(series.budgets[i])) + "," +
                            svg::num(sy(series.hi[i])) + " ";
                for (std::size_t i = series.budgets.size(); i-- > 0;)
                    band += svg::num(sx(series.budgets[i])) + "," +
                            svg::num(sy(series.lo[i])) + " ";
                band += "\"/>\n";
                out += band;
                std::string line = "<polyline fill=\"none\" stroke=\"" + std::string(c) +
                                   "\" stroke-width=\"2\" points=\"";
                for (std::size_t i = 0; i < series.budgets.size(); ++i)
                    line += svg::num(sx(series.budgets[i])) + "," +
                            svg::num(sy(series.mean[i])) + " ";
                line += "\"/>\n";
                out += line;
            }
            for (std::size_t i = 0; i < series.budgets.size(); ++i)
                out += "<circle cx=\"" + svg::num(sx(series.budgets[i])) + "\" cy=\"" +
                       svg::num(sy(series.mean[i])) + "\" r=\"3\" fill=\"" + c +
                       "\"/>\n";
        }
    }

    // legend under the panels
    for (std::size_t s = 0; s < labels.size(); ++s) {
        const double ly = margin_t + panel_h + margin_b + 20.0 * static_cast<double>(s);
        out += "<line x1=\"" + svg::num(margin_l) + "\" y1=\"" + svg::num(ly) +
               "\" x2=\"" + svg::num(margin_l + 30) + "\" y2=\"" + svg::num(ly) +
               "\" stroke=\"" + svg::color(s) + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + svg::num(margin_l + 38) + "\" y=\"" + svg::num(ly + 4) +
               "\">" + labels[s] + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace triage
