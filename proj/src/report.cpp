#include "chaleval/report.hpp"

#include "chaleval/csv.hpp"
#include "chaleval/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace chaleval {

namespace {

constexpr const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                   "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939"};

const char* colour(std::size_t i)
{
    return palette[i % std::size(palette)];
}

std::string num(double v)
{
    return format_fixed(v, 2);
}

std::string escape(const std::string& s)
{
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

class Svg {
public:
    Svg(double width, double height) : width_(width), height_(height) {}

    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double w = 1.0)
    {
        body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
                 "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(w) + "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill, const std::string& stroke)
    {
        body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
                 "\" fill=\"" + fill + "\" fill-opacity=\"0.5\" stroke=\"" + stroke + "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill, double opacity = 1.0)
    {
        body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" + fill +
                 "\" fill-opacity=\"" + num(opacity) + "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke)
    {
        body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
            body_ += (i ? " " : "") + num(pts[i].first) + "," + num(pts[i].second);
        body_ += "\"/>\n";
    }

    void text(double x, double y, const std::string& s, const char* anchor = "middle", int size = 11)
    {
        body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
                 std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
    }

    std::string str() const
    {
        return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
               num(width_) + "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) +
               "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
    }

private:
    double width_, height_;
    std::string body_;
};

double display_value(const std::string& metric, double v)
{
    return metric == "DSC" ? 100.0 * v : v;
}

struct CellKey {
    std::string structure;
    std::string metric;
    bool ranked;
};

std::vector<CellKey> cell_order(const std::vector<ResultEntry>& entries)
{
    std::vector<CellKey> ranked, aux;
    for (const auto& e : entries) {
        auto& list = e.ranked ? ranked : aux;
        const bool seen = std::any_of(list.begin(), list.end(), [&](const CellKey& k) {
            return k.structure == e.structure && k.metric == e.metric;
        });
        if (!seen)
            list.push_back({e.structure, e.metric, e.ranked});
    }
    ranked.insert(ranked.end(), aux.begin(), aux.end());
    return ranked;
}

std::vector<double> values_for(const std::vector<ResultEntry>& entries, const std::string& team,
                               const std::string& structure, const std::string& metric)
{
    std::vector<double> v;
    for (const auto& e : entries)
        if (e.team == team && e.structure == structure && e.metric == metric)
            v.push_back(e.value);
    return v;
}

} // namespace

std::vector<LeaderboardRow> build_leaderboard(const std::vector<ResultEntry>& entries, const RankingOutcome& ranking)
{
    const auto cells = cell_order(entries);
    std::vector<LeaderboardRow> rows;
    for (std::size_t t = 0; t < ranking.teams.size(); ++t) {
        LeaderboardRow row{ranking.teams[t], ranking.final_ranks[t], ranking.rank_scores[t], {}};
        for (const auto& c : cells) {
            const auto v = values_for(entries, row.team, c.structure, c.metric);
            if (v.empty())
                throw Error(ErrorCode::incomplete_table, "no values for team '" + row.team + "' in " + c.structure + "/" + c.metric);
            row.cells.push_back({c.structure, c.metric, c.ranked, quartiles(v)});
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
        return a.global_rank != b.global_rank ? a.global_rank < b.global_rank : a.team < b.team;
    });
    return rows;
}

std::string format_summary(const std::string& metric, const Quartiles& q)
{
    const int decimals = metric == "DSC" ? 1 : 2;
    const auto f = [&](double v) { return format_fixed(display_value(metric, v), decimals); };
    return f(q.median) + " [" + f(q.q1) + " - " + f(q.q3) + "]";
}

std::string leaderboard_text(const std::vector<LeaderboardRow>& rows)
{
    std::vector<std::vector<std::string>> table;
    std::vector<std::string> header{"Team", "Global rank", "Rank score"};
    if (!rows.empty())
        for (const auto& c : rows.front().cells)
            header.push_back(c.structure + " " + c.metric + (c.metric == "DSC" ? " (%)" : " (mm)") +
                             (c.ranked ? "" : " *"));
    table.push_back(header);
    for (const auto& r : rows) {
        std::vector<std::string> line{r.team, std::to_string(r.global_rank), format_fixed(r.rank_score, 1)};
        for (const auto& c : r.cells)
            line.push_back(format_summary(c.metric, c.quartiles));
        table.push_back(std::move(line));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : table)
        for (std::size_t i = 0; i < line.size(); ++i)
            width[i] = std::max(width[i], line[i].size());
    std::string out;
    for (std::size_t r = 0; r < table.size(); ++r) {
        out += "|";
        for (std::size_t i = 0; i < table[r].size(); ++i)
            out += " " + table[r][i] + std::string(width[i] - table[r][i].size(), ' ') + " |";
        out += "\n";
        if (r == 0) {
            out += "|";
            for (std::size_t w : width)
                out += std::string(w + 2, '-') + "|";
            out += "\n";
        }
    }
    const bool any_aux = !rows.empty() && std::any_of(rows.front().cells.begin(), rows.front().cells.end(),
                                                      [](const CellSummary& c) { return !c.ranked; });
    if (any_aux)
        out += "\n* reported for insight only, not used for ranking\n";
    return out;
}

std::string leaderboard_csv(const std::vector<LeaderboardRow>& rows)
{
    std::string out = "team,global_rank,rank_score";
    if (!rows.empty())
        for (const auto& c : rows.front().cells) {
            const auto p = c.structure + "_" + c.metric;
            out += "," + p + "_median," + p + "_q1," + p + "_q3";
        }
    out += "\n";
    for (const auto& r : rows) {
        out += r.team + "," + std::to_string(r.global_rank) + "," + format_double(r.rank_score);
        for (const auto& c : r.cells)
            out += "," + format_double(c.quartiles.median) + "," + format_double(c.quartiles.q1) + "," +
                   format_double(c.quartiles.q3);
        out += "\n";
    }
    return out;
}

std::string box_plot_svg(const std::vector<ResultEntry>& entries, const std::string& structure,
                         const std::string& metric, const std::vector<LeaderboardRow>& rows)
{
    const double left = 70, top = 40, plot_h = 260, step = 70;
    const double width = left + step * static_cast<double>(rows.size()) + 30;
    Svg svg(width, top + plot_h + 70);

    std::vector<std::vector<double>> data;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& r : rows) {
        auto v = values_for(entries, r.team, structure, metric);
        for (double& x : v) {
            x = display_value(metric, x);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        data.push_back(std::move(v));
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    const auto y = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

    svg.text(width / 2, 20, structure + " " + metric + (metric == "DSC" ? " (%)" : " (mm)"), "middle", 14);
    svg.line(left, top, left, top + plot_h, "black");
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        svg.line(left - 4, y(v), left, y(v), "black");
        svg.text(left - 6, y(v) + 4, format_fixed(v, metric == "DSC" ? 1 : 2), "end", 10);
    }
    for (std::size_t t = 0; t < rows.size(); ++t) {
        const double cx = left + step * (static_cast<double>(t) + 0.5);
        svg.text(cx, top + plot_h + 20, rows[t].team, "middle", 10);
        if (data[t].empty())
            continue;
        const auto q = quartiles(data[t]);
        const double iqr = q.q3 - q.q1;
        double wlo = q.q1, whi = q.q3;
        for (double v : data[t]) {
            if (v >= q.q1 - 1.5 * iqr)
                wlo = std::min(wlo, v);
            if (v <= q.q3 + 1.5 * iqr)
                whi = std::max(whi, v);
        }
        const char* c = colour(t);
        svg.line(cx, y(whi), cx, y(q.q3), c);
        svg.line(cx, y(q.q1), cx, y(wlo), c);
        svg.line(cx - 10, y(whi), cx + 10, y(whi), c);
        svg.line(cx - 10, y(wlo), cx + 10, y(wlo), c);
        svg.rect(cx - 20, y(q.q3), 40, std::max(0.5, y(q.q1) - y(q.q3)), c, c);
        svg.line(cx - 20, y(q.median), cx + 20, y(q.median), "black", 2);
        for (double v : data[t])
            if (v < wlo || v > whi)
                svg.circle(cx, y(v), 2.5, c);
    }
    return svg.str();
}

std::string blob_plot_svg(const BootstrapSummary& s)
{
    const std::size_t nt = s.teams.size();
    const double left = 60, top = 50, step = 60;
    const double width = left + step * static_cast<double>(nt) + 30;
    const double height = top + step * static_cast<double>(nt) + 50;
    Svg svg(width, height);

    std::vector<std::size_t> order(nt);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return s.reference_ranks[a] != s.reference_ranks[b] ? s.reference_ranks[a] < s.reference_ranks[b]
                                                            : s.teams[a] < s.teams[b];
    });
    const auto y = [&](int rank) { return top + step * (rank - 0.5); };

    svg.text(width / 2, 20,
             "Bootstrap ranks (" + std::to_string(s.n_samples) + " samples), median tau " + format_fixed(s.tau_median, 3),
             "middle", 13);
    for (std::size_t r = 1; r <= nt; ++r)
        svg.text(left - 10, y(static_cast<int>(r)) + 4, std::to_string(r), "end", 10);
    for (std::size_t k = 0; k < nt; ++k) {
        const std::size_t t = order[k];
        const double cx = left + step * (static_cast<double>(k) + 0.5);
        svg.text(cx, height - 20, s.teams[t], "middle", 10);
        std::map<int, std::size_t> counts;
        for (const auto& sample : s.sample_ranks)
            ++counts[sample[t]];
        for (const auto& [rank, n] : counts) {
            const double freq = static_cast<double>(n) / static_cast<double>(std::max<std::size_t>(1, s.sample_ranks.size()));
            svg.circle(cx, y(rank), 0.45 * step * std::sqrt(freq), colour(t), 0.7);
        }
        const double ry = y(s.reference_ranks[t]);
        svg.line(cx - 5, ry - 5, cx + 5, ry + 5, "black", 1.5);
        svg.line(cx - 5, ry + 5, cx + 5, ry - 5, "black", 1.5);
    }
    return svg.str();
}

std::string line_plot_svg(const SchemeComparison& c)
{
    const std::size_t nt = c.teams.size();
    const std::size_t ns = c.schemes.size();
    const double left = 60, top = 50, xstep = 170, ystep = 40;
    const double width = left + xstep * static_cast<double>(ns) + 120;
    const double height = top + ystep * static_cast<double>(nt) + 60;
    Svg svg(width, height);
    const auto x = [&](std::size_t s) { return left + xstep * (static_cast<double>(s) + 0.5); };
    const auto y = [&](int rank) { return top + ystep * (rank - 0.5); };

    svg.text(width / 2, 20, "Ranking by scheme", "middle", 13);
    for (std::size_t r = 1; r <= nt; ++r)
        svg.text(left - 10, y(static_cast<int>(r)) + 4, std::to_string(r), "end", 10);
    for (std::size_t s = 0; s < ns; ++s) {
        svg.line(x(s), top, x(s), top + ystep * static_cast<double>(nt), "#cccccc");
        svg.text(x(s), height - 20, c.schemes[s], "middle", 10);
    }
    for (std::size_t t = 0; t < nt; ++t) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t s = 0; s < ns; ++s)
            pts.emplace_back(x(s), y(c.final_ranks[s][t]));
        svg.polyline(pts, colour(t));
        for (const auto& [px, py] : pts)
            svg.circle(px, py, 4, colour(t));
        if (ns > 0)
            svg.text(x(ns - 1) + 12, y(c.final_ranks[ns - 1][t]) + 4, c.teams[t], "start", 10);
    }
    return svg.str();
}

} // namespace chaleval
