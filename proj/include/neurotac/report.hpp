#pragma once

// Report files: confusion matrix CSV (class names along the first row and
// column), one-line accuracy summary, and the rendered forms (aligned text
// table, SVG heatmap).

#include "neurotac/classify.hpp"
#include "neurotac/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace neurotac {

struct ConfusionTable {
    std::vector<std::string> classes;
    ConfusionMatrix counts;  // rows: true class, columns: predicted
};

inline std::string confusion_csv(const ConfusionTable& t) {
    std::ostringstream out;
    out << "true\\predicted";
    for (const auto& c : t.classes) out << ',' << c;
    out << '\n';
    for (std::size_t i = 0; i < t.classes.size(); ++i) {
        out << t.classes[i];
        for (long v : t.counts[i]) out << ',' << v;
        out << '\n';
    }
    return out.str();
}

inline std::string confusion_csv(const ClassificationReport& r) { return confusion_csv(ConfusionTable{r.classes, r.confusion}); }

// Accuracy and dispersion in percent.
inline std::string summary_csv(const ClassificationReport& r) {
    char line[64];
    std::snprintf(line, sizeof line, "%.4f,%.4f\n", r.accuracy_percent(), r.dispersion);
    return std::string("accuracy,stddev\n") + line;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace detail

// Empty input is a usage error; anything else that does not parse is a format error.
inline ConfusionTable parse_confusion_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw ParameterError("report is empty");
    const auto header = detail::split_csv_line(lines[0]);
    if (header.size() < 2) throw ParameterError("report has no classes");
    ConfusionTable t;
    t.classes.assign(header.begin() + 1, header.end());
    const std::size_t c = t.classes.size();
    if (lines.size() != c + 1) throw FormatError("report has " + std::to_string(lines.size() - 1) + " rows for " +
                                                 std::to_string(c) + " classes");
    for (std::size_t i = 0; i < c; ++i) {
        const auto cells = detail::split_csv_line(lines[i + 1]);
        if (cells.size() != c + 1) throw FormatError("report row " + std::to_string(i + 1) + " has the wrong width");
        if (cells[0] != t.classes[i]) throw FormatError("report row " + std::to_string(i + 1) + " is out of order");
        std::vector<long> row;
        for (std::size_t j = 1; j <= c; ++j) {
            std::size_t used = 0;
            long v = -1;
            try {
                v = std::stol(cells[j], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != cells[j].size() || v < 0) {
                throw FormatError("report row " + std::to_string(i + 1) + ": bad count '" + cells[j] + "'");
            }
            row.push_back(v);
        }
        t.counts.push_back(std::move(row));
    }
    return t;
}

inline std::string confusion_text(const ConfusionTable& t) {
    std::size_t width = std::string("true\\predicted").size();
    for (const auto& c : t.classes) width = std::max(width, c.size());
    for (const auto& row : t.counts) {
        for (long v : row) width = std::max(width, std::to_string(v).size());
    }
    const auto pad = [&](const std::string& s, bool right) {
        const std::string fill(width - s.size(), ' ');
        return right ? fill + s : s + fill;
    };
    std::ostringstream out;
    out << pad("true\\predicted", false);
    for (const auto& c : t.classes) out << "  " << pad(c, true);
    out << '\n';
    for (std::size_t i = 0; i < t.classes.size(); ++i) {
        out << pad(t.classes[i], false);
        for (long v : t.counts[i]) out << "  " << pad(std::to_string(v), true);
        out << '\n';
    }
    return out.str();
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace detail

// One <rect class="cell"> per matrix entry, shaded by its share of the row.
inline std::string confusion_svg(const ConfusionTable& t) {
    const int c = static_cast<int>(t.classes.size());
    const int cell = 40, margin = 110;
    const int size = margin + c * cell + 10;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int j = 0; j < c; ++j) {
        out << "<text x=\"" << margin + j * cell + cell / 2 << "\" y=\"" << margin - 6 << "\" transform=\"rotate(-60 "
            << margin + j * cell + cell / 2 << ' ' << margin - 6 << ")\">" << detail::xml_escape(t.classes[static_cast<std::size_t>(j)])
            << "</text>\n";
    }
    for (int i = 0; i < c; ++i) {
        const auto& row = t.counts[static_cast<std::size_t>(i)];
        long total = 0;
        for (long v : row) total += v;
        out << "<text x=\"" << margin - 6 << "\" y=\"" << margin + i * cell + cell / 2 + 4
            << "\" text-anchor=\"end\">" << detail::xml_escape(t.classes[static_cast<std::size_t>(i)]) << "</text>\n";
        for (int j = 0; j < c; ++j) {
            const long v = row[static_cast<std::size_t>(j)];
            const double share = total > 0 ? static_cast<double>(v) / static_cast<double>(total) : 0.0;
            const int shade = static_cast<int>(std::lround(255.0 * (1.0 - share)));
            out << "<rect class=\"cell\" x=\"" << margin + j * cell << "\" y=\"" << margin + i * cell << "\" width=\""
                << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\"#888\"/>\n";
            out << "<text x=\"" << margin + j * cell + cell / 2 << "\" y=\"" << margin + i * cell + cell / 2 + 4
                << "\" text-anchor=\"middle\">" << v << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace neurotac
