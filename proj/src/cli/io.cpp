#include "latsym/cli/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "latsym/symmetry/field.hpp"

namespace latsym::cli {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
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

std::string unescape(std::string s) {
    const std::pair<const char*, const char*> map[] = {{"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&amp;", "&"}};
    for (const auto& [from, to] : map) {
        for (auto p = s.find(from); p != std::string::npos; p = s.find(from, p + 1)) s.replace(p, std::strlen(from), to);
    }
    return s;
}

}  // namespace

std::vector<NamedField> read_fields(std::istream& is) {
    std::vector<NamedField> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        NamedField f;
        const auto colon = line.find(':');
        if (colon != std::string::npos) {
            f.name = trim(line.substr(0, colon));
            f.text = trim(line.substr(colon + 1));
        } else {
            f.text = line;
        }
        if (f.name.empty()) f.name = "X" + std::to_string(out.size() + 1);
        try {
            symmetry::split_field_text(f.text);
        } catch (const std::exception& e) {
            throw std::invalid_argument("field file line " + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(f);
    }
    if (out.empty()) throw std::invalid_argument("field file contains no fields");
    return out;
}

std::vector<NamedField> read_field_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open field file '" + path + "'");
    return read_fields(f);
}

void write_fields(std::ostream& os, const std::vector<NamedField>& fields) {
    for (const auto& f : fields) os << f.name << ": " << f.text << "\n";
}

void write_svg(std::ostream& os, const std::vector<SvgSeries>& series, const std::string& title) {
    const double W = 640, H = 480, L = 60, R = 20, T = 30, B = 50;
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, tlo = xlo, thi = -xlo;
    for (const auto& s : series) {
        const auto& w = s.grid.window();
        for (int n = w.n_lo; n <= w.n_hi; ++n) {
            for (int m = w.m_lo; m <= w.m_hi; ++m) {
                const auto& p = s.grid.at(m, n);
                xlo = std::min(xlo, p[0]);
                xhi = std::max(xhi, p[0]);
                tlo = std::min(tlo, p[1]);
                thi = std::max(thi, p[1]);
            }
        }
    }
    if (!std::isfinite(xlo)) xlo = xhi = tlo = thi = 0.0;
    if (xhi == xlo) { xlo -= 1; xhi += 1; }
    if (thi == tlo) { tlo -= 1; thi += 1; }
    auto sx = [&](double x) { return L + (x - xlo) / (xhi - xlo) * (W - L - R); };
    auto st = [&](double t) { return H - B - (t - tlo) / (thi - tlo) * (H - T - B); };
    static const char* colors[] = {"#1f4e9c", "#c0392b", "#1e8449", "#7d3c98"};

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << " " << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) os << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
    os << "<g stroke=\"black\" stroke-width=\"1\">\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << L << "\" y2=\"" << T << "\"/>\n";
    os << "</g>\n<g font-size=\"11\" font-family=\"sans-serif\">\n";
    os << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << num(xlo) << "</text>\n";
    os << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\">" << num(xhi) << "</text>\n";
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">x</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" text-anchor=\"end\">" << num(tlo) << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << T + 4 << "\" text-anchor=\"end\">" << num(thi) << "</text>\n";
    os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\">t</text>\n";
    os << "</g>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = colors[k % std::size(colors)];
        os << "<g fill=\"" << color << "\" data-series=\"" << escape(s.name) << "\">\n";
        const auto& w = s.grid.window();
        for (int n = w.n_lo; n <= w.n_hi; ++n) {
            for (int m = w.m_lo; m <= w.m_hi; ++m) {
                const auto& p = s.grid.at(m, n);
                os << "<circle cx=\"" << px(sx(p[0])) << "\" cy=\"" << px(st(p[1])) << "\" r=\"2.5\" data-series=\""
                   << escape(s.name) << "\" data-m=\"" << m << "\" data-n=\"" << n << "\" data-x=\"" << num(p[0])
                   << "\" data-t=\"" << num(p[1]) << "\"/>\n";
            }
        }
        os << "</g>\n";
    }
    if (series.size() > 1) {
        for (std::size_t k = 0; k < series.size(); ++k) {
            const double y = T + 14.0 * static_cast<double>(k);
            os << "<text x=\"" << W - R << "\" y=\"" << y << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
               << colors[k % std::size(colors)] << "\">" << escape(series[k].name) << "</text>\n";
        }
    }
    os << "</svg>\n";
}

std::vector<SvgPoint> read_svg(std::istream& is) {
    const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (text.find("<svg") == std::string::npos) throw std::invalid_argument("not an SVG document");
    static const std::regex circle(
        R"re(<circle\b[^>]*\bdata-series="([^"]*)"\s+data-m="(-?\d+)"\s+data-n="(-?\d+)"\s+data-x="([^"]+)"\s+data-t="([^"]+)")re");
    std::vector<SvgPoint> out;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), circle); it != std::sregex_iterator(); ++it) {
        const auto& mt = *it;
        SvgPoint p;
        p.series = unescape(mt[1].str());
        p.m = std::stoi(mt[2].str());
        p.n = std::stoi(mt[3].str());
        p.x = std::stod(mt[4].str());
        p.t = std::stod(mt[5].str());
        out.push_back(p);
    }
    return out;
}

}  // namespace latsym::cli
