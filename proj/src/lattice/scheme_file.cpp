#include "latsym/lattice/scheme_file.hpp"

#include <fstream>
#include <json.hpp>
#include <regex>

namespace latsym::lattice {

using nlohmann::json;

namespace {

GridRef parse_ref(const std::string& text) {
    static const std::regex ref(R"(\s*[xtyu]\s*(\[\s*-?\d+\s*,\s*-?\d+\s*\])?\s*)");
    if (!std::regex_match(text, ref)) {
        throw SchemeFileError("solve_for entry '" + text + "' is not a single grid reference");
    }
    return Expression::parse(text).refs()[0];
}

Expression parse_field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_string()) throw SchemeFileError(where + ": missing string '" + key + "'");
    try {
        return Expression::parse(j[key].get<std::string>());
    } catch (const dsl::ParseError& e) {
        throw SchemeFileError(where + "." + key + ": " + e.what());
    }
}

}  // namespace

SchemeFile read_scheme(std::istream& is) {
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw SchemeFileError(std::string("scheme file is not valid JSON: ") + e.what());
    }
    try {
        const auto name = j.at("name").get<std::string>();
        const auto& st = j.at("stencil");
        StencilBounds b{st.at("i1").get<int>(), st.at("i2").get<int>(), st.at("j1").get<int>(), st.at("j2").get<int>()};
        const auto& rs = j.at("residuals");
        if (!rs.is_array() || rs.size() != kResidualCount) throw SchemeFileError("'residuals' must list exactly five expressions");
        std::array<Expression, kResidualCount> residuals;
        for (std::size_t a = 0; a < kResidualCount; ++a) {
            try {
                residuals[a] = Expression::parse(rs[a].get<std::string>());
            } catch (const dsl::ParseError& e) {
                throw SchemeFileError("residual E" + std::to_string(a + 1) + ": " + e.what());
            }
        }
        std::map<std::string, double> params;
        if (j.contains("params")) {
            for (const auto& [k, v] : j["params"].items()) params[k] = v.get<double>();
        }
        std::array<GridRef, kResidualCount> solve_for = default_solve_for(b);
        if (j.contains("solve_for")) {
            const auto& sf = j["solve_for"];
            if (!sf.is_array() || sf.size() != kResidualCount) throw SchemeFileError("'solve_for' must list five references");
            for (std::size_t a = 0; a < kResidualCount; ++a) solve_for[a] = parse_ref(sf[a].get<std::string>());
        }
        const bool light_cone = j.value("light_cone", false);
        std::optional<SeedRecipe> seed;
        if (j.contains("seed")) {
            const auto& sd = j["seed"];
            seed = SeedRecipe{sd.value("rows", 1), sd.value("columns", 0), parse_field(sd, "x", "seed"),
                              parse_field(sd, "t", "seed"), parse_field(sd, "u", "seed")};
        }
        SchemeFile out{Scheme(name, b, residuals, params, solve_for, light_cone, seed), std::nullopt};
        if (j.contains("window")) {
            const auto& w = j["window"];
            IndexWindow win{w.at("m").at(0).get<int>(), w.at("m").at(1).get<int>(), w.at("n").at(0).get<int>(),
                            w.at("n").at(1).get<int>()};
            if (win.m_hi < win.m_lo || win.n_hi < win.n_lo) throw SchemeFileError("'window' ranges must be increasing");
            out.window = win;
        }
        return out;
    } catch (const json::exception& e) {
        throw SchemeFileError(std::string("malformed scheme file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw SchemeFileError(e.what());
    }
}

SchemeFile read_scheme_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SchemeFileError("cannot open scheme file '" + path + "'");
    return read_scheme(f);
}

void write_scheme(std::ostream& os, const Scheme& s, const std::optional<IndexWindow>& window) {
    json j;
    j["name"] = s.name();
    j["stencil"] = {{"i1", s.bounds().i1}, {"i2", s.bounds().i2}, {"j1", s.bounds().j1}, {"j2", s.bounds().j2}};
    j["residuals"] = json::array();
    for (const auto& r : s.residuals()) j["residuals"].push_back(r.to_string());
    j["params"] = json::object();
    for (const auto& [k, v] : s.params()) j["params"][k] = v;
    j["solve_for"] = json::array();
    for (const auto& r : s.solve_for()) j["solve_for"].push_back(dsl::to_string(r));
    j["light_cone"] = s.light_cone();
    if (s.seed()) {
        const auto& sd = *s.seed();
        j["seed"] = {{"rows", sd.rows}, {"columns", sd.columns}, {"x", sd.x.to_string()}, {"t", sd.t.to_string()},
                     {"u", sd.u.to_string()}};
    }
    if (window) j["window"] = {{"m", {window->m_lo, window->m_hi}}, {"n", {window->n_lo, window->n_hi}}};
    os << j.dump(2) << "\n";
}

}  // namespace latsym::lattice
