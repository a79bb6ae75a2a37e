#include "srl/model_file.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "srl/errors.hpp"

namespace srl {

namespace {

std::string_view trim(std::string_view s, std::size_t& offset) {
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    std::size_t e = s.size();
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    offset += b;
    return s.substr(b, e - b);
}

template <class T>
T parse_integer(std::string_view text, std::size_t line, std::size_t column, const char* what) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError(std::string("expected a non-negative integer for ") + what, line, column);
    }
    return value;
}

double parse_double(std::string_view text, std::size_t line, std::size_t column, const char* what) {
    try {
        std::size_t used = 0;
        const std::string s(text);
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("expected a number for ") + what, line, column);
    }
}

std::string shortest(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

ModelFile parse_model_file(std::string_view text) {
    ModelFile model;
    enum class Section { top, generators, chart, simulation } section = Section::top;
    std::set<std::string> seen;
    std::optional<std::vector<Polynomial>> theta;
    std::optional<std::vector<Polynomial>> inverse;
    std::size_t theta_line = 0;
    struct Pending {
        std::string key;
        std::string value;
        std::size_t line;
        std::size_t column;
    };
    std::optional<Pending> base_point;
    std::optional<Pending> drift;

    auto require_dim = [&](std::size_t line, std::size_t column) {
        if (model.dim == 0) throw ParseError("dim must be set before this statement", line, column);
        if (model.variables.empty()) model.variables = default_names(model.dim);
    };

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        std::size_t col = 0;
        const std::string_view line = trim(raw, col);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("unterminated section header", line_no, col + 1);
            const std::string_view name = line.substr(1, line.size() - 2);
            if (name == "generators") {
                section = Section::generators;
            } else if (name == "chart") {
                section = Section::chart;
            } else if (name == "simulation") {
                section = Section::simulation;
            } else {
                throw ParseError("unknown section [" + std::string(name) + "]", line_no, col + 1);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected `key = value`", line_no, col + 1);
        std::size_t kcol = col;
        const std::string key(trim(line.substr(0, eq), kcol));
        std::size_t vcol = col + eq + 1;
        const std::string_view value = trim(line.substr(eq + 1), vcol);
        if (key.empty()) throw ParseError("missing key", line_no, col + 1);
        if (value.empty()) throw ParseError("missing value for " + key, line_no, vcol + 1);
        const std::string scoped = std::to_string(static_cast<int>(section)) + ":" + key;
        if (!seen.insert(scoped).second) throw ParseError("duplicate key " + key, line_no, kcol + 1);

        switch (section) {
        case Section::top:
            if (key == "name") {
                model.name = std::string(value);
            } else if (key == "dim") {
                model.dim = parse_integer<std::size_t>(value, line_no, vcol + 1, "dim");
                if (model.dim == 0) throw ParseError("dim must be positive", line_no, vcol + 1);
            } else if (key == "variables") {
                if (model.dim == 0) throw ParseError("dim must be set before variables", line_no, kcol + 1);
                VariableNames names;
                std::size_t start = 0;
                while (start <= value.size()) {
                    const std::size_t comma = value.find(',', start);
                    std::size_t c = vcol + start;
                    const auto item = trim(value.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                                 : comma - start),
                                           c);
                    if (item.empty()) throw ParseError("empty variable name", line_no, c + 1);
                    names.emplace_back(item);
                    if (comma == std::string_view::npos) break;
                    start = comma + 1;
                }
                if (names.size() != model.dim) {
                    throw ParseError("expected " + std::to_string(model.dim) + " variable names", line_no, vcol + 1);
                }
                model.variables = std::move(names);
            } else if (key == "base_point") {
                base_point = Pending{key, std::string(value), line_no, vcol};
            } else if (key == "drift") {
                drift = Pending{key, std::string(value), line_no, vcol};
            } else if (key == "max_depth") {
                model.max_depth = parse_integer<std::size_t>(value, line_no, vcol + 1, "max_depth");
                if (model.max_depth == 0) throw ParseError("max_depth must be positive", line_no, vcol + 1);
            } else {
                throw ParseError("unknown key " + key, line_no, kcol + 1);
            }
            break;
        case Section::generators:
            require_dim(line_no, kcol + 1);
            model.generator_names.push_back(key);
            model.generators.push_back(parse_field(value, model.dim, model.variables, line_no, vcol));
            break;
        case Section::chart:
            require_dim(line_no, kcol + 1);
            if (key == "theta") {
                theta = parse_polynomial_list(value, model.dim, model.variables, line_no, vcol);
                theta_line = line_no;
                if (theta->size() != model.dim) throw ParseError("theta needs dim components", line_no, vcol + 1);
            } else if (key == "inverse") {
                inverse = parse_polynomial_list(value, model.dim, model.variables, line_no, vcol);
                if (inverse->size() != model.dim) throw ParseError("inverse needs dim components", line_no, vcol + 1);
            } else {
                throw ParseError("unknown chart key " + key, line_no, kcol + 1);
            }
            break;
        case Section::simulation:
            if (key == "eps") {
                model.simulation.eps = parse_double(value, line_no, vcol + 1, "eps");
            } else if (key == "paths") {
                model.simulation.paths = parse_integer<std::size_t>(value, line_no, vcol + 1, "paths");
            } else if (key == "steps") {
                model.simulation.steps = parse_integer<std::size_t>(value, line_no, vcol + 1, "steps");
            } else if (key == "seed") {
                model.simulation.seed = parse_integer<std::uint64_t>(value, line_no, vcol + 1, "seed");
            } else if (key == "radius") {
                model.simulation.radius = parse_double(value, line_no, vcol + 1, "radius");
            } else {
                throw ParseError("unknown simulation key " + key, line_no, kcol + 1);
            }
            break;
        }
    }

    if (model.dim == 0) throw ParseError("missing dim", line_no, 1);
    if (model.variables.empty()) model.variables = default_names(model.dim);
    if (model.generators.empty()) throw ParseError("no generators given", line_no, 1);
    if (base_point) {
        std::string_view v = base_point->value;
        if (v.size() < 2 || v.front() != '(' || v.back() != ')') {
            throw ParseError("base_point must be a parenthesised list", base_point->line, base_point->column + 1);
        }
        std::size_t start = 1;
        while (start < v.size()) {
            const std::size_t comma = std::min(v.find(',', start), v.size() - 1);
            std::size_t c = base_point->column + start;
            const auto item = trim(v.substr(start, comma - start), c);
            try {
                model.base_point.push_back(parse_rational(item));
            } catch (const Error&) {
                throw ParseError("expected a rational number", base_point->line, c + 1);
            }
            start = comma + 1;
        }
        if (model.base_point.size() != model.dim) {
            throw ParseError("base_point needs " + std::to_string(model.dim) + " coordinates", base_point->line,
                             base_point->column + 1);
        }
    } else {
        model.base_point.assign(model.dim, Rational(0));
    }
    if (drift) model.drift = parse_field(drift->value, model.dim, model.variables, drift->line, drift->column);
    if (theta.has_value() != inverse.has_value()) {
        throw ParseError("[chart] needs both theta and inverse", theta ? theta_line : line_no, 1);
    }
    if (theta) model.chart = PolyMap(std::move(*theta), std::move(*inverse));
    return model;
}

ModelFile load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_file(buf.str());
}

std::string to_text(const ModelFile& m) {
    std::ostringstream out;
    if (!m.name.empty()) out << "name = " << m.name << '\n';
    out << "dim = " << m.dim << '\n';
    out << "variables = ";
    for (std::size_t k = 0; k < m.variables.size(); ++k) out << (k ? ", " : "") << m.variables[k];
    out << '\n';
    out << "base_point = (";
    for (std::size_t k = 0; k < m.base_point.size(); ++k) out << (k ? ", " : "") << to_string(m.base_point[k]);
    out << ")\n";
    if (m.drift) out << "drift = " << to_string(*m.drift, m.variables) << '\n';
    out << "max_depth = " << m.max_depth << '\n';
    out << "\n[generators]\n";
    for (std::size_t i = 0; i < m.generators.size(); ++i) {
        const std::string label = i < m.generator_names.size() ? m.generator_names[i] : "X" + std::to_string(i + 1);
        out << label << " = " << to_string(m.generators[i], m.variables) << '\n';
    }
    if (m.chart) {
        out << "\n[chart]\n";
        out << "theta = " << to_string(PolyVectorField(m.chart->components()), m.variables) << '\n';
        out << "inverse = " << to_string(PolyVectorField(m.chart->inverse()), m.variables) << '\n';
    }
    const auto& s = m.simulation;
    if (s.eps || s.paths || s.steps || s.seed || s.radius) {
        out << "\n[simulation]\n";
        if (s.eps) out << "eps = " << shortest(*s.eps) << '\n';
        if (s.paths) out << "paths = " << *s.paths << '\n';
        if (s.steps) out << "steps = " << *s.steps << '\n';
        if (s.seed) out << "seed = " << *s.seed << '\n';
        if (s.radius) out << "radius = " << shortest(*s.radius) << '\n';
    }
    return out.str();
}

}  // namespace srl
