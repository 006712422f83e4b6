#include "chebrb/csv_io.hpp"

#include "chebrb/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace chebrb {

namespace {

std::string_view trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double to_double(std::string_view s, std::size_t row) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) {
        throw FormatError("line " + std::to_string(row) + ": '" + std::string(s) + "' is not a number");
    }
    return v;
}

// Non-blank lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> lines_of(std::istream& in) {
    std::vector<std::pair<std::size_t, std::string>> out;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        if (!trim(line).empty()) out.emplace_back(no, line);
    }
    return out;
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open " + path.string());
    return f;
}

}  // namespace

QuoteSet read_quotes(std::istream& in) {
    const auto lines = lines_of(in);
    if (lines.empty()) throw FormatError("quotes CSV is empty");
    static const std::vector<std::string_view> header = {"spot", "strike", "maturity_days",
                                                         "rate_annual", "price"};
    if (split_fields(lines[0].second) != header) {
        throw FormatError("quotes CSV header must be spot,strike,maturity_days,rate_annual,price");
    }
    if (lines.size() == 1) throw FormatError("quotes CSV has no rows");
    QuoteSet out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [row, text] = lines[i];
        const auto f = split_fields(text);
        if (f.size() != 5) {
            throw FormatError("line " + std::to_string(row) + ": expected 5 fields, got " +
                              std::to_string(f.size()));
        }
        Quote q{to_double(f[0], row), to_double(f[1], row), to_double(f[2], row),
                to_double(f[3], row), to_double(f[4], row)};
        try {
            validate(QuoteSet{q});
        } catch (const DomainError&) {
            throw FormatError("line " + std::to_string(row) + ": invalid quote values");
        }
        out.push_back(q);
    }
    return out;
}

QuoteSet read_quotes(const std::filesystem::path& path) {
    auto f = open(path);
    return read_quotes(f);
}

void write_quotes(std::ostream& out, const QuoteSet& quotes) {
    out << "spot,strike,maturity_days,rate_annual,price\n";
    out.precision(17);
    for (const auto& q : quotes) {
        out << q.spot << ',' << q.strike << ',' << q.maturity_days << ',' << q.rate_annual << ','
            << q.price << '\n';
    }
}

EvalGrid read_grid(std::istream& in) {
    const auto lines = lines_of(in);
    if (lines.size() < 2) throw FormatError("grid CSV needs a header and at least one row");
    const auto head = split_fields(lines[0].second);
    if (!head.empty() && head[0] == "dim") {
        ProductGrid g;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const auto [row, text] = lines[i];
            const auto f = split_fields(text);
            if (f.size() < 2) throw FormatError("line " + std::to_string(row) + ": dimension without values");
            const double d = to_double(f[0], row);
            if (d != static_cast<double>(i - 1)) {
                throw FormatError("line " + std::to_string(row) + ": dimensions must be listed as 0,1,2,..");
            }
            std::vector<double> axis;
            for (std::size_t k = 1; k < f.size(); ++k) axis.push_back(to_double(f[k], row));
            g.axes.push_back(std::move(axis));
        }
        return g;
    }
    PointSet ps;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [row, text] = lines[i];
        const auto f = split_fields(text);
        if (f.size() != head.size()) {
            throw FormatError("line " + std::to_string(row) + ": expected " + std::to_string(head.size()) +
                              " fields, got " + std::to_string(f.size()));
        }
        std::vector<double> p;
        for (auto s : f) p.push_back(to_double(s, row));
        ps.points.push_back(std::move(p));
    }
    return ps;
}

EvalGrid read_grid(const std::filesystem::path& path) {
    auto f = open(path);
    return read_grid(f);
}

void write_product_grid(std::ostream& out, const ProductGrid& grid) {
    out << "dim,values\n";
    out.precision(17);
    for (std::size_t j = 0; j < grid.dims(); ++j) {
        out << j;
        for (double v : grid.axes[j]) out << ',' << v;
        out << '\n';
    }
}

std::size_t grid_dims(const EvalGrid& g) {
    if (const auto* p = std::get_if<ProductGrid>(&g)) return p->dims();
    const auto& ps = std::get<PointSet>(g);
    return ps.points.empty() ? 0 : ps.points.front().size();
}

std::size_t grid_points(const EvalGrid& g) {
    if (const auto* p = std::get_if<ProductGrid>(&g)) return p->size();
    return std::get<PointSet>(g).points.size();
}

void write_values(std::ostream& out, const EvalGrid& grid, std::span<const double> values) {
    const std::size_t n = grid_dims(grid);
    if (values.size() != grid_points(grid)) throw DimensionError("write_values: value count mismatch");
    for (std::size_t j = 0; j < n; ++j) out << 'x' << j << ',';
    out << "value\n";
    out.precision(17);
    if (const auto* ps = std::get_if<PointSet>(&grid)) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            for (double v : ps->points[i]) out << v << ',';
            out << values[i] << '\n';
        }
        return;
    }
    const auto& g = std::get<ProductGrid>(grid);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j) out << g.axes[j][idx[j]] << ',';
        out << values[i] << '\n';
        for (std::size_t j = n; j-- > 0;) {
            if (++idx[j] < g.axes[j].size()) break;
            idx[j] = 0;
        }
    }
}

}  // namespace chebrb
