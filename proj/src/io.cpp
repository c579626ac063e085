#include "twinsurf/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace twinsurf::io {

namespace {

void append_number(std::string& out, double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

std::vector<double> distinct_sorted(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

/// Smallest gap between distinct values, ignoring gaps that are rounding noise.
double min_gap(const std::vector<double>& v)
{
    const double span = v.back() - v.front();
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < v.size(); ++k) {
        const double d = v[k] - v[k - 1];
        if (d > 1e-9 * span) gap = std::min(gap, d);
    }
    return gap;
}

} // namespace

std::string to_csv(const std::vector<ScalarField>& fields, std::vector<std::string> names)
{
    if (fields.empty()) throw Error(ErrorKind::kDomain, "no fields to serialize");
    for (const auto& f : fields) {
        if (!same_grid(f.grid_ptr(), fields.front().grid_ptr())) throw Error(ErrorKind::kGridMismatch, "CSV fields must share a grid");
    }
    if (names.empty()) {
        if (fields.size() == 1) {
            names = {"v"};
        } else {
            for (std::size_t k = 0; k < fields.size(); ++k) names.push_back("v" + std::to_string(k + 1));
        }
    }
    if (names.size() != fields.size()) throw Error(ErrorKind::kDomain, "column names do not match fields");
    std::string out = "x,y";
    for (const auto& n : names) out += "," + n;
    out += "\n";
    const Grid2D& g = fields.front().grid();
    fields.front().for_each_node([&](int i, int j) {
        append_number(out, g.x(i));
        out += ",";
        append_number(out, g.y(j));
        for (const auto& f : fields) {
            out += ",";
            append_number(out, f(i, j));
        }
        out += "\n";
    });
    return out;
}

void write_csv(const std::string& path, const std::vector<ScalarField>& fields, std::vector<std::string> names)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::kParse, "cannot open '" + path + "' for writing");
    os << to_csv(fields, std::move(names));
}

CsvTable parse_csv(std::istream& in, std::optional<std::pair<double, double>> anchor)
{
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::kParse, "empty CSV");
    CsvTable t;
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) {
            if (!col.empty() && col.back() == '\r') col.pop_back();
            t.columns.push_back(col);
        }
    }
    if (t.columns.size() < 3 || t.columns[0] != "x" || t.columns[1] != "y") {
        throw Error(ErrorKind::kParse, "CSV header must start with x,y and name at least one value column");
    }
    const std::size_t ncol = t.columns.size();
    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw Error(ErrorKind::kParse, "bad number '" + cell + "' on line " + std::to_string(lineno));
            }
        }
        if (row.size() != ncol) throw Error(ErrorKind::kParse, "wrong column count on line " + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorKind::kParse, "CSV has no data rows");

    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        xs.push_back(r[0]);
        ys.push_back(r[1]);
    }
    xs = distinct_sorted(xs);
    ys = distinct_sorted(ys);
    if (xs.size() < 3 || ys.size() < 3) throw Error(ErrorKind::kParse, "CSV points do not span a 3x3 grid");
    const double hx = min_gap(xs), hy = min_gap(ys);
    const int nx = static_cast<int>(std::lround((xs.back() - xs.front()) / hx)) + 1;
    const int ny = static_cast<int>(std::lround((ys.back() - ys.front()) / hy)) + 1;
    const double x0 = xs.front(), y0 = ys.front();
    const double hxf = (xs.back() - x0) / (nx - 1), hyf = (ys.back() - y0) / (ny - 1);

    Mask mask = Mask::Constant(nx, ny, false);
    std::vector<Eigen::ArrayXXd> vals(ncol - 2, Eigen::ArrayXXd::Zero(nx, ny));
    for (const auto& r : rows) {
        const double fi = (r[0] - x0) / hxf, fj = (r[1] - y0) / hyf;
        const long i = std::lround(fi), j = std::lround(fj);
        if (std::abs(fi - i) > 1e-6 || std::abs(fj - j) > 1e-6) {
            throw Error(ErrorKind::kParse, "CSV point is not on a uniform grid");
        }
        if (mask(i, j)) throw Error(ErrorKind::kParse, "duplicate CSV point");
        mask(i, j) = true;
        for (std::size_t c = 2; c < ncol; ++c) vals[c - 2](i, j) = r[c];
    }

    const double ax = anchor ? anchor->first : 0.5 * (x0 + xs.back());
    const double ay = anchor ? anchor->second : 0.5 * (y0 + ys.back());
    NodeIndex seed{-1, -1};
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!mask(i, j)) continue;
            const double d = std::hypot(x0 + hxf * i - ax, y0 + hyf * j - ay);
            if (d < best) {
                best = d;
                seed = {i, j};
            }
        }
    }
    t.grid = std::make_shared<const Grid2D>(nx, ny, x0, y0, hxf, hyf, std::move(mask), seed);
    for (auto& v : vals) t.fields.emplace_back(t.grid, std::move(v));
    return t;
}

CsvTable read_csv(const std::string& path, std::optional<std::pair<double, double>> anchor)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::kParse, "cannot open '" + path + "'");
    return parse_csv(is, anchor);
}

nlohmann::json to_json(const ResidualReport& r)
{
    return {{"max_abs", r.max_abs}, {"mean_abs", r.mean_abs}, {"l2", r.l2}, {"h", r.h}, {"node_count", r.node_count}};
}

ResidualReport report_from_json(const nlohmann::json& j)
{
    ResidualReport r;
    r.max_abs = j.at("max_abs").get<double>();
    r.mean_abs = j.at("mean_abs").get<double>();
    r.l2 = j.at("l2").get<double>();
    r.h = j.at("h").get<double>();
    r.node_count = j.at("node_count").get<int>();
    return r;
}

std::string weierstrass_csv(const WeierstrassData& w)
{
    std::string out = "xi1,xi2";
    for (std::size_t k = 0; k < w.re.size(); ++k) {
        out += ",re_phi" + std::to_string(k + 1) + ",im_phi" + std::to_string(k + 1);
    }
    out += "\n";
    const Grid2D& g = *w.grid;
    w.re.front().for_each_node([&](int i, int j) {
        append_number(out, g.x(i));
        out += ",";
        append_number(out, g.y(j));
        for (std::size_t k = 0; k < w.re.size(); ++k) {
            out += ",";
            append_number(out, w.re[k](i, j));
            out += ",";
            append_number(out, w.im[k](i, j));
        }
        out += "\n";
    });
    return out;
}

} // namespace twinsurf::io
