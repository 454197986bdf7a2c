#include "spassoc/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "spassoc/errors.hpp"

namespace spassoc {

namespace {

[[noreturn]] void fail_at(const std::string& path, std::size_t line, const std::string& what) {
    throw input_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string_view trimmed(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view cell, double& out) {
    cell = trimmed(cell);
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            cells.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return cells;
}

std::ifstream open_or_throw(const std::string& path, std::ios_base::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) throw input_error("cannot open " + path);
    return in;
}

bool header_matches(std::string_view line, const std::vector<std::string_view>& names) {
    const auto cells = split_csv(line);
    if (cells.size() != names.size()) return false;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        std::string got(trimmed(cells[i]));
        std::transform(got.begin(), got.end(), got.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        if (got != names[i]) return false;
    }
    return true;
}

/// Strips one trailing CR (files saved with CRLF endings).
void chomp(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

Grid parse_matrix_text(std::istream& in, const std::string& path) {
    Grid grid;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        chomp(line);
        const std::string_view body = trimmed(line);
        if (body.empty() || body.front() == '#') continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos < body.size()) {
            while (pos < body.size() && std::isspace(static_cast<unsigned char>(body[pos]))) ++pos;
            if (pos >= body.size()) break;
            std::size_t end = pos;
            while (end < body.size() && !std::isspace(static_cast<unsigned char>(body[end]))) ++end;
            double value = 0.0;
            if (!parse_double(body.substr(pos, end - pos), value)) {
                fail_at(path, lineno,
                        "invalid number '" + std::string(body.substr(pos, end - pos)) + "'");
            }
            row.push_back(value);
            pos = end;
        }
        if (grid.nrow == 0) {
            grid.ncol = row.size();
        } else if (row.size() != grid.ncol) {
            fail_at(path, lineno,
                    "ragged row: expected " + std::to_string(grid.ncol) + " values, got " +
                        std::to_string(row.size()));
        }
        grid.values.insert(grid.values.end(), row.begin(), row.end());
        ++grid.nrow;
    }
    if (grid.nrow == 0) throw input_error(path + ": empty matrix");
    return grid;
}

int next_pgm_token(std::istream& in, const std::string& path) {
    // Header tokens are whitespace-separated integers; '#' starts a comment.
    for (;;) {
        const int ch = in.peek();
        if (ch == EOF) throw input_error(path + ": truncated PGM header");
        if (std::isspace(static_cast<unsigned char>(ch))) {
            in.get();
            continue;
        }
        if (ch == '#') {
            std::string comment;
            std::getline(in, comment);
            continue;
        }
        int value = 0;
        if (!(in >> value)) throw input_error(path + ": malformed PGM header");
        return value;
    }
}

Grid parse_pgm(std::istream& in, const std::string& path, bool binary) {
    const int width = next_pgm_token(in, path);
    const int height = next_pgm_token(in, path);
    const int maxval = next_pgm_token(in, path);
    if (width < 1 || height < 1) throw input_error(path + ": invalid PGM dimensions");
    if (maxval < 1 || maxval > 65535) throw input_error(path + ": PGM maxval out of range");

    Grid grid;
    grid.nrow = static_cast<std::size_t>(height);
    grid.ncol = static_cast<std::size_t>(width);
    const std::size_t count = grid.nrow * grid.ncol;
    grid.values.reserve(count);

    if (binary) {
        in.get(); // the single whitespace byte after maxval
        const int bytes = maxval < 256 ? 1 : 2;
        std::vector<unsigned char> raw(count * static_cast<std::size_t>(bytes));
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
            throw input_error(path + ": truncated PGM payload");
        }
        for (std::size_t i = 0; i < count; ++i) {
            const unsigned value = bytes == 1
                                       ? raw[i]
                                       : (static_cast<unsigned>(raw[2 * i]) << 8) + raw[2 * i + 1];
            grid.values.push_back(static_cast<double>(value));
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            int value = 0;
            if (!(in >> value)) throw input_error(path + ": truncated PGM payload");
            grid.values.push_back(static_cast<double>(value));
        }
    }
    return grid;
}

} // namespace

PointSample parse_points_csv(const std::string& path) {
    std::ifstream in = open_or_throw(path, std::ios_base::in);
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw input_error(path + ": empty file");
    ++lineno;
    chomp(line);
    if (!header_matches(line, {"s1", "s2", "x", "y"})) {
        fail_at(path, lineno, "expected header s1,s2,x,y");
    }

    PointSample sample;
    while (std::getline(in, line)) {
        ++lineno;
        chomp(line);
        if (trimmed(line).empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 4) {
            fail_at(path, lineno,
                    "expected 4 fields, got " + std::to_string(cells.size()));
        }
        double values[4];
        for (std::size_t c = 0; c < 4; ++c) {
            if (!parse_double(cells[c], values[c])) {
                fail_at(path, lineno, "invalid number '" + std::string(trimmed(cells[c])) + "'");
            }
        }
        sample.s1.push_back(values[0]);
        sample.s2.push_back(values[1]);
        sample.x.push_back(values[2]);
        sample.y.push_back(values[3]);
    }
    validate(sample);
    return sample;
}

Grid parse_grid(const std::string& path) {
    std::ifstream in = open_or_throw(path, std::ios_base::in | std::ios_base::binary);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() == 2 && magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) {
        return parse_pgm(in, path, magic[1] == '5');
    }
    in.clear();
    in.seekg(0);
    return parse_matrix_text(in, path);
}

PointSample parse_grid_pair(const std::string& path_x, const std::string& path_y) {
    const Grid gx = parse_grid(path_x);
    const Grid gy = parse_grid(path_y);
    if (gx.nrow != gy.nrow || gx.ncol != gy.ncol) {
        throw input_error("grid dimensions differ: " + std::to_string(gx.nrow) + "x" +
                          std::to_string(gx.ncol) + " vs " + std::to_string(gy.nrow) + "x" +
                          std::to_string(gy.ncol));
    }
    PointSample sample;
    const std::size_t n = gx.nrow * gx.ncol;
    sample.s1.reserve(n);
    sample.s2.reserve(n);
    for (std::size_t r = 0; r < gx.nrow; ++r) {
        for (std::size_t c = 0; c < gx.ncol; ++c) {
            sample.s1.push_back(static_cast<double>(c));
            sample.s2.push_back(static_cast<double>(r));
        }
    }
    sample.x = gx.values;
    sample.y = gy.values;
    validate(sample);
    return sample;
}

std::vector<double> parse_series_csv(const std::string& path) {
    std::ifstream in = open_or_throw(path, std::ios_base::in);
    std::vector<double> series;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        chomp(line);
        const std::string_view body = trimmed(line);
        if (body.empty()) continue;
        double value = 0.0;
        if (!parse_double(body, value)) {
            if (lineno == 1) continue; // header line
            fail_at(path, lineno, "invalid number '" + std::string(body) + "'");
        } else {
            series.push_back(value);
        }
    }
    if (series.empty()) throw input_error(path + ": no data rows");
    return series;
}

} // namespace spassoc
