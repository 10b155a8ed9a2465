#include "talenti/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace talenti {

void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    // Prefer the shortest representation that round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char probe[32];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, x);
        double back = 0.0;
        std::sscanf(probe, "%lf", &back);
        if (back == x)
            return probe;
    }
    return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(item);
    return out;
}

bool is_header(const std::string& line) {
    for (char c : line)
        if (std::isalpha(static_cast<unsigned char>(c)))
            return true;
    return false;
}

} // namespace

WeightedFunction read_weighted_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open " + path.string());
    std::vector<WeightedCell> cells;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (first && is_header(line)) {
            first = false;
            continue;
        }
        first = false;
        const auto parts = split_line(line);
        if (parts.size() != 2)
            throw std::invalid_argument("expected value,weight rows in " + path.string());
        cells.push_back({std::stod(parts[0]), std::stod(parts[1])});
    }
    return WeightedFunction(std::move(cells));
}

std::string step_function_csv(const StepFunction& f) {
    std::string out = "breakpoint,value\n";
    for (std::size_t i = 0; i < f.values().size(); ++i)
        out += format_double(f.breakpoints()[i]) + "," + format_double(f.values()[i]) + "\n";
    out += format_double(f.breakpoints().back()) + "," + format_double(f.values().back()) + "\n";
    return out;
}

std::vector<double> read_vertex_csv(const std::filesystem::path& path, std::size_t n_vertices) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open " + path.string());
    std::vector<double> values(n_vertices, 0.0);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (first && is_header(line)) {
            first = false;
            continue;
        }
        first = false;
        const auto parts = split_line(line);
        if (parts.size() != 2)
            throw std::invalid_argument("expected vertex_index,value rows in " + path.string());
        const std::size_t idx = static_cast<std::size_t>(std::stoul(parts[0]));
        if (idx >= n_vertices)
            throw std::invalid_argument("vertex index out of range in " + path.string());
        values[idx] = std::stod(parts[1]);
    }
    return values;
}

std::string vertex_csv(const std::vector<double>& values) {
    std::string out = "vertex_index,value\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out += std::to_string(i) + "," + format_double(values[i]) + "\n";
    return out;
}

std::vector<std::uint8_t> read_mask_csv(const std::filesystem::path& path,
                                        std::size_t n_vertices) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open " + path.string());
    std::vector<std::uint8_t> mask(n_vertices, 0);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (first && is_header(line)) {
            first = false;
            continue;
        }
        first = false;
        const auto parts = split_line(line);
        if (parts.size() != 2)
            throw std::invalid_argument("expected vertex_index,inside rows in " + path.string());
        const std::size_t idx = static_cast<std::size_t>(std::stoul(parts[0]));
        if (idx >= n_vertices)
            throw std::invalid_argument("vertex index out of range in " + path.string());
        mask[idx] = std::stoi(parts[1]) != 0 ? 1 : 0;
    }
    return mask;
}

std::vector<std::array<double, 3>> read_coeff_csv(const std::filesystem::path& path,
                                                  std::size_t n_triangles) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open " + path.string());
    std::vector<std::array<double, 3>> tensors(n_triangles, {1.0, 0.0, 1.0});
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (first && is_header(line)) {
            first = false;
            continue;
        }
        first = false;
        const auto parts = split_line(line);
        if (parts.size() != 4)
            throw std::invalid_argument("expected triangle_index,a11,a12,a22 rows in " +
                                        path.string());
        const std::size_t idx = static_cast<std::size_t>(std::stoul(parts[0]));
        if (idx >= n_triangles)
            throw std::invalid_argument("triangle index out of range in " + path.string());
        tensors[idx] = {std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3])};
    }
    return tensors;
}

std::string curve_csv(const std::vector<double>& rho, const std::vector<double>& a,
                      const std::vector<double>& b, const std::string& header) {
    if (rho.size() != a.size() || rho.size() != b.size())
        throw std::invalid_argument("curve columns have different lengths");
    std::string out = header + "\n";
    for (std::size_t i = 0; i < rho.size(); ++i)
        out += format_double(rho[i]) + "," + format_double(a[i]) + "," + format_double(b[i]) +
               "\n";
    return out;
}

} // namespace talenti
