#include "qhopcli/formats.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qhopcli {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_table(const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::logic_error("csv row width does not match the header");
        for (size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
        out << "\n";
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string render_field_file(const FieldFile& f) {
    std::ostringstream out;
    out << "qhop-field 1\n";
    out << "dim " << f.dim << "\n";
    out << "extent";
    for (int j = 0; j < f.dim; ++j) out << " " << f.extent[size_t(j)];
    out << "\n";
    out << "spacing " << format_double(f.spacing) << "\n";
    out << "components " << f.components << "\n";
    std::int64_t sites = 1;
    for (int j = 0; j < f.dim; ++j) sites *= f.extent[size_t(j)];
    if (std::int64_t(f.data.size()) != sites * f.components)
        throw std::logic_error("field data size does not match lattice * components");
    for (std::int64_t s = 0; s < sites; ++s) {
        for (int c = 0; c < f.components; ++c) {
            const auto z = f.data[size_t(s * f.components + c)];
            out << (c ? " " : "") << format_double(z.real()) << " " << format_double(z.imag());
        }
        out << "\n";
    }
    return out.str();
}

namespace {

double parse_num(const std::string& tok, const char* what) {
    std::string t = tok;
    if (!t.empty() && t.front() == '+') t.erase(0, 1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        throw std::runtime_error(std::string("field file: bad ") + what + ": '" + tok + "'");
    return v;
}

}  // namespace

FieldFile parse_field_file(const std::string& text) {
    std::istringstream in(text);
    std::string word;
    FieldFile f;

    auto expect = [&](const char* key) {
        if (!(in >> word) || word != key)
            throw std::runtime_error(std::string("field file: expected '") + key + "'");
    };

    expect("qhop-field");
    int version = 0;
    if (!(in >> version) || version != 1)
        throw std::runtime_error("field file: unsupported version");
    expect("dim");
    if (!(in >> f.dim) || f.dim < 1 || f.dim > 3)
        throw std::runtime_error("field file: dim must be 1..3");
    expect("extent");
    f.extent = {1, 1, 1};
    std::int64_t sites = 1;
    for (int j = 0; j < f.dim; ++j) {
        if (!(in >> f.extent[size_t(j)]) || f.extent[size_t(j)] < 1)
            throw std::runtime_error("field file: bad extent");
        sites *= f.extent[size_t(j)];
    }
    expect("spacing");
    if (!(in >> word)) throw std::runtime_error("field file: missing spacing");
    f.spacing = parse_num(word, "spacing");
    if (!(f.spacing > 0)) throw std::runtime_error("field file: spacing must be positive");
    expect("components");
    if (!(in >> f.components) || f.components < 1)
        throw std::runtime_error("field file: components must be >= 1");

    f.data.resize(size_t(sites * f.components));
    for (auto& z : f.data) {
        std::string re, im;
        if (!(in >> re >> im)) throw std::runtime_error("field file: truncated data");
        z = {parse_num(re, "value"), parse_num(im, "value")};
    }
    if (in >> word) throw std::runtime_error("field file: trailing data");
    return f;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

void write_manifest(const std::string& out_dir, const std::string& config_echo,
                    const std::vector<std::string>& files) {
    std::vector<std::string> sorted = files;
    std::sort(sorted.begin(), sorted.end());

    nlohmann::ordered_json m;
    m["config"] = config_echo;
    m["artifacts"] = nlohmann::ordered_json::array();
    for (const auto& name : sorted) {
        const std::string bytes = read_text_file(out_dir + "/" + name);
        char hex[20];
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(bytes)));
        m["artifacts"].push_back({{"name", name}, {"bytes", bytes.size()}, {"fnv1a64", hex}});
    }
    write_text_file(out_dir + "/manifest.json", m.dump(2) + "\n");
}

std::string plot_script(const std::string& csv_name, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel,
                        const std::vector<std::pair<int, std::string>>& series,
                        bool logscale_y) {
    std::string stem = title;
    for (char& c : stem)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    std::ostringstream out;
    out << "# gnuplot script; run from this directory\n";
    out << "set datafile separator ','\n";
    out << "set terminal svg size 900,600\n";
    out << "set output '" << stem << ".svg'\n";
    out << "set title '" << title << "'\n";
    out << "set xlabel '" << xlabel << "'\n";
    out << "set ylabel '" << ylabel << "'\n";
    if (logscale_y) out << "set logscale y\n";
    out << "set key outside\n";
    out << "plot ";
    for (size_t k = 0; k < series.size(); ++k) {
        if (k) out << ", \\\n     ";
        out << "'" << csv_name << "' using 1:" << series[k].first << " with lines title '"
            << series[k].second << "'";
    }
    out << "\n";
    return out.str();
}

}  // namespace qhopcli
