#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace qhopcli {

/// Shortest-round-trip-safe decimal rendering used for every number we
/// write: CSV cells, field files, plot annotations.
std::string format_double(double v);

/// CSV with a header row and fixed column order; every cell runs through
/// format_double.
std::string csv_table(const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Site-indexed complex field in the documented row-major site order.
/// data[site * components + c] is component c at the site.
struct FieldFile {
    int dim = 3;
    std::array<std::int64_t, 3> extent{1, 1, 1};
    double spacing = 1.0;
    int components = 1;
    std::vector<std::complex<double>> data;
};

/// Text format: a fixed header
///     qhop-field 1
///     dim D
///     extent N1 [N2 [N3]]
///     spacing A
///     components C
/// followed by one line per site with C re/im pairs.
std::string render_field_file(const FieldFile& f);
FieldFile parse_field_file(const std::string& text);

/// FNV-1a 64-bit over raw bytes; the manifest's checksum primitive.
std::uint64_t fnv1a64(const std::string& bytes);

/// Writes manifest.json into out_dir: the canonical config echo plus one
/// {name, bytes, fnv1a64} record per artifact, sorted by name.  Call last;
/// the manifest never lists itself.
void write_manifest(const std::string& out_dir, const std::string& config_echo,
                    const std::vector<std::string>& files);

/// Minimal gnuplot script plotting columns of a CSV; one script per figure.
std::string plot_script(const std::string& csv_name, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel,
                        const std::vector<std::pair<int, std::string>>& series,
                        bool logscale_y = false);

}  // namespace qhopcli
