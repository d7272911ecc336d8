#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qhopcli {

using cdouble = std::complex<double>;

/// Anything wrong with a config file: unreadable, malformed line, unknown
/// key, missing required field, unparseable value.  The message names the
/// offending field as section.key where applicable.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Complex literal in the "re+imi" form: "0+1i", "1.5-0.25i", "-2i", plus
/// plain reals ("0.3").  Anything else throws.
cdouble parse_complex(const std::string& text);

/// The flat section/key/value structure of a config file, before schema
/// validation.  Keys outside any section live under the "" section.
struct RawConfig {
    std::map<std::string, std::map<std::string, std::string>> sections;

    bool has(const std::string& section, const std::string& key) const;
    const std::string& get(const std::string& section, const std::string& key) const;
};

RawConfig parse_raw_config(const std::string& text);

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 0;
    std::string out;  // optional; the --out flag overrides

    // [lattice]
    int dim = 3;
    std::array<std::int64_t, 3> extent{1, 1, 1};
    double spacing = 1.0;

    // [model]
    cdouble epsilon{0, 0};
    cdouble eta{0, 0};
    cdouble kappa{0, 0};

    // [packet]
    std::string profile = "gaussian";  // gaussian | power_law
    double sigma = 0.3;
    double exponent = 2.0;
    std::array<double, 3> p0{0, 0, 0};
    std::array<double, 3> spin_axis{0, 0, 1};
    int helicity = +1;

    // [time]
    double dt = 0.01;
    int steps = 0;
    int stride = 1;
    double t_max = 0.0;
    int samples = 0;

    // [gamma]
    std::string gamma_source = "none";  // none | fourier | file
    std::uint64_t gamma_seed = 0;       // defaults to seed unless gamma.seed is set
    bool gamma_seed_explicit = false;
    int max_mode = 1;
    double scale = 1.0;
    std::string parity = "odd";  // odd | even
    std::string gamma_path;

    // [study]
    std::string parameter;  // a | dt
    int levels = 0;

    /// Canonical key=value rendering of the resolved config; embedded in
    /// the manifest so a run can be reproduced from its outputs alone.
    std::string echo() const;
};

/// Parses and schema-checks; throws ConfigError naming the field on any
/// problem.  Unknown sections and keys are rejected outright; required
/// fields depend on the experiment named in the file.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config(const std::string& path);

/// The experiments parse_config accepts, in the order they are documented.
const std::vector<std::string>& known_experiments();

}  // namespace qhopcli
