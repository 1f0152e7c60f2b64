#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

#include "star/dataset.hpp"
#include "star/model.hpp"

namespace star {

/// Raised for malformed configuration files or values.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/**
 * Dataset CSV: a header row `m,p1,...,pm`, then one row per sample holding
 * y followed by the P covariate values in row-major order. Values are written
 * with 17 significant digits so a round trip is lossless.
 */
void write_dataset(std::ostream& out, const RawData& data);
RawData read_dataset(std::istream& in);
void save_dataset(const std::filesystem::path& path, const RawData& data);
RawData load_dataset(const std::filesystem::path& path);

/// First line of every model file.
inline constexpr const char* kModelFormatTag = "star-model 1";

/**
 * Line-oriented text format: the format tag, then `key values...` records for
 * the shape, basis, scaler arrays, intercept, fit metadata and one record per
 * factor vector (flattened at ((j * R + r) * d + h)).
 */
void write_model(std::ostream& out, const StarModel& model);
StarModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const StarModel& model);
StarModel load_model(const std::filesystem::path& path);

/// `%.17g` formatting.
std::string format_double(double value);
/// Whole-string parse; throws ConfigError naming `what` on failure.
double parse_double(const std::string& text, const std::string& what);
long long parse_int(const std::string& text, const std::string& what);
bool parse_bool(const std::string& text, const std::string& what);

/**
 * `key = value` lines; blank lines and text after `#` are ignored. Duplicate
 * keys and lines without `=` raise ConfigError.
 */
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_config(std::istream& in);
KeyValues load_config(const std::filesystem::path& path);

} // namespace star
