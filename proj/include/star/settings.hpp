#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "star/benchmark.hpp"
#include "star/cv.hpp"
#include "star/io.hpp"
#include "star/sensitivity.hpp"
#include "star/sim.hpp"

namespace star {

struct SettingSpec {
    const char* key;
    const char* default_value;
    const char* help;
};

/// Every recognised configuration key with its default.
const std::vector<SettingSpec>& setting_registry();

/**
 * Resolved key/value configuration: registry defaults, then a config file,
 * then command-line overrides. Typed accessors raise ConfigError on bad values.
 */
class Settings {
public:
    Settings();

    /// Overrides known keys; unknown keys raise ConfigError.
    void merge(const KeyValues& values);
    void set(const std::string& key, const std::string& value);

    const std::string& get(const std::string& key) const;
    double number(const std::string& key) const;
    long long integer(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;
    std::vector<std::size_t> counts(const std::string& key) const;

    BasisConfig basis() const;
    FitConfig fit() const;
    CvConfig cv() const;
    SimSpec sim() const;
    BenchmarkConfig benchmark() const;
    SensitivityConfig sensitivity() const;

    /// `key = value` lines in registry order.
    void print(std::ostream& out) const;

private:
    KeyValues values_;
};

} // namespace star
