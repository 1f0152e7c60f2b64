#include "star/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace star {

namespace {

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double data_double(const std::string& text, std::size_t line)
{
    try {
        return parse_double(trim(text), "value");
    } catch (const ConfigError&) {
        throw DataError("dataset line " + std::to_string(line) + ": invalid number '" + text + "'");
    }
}

std::size_t data_size(const std::string& text, std::size_t line)
{
    long long v = 0;
    try {
        v = parse_int(trim(text), "dimension");
    } catch (const ConfigError&) {
        throw DataError("dataset line " + std::to_string(line) + ": invalid integer '" + text + "'");
    }
    if (v <= 0) throw DataError("dataset line " + std::to_string(line) + ": dimensions must be positive");
    return static_cast<std::size_t>(v);
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

// Model records are "key v1 v2 ..." on one line.
class RecordReader {
public:
    explicit RecordReader(std::istream& in) : in_(in) {}

    std::vector<std::string> next(const std::string& key)
    {
        std::string line;
        while (std::getline(in_, line)) {
            line = trim(line);
            if (!line.empty()) break;
        }
        std::istringstream ss(line);
        std::vector<std::string> tokens;
        for (std::string t; ss >> t;) tokens.push_back(t);
        if (tokens.empty() || tokens[0] != key) {
            throw DataError("model file: expected record '" + key + "'");
        }
        tokens.erase(tokens.begin());
        return tokens;
    }

    std::vector<double> doubles(const std::string& key, std::size_t count)
    {
        const auto tokens = next(key);
        if (tokens.size() != count + 1 || parse_size(tokens[0], key) != count) {
            throw DataError("model file: record '" + key + "' has the wrong length");
        }
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) out[i] = parse_value(tokens[i + 1], key);
        return out;
    }

    static double parse_value(const std::string& text, const std::string& key)
    {
        try {
            return parse_double(text, key);
        } catch (const ConfigError& e) {
            throw DataError(std::string("model file: ") + e.what());
        }
    }

    static std::size_t parse_size(const std::string& text, const std::string& key)
    {
        long long v = 0;
        try {
            v = parse_int(text, key);
        } catch (const ConfigError& e) {
            throw DataError(std::string("model file: ") + e.what());
        }
        if (v < 0) throw DataError("model file: negative count in '" + key + "'");
        return static_cast<std::size_t>(v);
    }

private:
    std::istream& in_;
};

void write_record(std::ostream& out, const std::string& key, const double* values, std::size_t count)
{
    out << key << ' ' << count;
    for (std::size_t i = 0; i < count; ++i) out << ' ' << format_double(values[i]);
    out << '\n';
}

} // namespace

std::string format_double(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

double parse_double(const std::string& text, const std::string& what)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || text.empty()) {
        throw ConfigError(what + ": invalid number '" + text + "'");
    }
    return v;
}

long long parse_int(const std::string& text, const std::string& what)
{
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(what + ": invalid integer '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& text, const std::string& what)
{
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError(what + ": invalid boolean '" + text + "'");
}

void write_dataset(std::ostream& out, const RawData& data)
{
    data.validate();
    out << data.shape.size();
    for (auto p : data.shape) out << ',' << p;
    out << '\n';
    for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
        out << format_double(data.y[i]);
        for (Eigen::Index c = 0; c < data.x.cols(); ++c) out << ',' << format_double(data.x(i, c));
        out << '\n';
    }
}

RawData read_dataset(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw DataError("dataset: missing header");
    const auto header = split(trim(line), ',');
    const std::size_t m = data_size(header[0], line_no);
    if (header.size() != m + 1) throw DataError("dataset header: expected m followed by m dimensions");
    RawData data;
    for (std::size_t k = 0; k < m; ++k) data.shape.push_back(data_size(header[k + 1], line_no));
    const std::size_t P = shape_size(data.shape);

    std::vector<double> ys;
    std::vector<double> xs;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) continue;
        const auto fields = split(t, ',');
        if (fields.size() != P + 1) {
            throw DataError("dataset line " + std::to_string(line_no) + ": expected " +
                            std::to_string(P + 1) + " fields, found " + std::to_string(fields.size()));
        }
        ys.push_back(data_double(fields[0], line_no));
        for (std::size_t c = 0; c < P; ++c) xs.push_back(data_double(fields[c + 1], line_no));
    }
    const auto n = static_cast<Eigen::Index>(ys.size());
    data.y = Eigen::Map<const Eigen::VectorXd>(ys.data(), n);
    data.x = Eigen::Map<const RowMatrix>(xs.data(), n, static_cast<Eigen::Index>(P));
    data.validate();
    return data;
}

void save_dataset(const std::filesystem::path& path, const RawData& data)
{
    auto out = open_out(path);
    write_dataset(out, data);
}

RawData load_dataset(const std::filesystem::path& path)
{
    auto in = open_in(path);
    return read_dataset(in);
}

void write_model(std::ostream& out, const StarModel& model)
{
    const auto& basis = model.basis;
    const auto& fit = model.fit;
    const auto& bundle = fit.bundle;
    out << kModelFormatTag << '\n';
    out << "shape " << model.shape.size();
    for (auto p : model.shape) out << ' ' << p;
    out << '\n';
    out << "basis " << to_string(basis.kind()) << ' ' << basis.order() << ' '
        << (basis.drop_constant() ? 1 : 0) << '\n';
    write_record(out, "internal_knots", basis.internal_knots().data(), basis.internal_knots().size());
    write_record(out, "scaler_min", model.scaler.min.data(), static_cast<std::size_t>(model.scaler.min.size()));
    write_record(out, "scaler_max", model.scaler.max.data(), static_cast<std::size_t>(model.scaler.max.size()));
    write_record(out, "scaler_means", model.scaler.means.data(),
                 static_cast<std::size_t>(model.scaler.means.size()));
    out << "intercept " << format_double(fit.intercept) << '\n';
    out << "lambda " << format_double(fit.lambda) << '\n';
    out << "rank " << bundle.rank() << '\n';
    out << "fit " << fit.sweeps << ' ' << (fit.converged ? 1 : 0) << ' ' << (fit.degenerate ? 1 : 0) << '\n';
    for (std::size_t k = 0; k < bundle.ways(); ++k) {
        write_record(out, "factor", bundle.factor(k).data(), static_cast<std::size_t>(bundle.factor(k).size()));
    }
}

StarModel read_model(std::istream& in)
{
    std::string tag;
    std::getline(in, tag);
    if (trim(tag) != kModelFormatTag) throw DataError("model file: missing or unsupported format tag");
    RecordReader reader(in);

    StarModel model;
    const auto shape = reader.next("shape");
    if (shape.empty()) throw DataError("model file: empty shape");
    const std::size_t m = RecordReader::parse_size(shape[0], "shape");
    if (m == 0 || shape.size() != m + 1) throw DataError("model file: malformed shape");
    for (std::size_t k = 0; k < m; ++k) {
        const auto p = RecordReader::parse_size(shape[k + 1], "shape");
        if (p == 0) throw DataError("model file: zero dimension");
        model.shape.push_back(p);
    }
    const std::size_t P = shape_size(model.shape);

    const auto basis = reader.next("basis");
    if (basis.size() != 3) throw DataError("model file: malformed basis record");
    BasisKind kind;
    try {
        kind = parse_basis_kind(basis[0]);
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
    const auto order = static_cast<int>(RecordReader::parse_size(basis[1], "basis"));
    const bool drop = RecordReader::parse_size(basis[2], "basis") != 0;
    const auto knots_tokens = reader.next("internal_knots");
    if (knots_tokens.empty()) throw DataError("model file: malformed internal_knots record");
    const std::size_t n_knots = RecordReader::parse_size(knots_tokens[0], "internal_knots");
    if (knots_tokens.size() != n_knots + 1) throw DataError("model file: internal_knots has the wrong length");
    std::vector<double> knots(n_knots);
    for (std::size_t i = 0; i < n_knots; ++i) knots[i] = RecordReader::parse_value(knots_tokens[i + 1], "internal_knots");
    try {
        switch (kind) {
        case BasisKind::bspline: model.basis = SplineBasis::bspline(order, knots); break;
        case BasisKind::natural: model.basis = SplineBasis::natural(knots, drop); break;
        case BasisKind::identity: model.basis = SplineBasis::identity(); break;
        }
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
    const std::size_t d = model.basis.size();

    const auto mins = reader.doubles("scaler_min", P);
    const auto maxs = reader.doubles("scaler_max", P);
    const auto means = reader.doubles("scaler_means", P * d);
    model.scaler.min = Eigen::Map<const Eigen::VectorXd>(mins.data(), static_cast<Eigen::Index>(P));
    model.scaler.max = Eigen::Map<const Eigen::VectorXd>(maxs.data(), static_cast<Eigen::Index>(P));
    model.scaler.means = Eigen::Map<const RowMatrix>(means.data(), static_cast<Eigen::Index>(P),
                                                     static_cast<Eigen::Index>(d));

    auto single = [&](const std::string& key) {
        const auto t = reader.next(key);
        if (t.size() != 1) throw DataError("model file: malformed '" + key + "' record");
        return t[0];
    };
    auto& fit = model.fit;
    fit.intercept = RecordReader::parse_value(single("intercept"), "intercept");
    fit.lambda = RecordReader::parse_value(single("lambda"), "lambda");
    const std::size_t R = RecordReader::parse_size(single("rank"), "rank");
    if (R == 0) throw DataError("model file: rank must be positive");
    const auto meta = reader.next("fit");
    if (meta.size() != 3) throw DataError("model file: malformed fit record");
    fit.sweeps = static_cast<int>(RecordReader::parse_size(meta[0], "fit"));
    fit.converged = RecordReader::parse_size(meta[1], "fit") != 0;
    fit.degenerate = RecordReader::parse_size(meta[2], "fit") != 0;
    fit.rank = R;

    fit.bundle = CpFactorBundle(model.shape, R, d);
    for (std::size_t k = 0; k < m; ++k) {
        const auto values = reader.doubles("factor", model.shape[k] * R * d);
        fit.bundle.set_factor(k, Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                                   static_cast<Eigen::Index>(values.size())));
    }
    if (!fit.bundle.all_finite()) throw DataError("model file: non-finite factor values");
    for (std::size_t k = 0; k < m; ++k) fit.active_sets.push_back(fit.bundle.active_set(k));
    return model;
}

void save_model(const std::filesystem::path& path, const StarModel& model)
{
    auto out = open_out(path);
    write_model(out, model);
}

StarModel load_model(const std::filesystem::path& path)
{
    auto in = open_in(path);
    return read_model(in);
}

KeyValues parse_config(std::istream& in)
{
    KeyValues out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (!out.emplace(key, value).second) {
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
    }
    return out;
}

KeyValues load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    return parse_config(in);
}

} // namespace star
