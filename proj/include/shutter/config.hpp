#ifndef SHUTTER_CONFIG_HPP
#define SHUTTER_CONFIG_HPP

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "core_types.hpp"
#include "error.hpp"

namespace shutter {

inline constexpr const char* tool_version = "1.0.0";

enum class KeyType { Real, Int, Bool, Grid, List, Text };

struct KeySpec {
    std::string key;                  // section.name
    KeyType type;
    std::optional<std::string> def;   // nullopt: required; "": optional, unset
    std::string doc;
};

inline const std::vector<KeySpec>& config_keys()
{
    static const std::vector<KeySpec> keys = {
        {"system.V_eV", KeyType::Real, std::nullopt, "barrier height"},
        {"system.E_eV", KeyType::Real, std::nullopt, "incidence energy (unused by alpha scans)"},
        {"system.L_nm", KeyType::Real, std::nullopt, "barrier width (unused by alpha scans)"},
        {"system.mass_ratio", KeyType::Real, "0.067", "effective mass in units of m_e"},
        {"numerics.tol", KeyType::Real, "1e-10", "relative truncation tolerance of the resonance sum"},
        {"numerics.max_poles", KeyType::Int, "512", "pole pairs available to the sum"},
        {"numerics.underflow_guard", KeyType::Real, "1e-150", "|psi| below this gives no local frequency"},
        {"numerics.threads", KeyType::Int, "0", "worker threads, 0 = all cores"},
        {"time.x_nm", KeyType::Real, "", "probe position, default L"},
        {"time.tmin", KeyType::Real, "0.1", "fs"},
        {"time.tmax", KeyType::Real, "30", "fs"},
        {"time.steps", KeyType::Int, "300", "samples"},
        {"time.log", KeyType::Bool, "false", "geometric spacing"},
        {"search.t_lo", KeyType::Real, "0.01", "fs"},
        {"search.t_hi", KeyType::Real, "50", "fs"},
        {"search.n_grid", KeyType::Int, "2000", "coarse geometric samples"},
        {"search.dt_tol", KeyType::Real, "1e-4", "t_max bracket width, fs"},
        {"scan.L_grid", KeyType::Grid, "1:12:23", "nm"},
        {"scan.x_grid", KeyType::Grid, "", "nm, default 0.25L:8L:32"},
        {"scan.alpha_grid", KeyType::Grid, "1:4.5:36", "opacity"},
        {"scan.u", KeyType::Real, "300", "V/E for alpha scans"},
        {"scan.bisect_tol", KeyType::Real, "1e-3", "alpha tolerance of crossings"},
        {"oracle.x_min", KeyType::Real, "-200", "nm"},
        {"oracle.x_max", KeyType::Real, "100", "nm"},
        {"oracle.dx", KeyType::Real, "0.025", "nm"},
        {"oracle.dt", KeyType::Real, "3e-4", "fs"},
        {"oracle.absorber_width", KeyType::Real, "30", "left absorber, nm"},
        {"oracle.right_absorber_width", KeyType::Real, "50", "nm"},
        {"oracle.absorber_strength", KeyType::Real, "4", "eV"},
        {"oracle.probes", KeyType::List, "", "nm, default L/2,L,2L"},
        {"oracle.times", KeyType::Grid, "1:30:59", "fs"},
        {"output.path", KeyType::Text, "-", "CSV destination, - is stdout"},
    };
    return keys;
}

inline const KeySpec* find_key(const std::string& key)
{
    for (const KeySpec& k : config_keys())
        if (k.key == key)
            return &k;
    return nullptr;
}

struct GridSpec {
    double start = 0;
    double stop = 0;
    int count = 0;
    bool log = false;

    std::vector<double> values() const
    {
        std::vector<double> g(count);
        for (int i = 0; i < count; ++i) {
            const double f = count == 1 ? 0.0 : double(i) / (count - 1);
            g[i] = log ? start * std::pow(stop / start, f) : start + (stop - start) * f;
        }
        if (count > 1)
            g.back() = stop;
        return g;
    }
};

namespace config_detail {

inline std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::optional<double> to_real(const std::string& s)
{
    double v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+')
        ++b;
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e || b == e)
        return std::nullopt;
    return v;
}

inline std::optional<long long> to_int(const std::string& s)
{
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

inline std::optional<bool> to_bool(const std::string& s)
{
    if (s == "true" || s == "1" || s == "yes")
        return true;
    if (s == "false" || s == "0" || s == "no")
        return false;
    return std::nullopt;
}

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

// start:stop:count[:log|lin]
inline std::optional<GridSpec> to_grid(const std::string& s)
{
    const auto f = split(s, ':');
    if (f.size() != 3 && f.size() != 4)
        return std::nullopt;
    const auto a = to_real(f[0]), b = to_real(f[1]);
    const auto n = to_int(f[2]);
    if (!a || !b || !n || *n < 1 || *n > 1000000)
        return std::nullopt;
    GridSpec g{*a, *b, int(*n), false};
    if (f.size() == 4) {
        if (f[3] == "log")
            g.log = true;
        else if (f[3] != "lin")
            return std::nullopt;
    }
    if (g.log && !(g.start > 0 && g.stop > 0))
        return std::nullopt;
    return g;
}

inline std::optional<std::vector<double>> to_list(const std::string& s)
{
    std::vector<double> out;
    for (const std::string& f : split(s, ',')) {
        const auto v = to_real(f);
        if (!v)
            return std::nullopt;
        out.push_back(*v);
    }
    return out;
}

inline bool valid(KeyType t, const std::string& v)
{
    if (v.empty())
        return true;
    switch (t) {
    case KeyType::Real: return to_real(v) && std::isfinite(*to_real(v));
    case KeyType::Int: return to_int(v).has_value();
    case KeyType::Bool: return to_bool(v).has_value();
    case KeyType::Grid: return to_grid(v).has_value();
    case KeyType::List: return to_list(v).has_value();
    case KeyType::Text: return true;
    }
    return false;
}

inline const char* type_name(KeyType t)
{
    switch (t) {
    case KeyType::Real: return "a real number";
    case KeyType::Int: return "an integer";
    case KeyType::Bool: return "true or false";
    case KeyType::Grid: return "a grid start:stop:count[:log]";
    case KeyType::List: return "a comma-separated list of reals";
    case KeyType::Text: return "text";
    }
    return "";
}

inline std::string where(int line) { return line > 0 ? " (line " + std::to_string(line) + ")" : ""; }

// provenance values are whitespace-free
inline std::string encode(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '%' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ',' || c == '"') {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", unsigned(static_cast<unsigned char>(c)));
            out += buf;
        } else {
            out += c;
        }
    }
    return out;
}

inline std::string decode(const std::string& s)
{
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            out += char(std::stoi(s.substr(i + 1, 2), nullptr, 16));
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

} // namespace config_detail

class RunConfig {
public:
    RunConfig()
    {
        for (const KeySpec& k : config_keys())
            values_[k.key] = k.def.value_or("");
    }

    // later calls override earlier ones; line 0 marks a command-line value
    void set(const std::string& key, const std::string& value, int line = 0)
    {
        const KeySpec* k = find_key(key);
        if (!k)
            throw Error(Errc::UnknownKey, "unknown key '" + key + "'" + config_detail::where(line));
        const std::string v = config_detail::trim(value);
        if (!config_detail::valid(k->type, v))
            throw Error(Errc::TypeError, "key '" + key + "'" + config_detail::where(line) + " must be "
                        + config_detail::type_name(k->type) + ", got '" + v + "'");
        values_[key] = v;
        lines_[key] = line;
    }

    bool has(const std::string& key) const { return !raw(key).empty(); }

    const std::string& raw(const std::string& key) const
    {
        const auto it = values_.find(key);
        if (it == values_.end())
            throw Error(Errc::UnknownKey, "unknown key '" + key + "'");
        return it->second;
    }

    int line(const std::string& key) const
    {
        const auto it = lines_.find(key);
        return it == lines_.end() ? 0 : it->second;
    }

    void require(const std::string& key) const
    {
        if (!has(key))
            throw Error(Errc::MissingRequired, "required key '" + key + "' is not set");
    }

    double real(const std::string& key) const
    {
        require(key);
        return *config_detail::to_real(raw(key));
    }
    long long integer(const std::string& key) const
    {
        require(key);
        return *config_detail::to_int(raw(key));
    }
    bool flag(const std::string& key) const
    {
        require(key);
        return *config_detail::to_bool(raw(key));
    }
    GridSpec grid(const std::string& key) const
    {
        require(key);
        return *config_detail::to_grid(raw(key));
    }
    std::vector<double> list(const std::string& key) const
    {
        require(key);
        return *config_detail::to_list(raw(key));
    }
    std::string text(const std::string& key) const { return raw(key); }

    double positive(const std::string& key) const
    {
        const double v = real(key);
        if (!(v > 0))
            throw Error(Errc::NonPositiveParameter, "key '" + key + "'" + config_detail::where(line(key))
                        + " must be > 0, got " + raw(key));
        return v;
    }

    // one line: tool version, command, then every key in table order
    std::string provenance(const std::string& command) const
    {
        std::string s = std::string("shutter ") + tool_version + " command=" + config_detail::encode(command);
        for (const KeySpec& k : config_keys())
            s += " " + k.key + "=" + config_detail::encode(raw(k.key));
        return s;
    }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
};

// flat INI: [section] headers, key = value, '#' or ';' comments
inline RunConfig parse_config(const std::string& text, RunConfig cfg = {})
{
    std::istringstream in(text);
    std::string line, section;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        std::string s = config_detail::trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';')
            continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw Error(Errc::TypeError, "malformed section header" + config_detail::where(no));
            section = config_detail::trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::TypeError, "expected key = value" + config_detail::where(no));
        const std::string name = config_detail::trim(s.substr(0, eq));
        std::string value = s.substr(eq + 1);
        const auto hash = value.find(" #");
        if (hash != std::string::npos)
            value = value.substr(0, hash);
        const std::string key = section.empty() ? name : section + "." + name;
        cfg.set(key, value, no);
    }
    return cfg;
}

// inverse of RunConfig::provenance; the leading '#' is optional
inline RunConfig parse_provenance(const std::string& line, std::string* command = nullptr)
{
    std::istringstream in(line);
    std::string tok;
    RunConfig cfg;
    bool tagged = false;
    while (in >> tok) {
        if (tok == "#")
            continue;
        if (tok == "shutter") {
            tagged = true;
            in >> tok;   // version
            continue;
        }
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::TypeError, "malformed provenance token '" + tok + "'");
        const std::string key = tok.substr(0, eq), value = config_detail::decode(tok.substr(eq + 1));
        if (key == "command") {
            if (command)
                *command = value;
            continue;
        }
        cfg.set(key, value);
    }
    if (!tagged)
        throw Error(Errc::TypeError, "not a provenance line");
    return cfg;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error(Errc::IoError, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad())
        throw Error(Errc::IoError, "read failed on '" + path + "'");
    return ss.str();
}

// an INI file, or a CSV produced by this tool (its provenance line is replayed)
inline RunConfig load_config(const std::string& path, std::string* command = nullptr)
{
    const std::string text = read_file(path);
    if (text.rfind("# shutter ", 0) == 0)
        return parse_provenance(text.substr(0, text.find('\n')), command);
    return parse_config(text);
}

inline BarrierSystem system_from(const RunConfig& cfg)
{
    const double V = cfg.positive("system.V_eV");
    const double E = cfg.positive("system.E_eV");
    const double L = cfg.positive("system.L_nm");
    const double m = cfg.positive("system.mass_ratio");
    return make_system(V, E, L, m);
}

// ---- CSV ----

using CsvCell = std::variant<std::monostate, double, long long, std::string>;

struct CsvTable {
    std::string provenance;
    std::vector<std::string> header;
    std::vector<std::vector<CsvCell>> rows;
};

// shortest form that round-trips at 17 significant digits
inline std::string format_number(double v)
{
    if (std::isnan(v))
        return "";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string cell_text(const CsvCell& c)
{
    if (std::holds_alternative<double>(c))
        return format_number(std::get<double>(c));
    if (std::holds_alternative<long long>(c))
        return std::to_string(std::get<long long>(c));
    if (std::holds_alternative<std::string>(c))
        return csv_field(std::get<std::string>(c));
    return "";
}

inline CsvCell opt_cell(const std::optional<double>& v)
{
    return v ? CsvCell(*v) : CsvCell();
}

inline std::string to_csv(const CsvTable& t)
{
    std::string s = "# " + t.provenance + "\r\n";
    for (std::size_t i = 0; i < t.header.size(); ++i)
        s += (i ? "," : "") + csv_field(t.header[i]);
    s += "\r\n";
    for (const auto& row : t.rows) {
        if (row.size() != t.header.size())
            throw Error(Errc::TypeError, "row width differs from the header");
        for (std::size_t i = 0; i < row.size(); ++i)
            s += (i ? "," : "") + cell_text(row[i]);
        s += "\r\n";
    }
    return s;
}

// path "-" or empty writes to stdout
inline void emit_csv(const CsvTable& t, const std::string& path)
{
    if (t.rows.empty())
        throw Error(Errc::MissingRequired, "refusing to write an empty table");
    const std::string text = to_csv(t);
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout)
            throw Error(Errc::IoError, "write to stdout failed");
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
    f << text;
    f.close();
    if (!f)
        throw Error(Errc::IoError, "write to '" + path + "' failed");
}

struct ParsedCsv {
    std::string provenance;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline ParsedCsv parse_csv(const std::string& text)
{
    ParsedCsv out;
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> rec;
    std::string field;
    bool quoted = false, any = false;
    std::size_t i = 0;
    if (text.rfind("# ", 0) == 0) {
        const auto nl = text.find('\n');
        out.provenance = config_detail::trim(text.substr(2, nl == std::string::npos ? std::string::npos : nl - 2));
        i = nl == std::string::npos ? text.size() : nl + 1;
    }
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            rec.push_back(field);
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
                ++i;
            if (any || !field.empty()) {
                rec.push_back(field);
                records.push_back(rec);
            }
            rec.clear();
            field.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (any || !field.empty()) {
        rec.push_back(field);
        records.push_back(rec);
    }
    if (!records.empty()) {
        out.header = records.front();
        out.rows.assign(records.begin() + 1, records.end());
    }
    return out;
}

} // namespace shutter

#endif
