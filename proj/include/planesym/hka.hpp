#pragma once

// Plain-text .hka coefficient files: h k amp_obs phase_obs [amp_sym phase_sym], phases in degrees.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "planesym/core.hpp"
#include "planesym/error.hpp"
#include "planesym/geometry.hpp"
#include "planesym/model.hpp"

namespace planesym {

struct HkaRecord {
    int h = 0;
    int k = 0;
    double amp_obs = 0.0;
    double phase_obs = 0.0;
    std::optional<double> amp_sym;
    std::optional<double> phase_sym;

    bool has_sym() const { return amp_sym.has_value() && phase_sym.has_value(); }
    friend bool operator==(const HkaRecord&, const HkaRecord&) = default;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::optional<double> parse_real(std::string_view t) {
    if (!t.empty() && t.front() == '+') t.remove_prefix(1);
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<int> parse_int(std::string_view t) {
    if (!t.empty() && t.front() == '+') t.remove_prefix(1);
    int v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) return std::nullopt;
    return v;
}

}  // namespace detail

/// Parses .hka text. Lines whose first token is not a number are headers. Columns past the
/// sixth are ignored, and so is a lone fifth column.
inline std::vector<HkaRecord> parse_hka(std::istream& in) {
    std::vector<HkaRecord> out;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        const auto tok = detail::split_ws(line);
        if (tok.empty() || !detail::parse_real(tok[0])) continue;
        if (tok.size() < 4) throw ParseError("expected at least 4 columns, got " + std::to_string(tok.size()), no);
        auto field = [&](std::size_t i, const char* what) {
            auto v = detail::parse_real(tok[i]);
            if (!v) throw ParseError(std::string("malformed ") + what + " '" + std::string(tok[i]) + "'", no);
            return *v;
        };
        HkaRecord r;
        auto h = detail::parse_int(tok[0]);
        auto k = detail::parse_int(tok[1]);
        if (!h) throw ParseError("malformed h '" + std::string(tok[0]) + "'", no);
        if (!k) throw ParseError("malformed k '" + std::string(tok[1]) + "'", no);
        r.h = *h;
        r.k = *k;
        r.amp_obs = field(2, "amplitude");
        r.phase_obs = field(3, "phase");
        if (r.amp_obs == 0.0) throw ParseError("zero amplitude is not allowed", no);
        if (r.amp_obs < 0.0) throw ParseError("negative amplitude", no);
        if (tok.size() >= 6) {
            r.amp_sym = field(4, "symmetrized amplitude");
            r.phase_sym = field(5, "symmetrized phase");
            if (*r.amp_sym < 0.0) throw ParseError("negative symmetrized amplitude", no);
        }
        out.push_back(r);
    }
    return out;
}

inline std::vector<HkaRecord> read_hka(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_hka(in);
}

inline void format_hka(std::ostream& os, const std::vector<HkaRecord>& records) {
    if (records.empty()) throw InvalidArgumentError("no records to write");
    const bool sym = records.front().has_sym();
    for (const auto& r : records)
        if (r.has_sym() != sym) throw InvalidArgumentError("records mix 4- and 6-column layouts");
    os << (sym ? "h k amp_obs phase_obs amp_sym phase_sym\n" : "h k amp_obs phase_obs\n");
    char buf[160];
    for (const auto& r : records) {
        if (sym)
            std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g %.17g %.17g\n", r.h, r.k, r.amp_obs, r.phase_obs,
                          *r.amp_sym, *r.phase_sym);
        else
            std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", r.h, r.k, r.amp_obs, r.phase_obs);
        os << buf;
    }
}

inline void write_hka(const std::filesystem::path& path, const std::vector<HkaRecord>& records) {
    std::ostringstream ss;
    format_hka(ss, records);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << ss.str();
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::string hka_filename(std::string_view basename, PlaneGroup g) {
    return std::string(basename) + "_" + std::string(name(g)) + ".hka";
}

/// Observed and symmetrized coefficients of a fitted model as records.
inline std::vector<HkaRecord> to_hka_records(const GroupModel& m) {
    std::vector<HkaRecord> out;
    out.reserve(m.fcs_obs.size());
    for (std::size_t i = 0; i < m.fcs_obs.size(); ++i) {
        const auto& o = m.fcs_obs[i];
        const auto& s = m.fcs_sym[i];
        out.push_back({o.h, o.k, o.amplitude, o.phase, s.amplitude, s.phase});
    }
    return out;
}

/// Model for group g. Files with symmetrized columns are used verbatim, otherwise the group is
/// enforced here, origin refinement included.
inline GroupModel model_from_hka(const std::vector<HkaRecord>& records, PlaneGroup g, int origin_steps = 200) {
    if (records.empty()) throw InvalidArgumentError("no records for " + std::string(name(g)));
    std::vector<IndexedFC> obs, sym;
    const bool with_sym = records.front().has_sym();
    for (const auto& r : records) {
        if (r.has_sym() != with_sym) throw InvalidArgumentError("records mix 4- and 6-column layouts");
        obs.push_back({r.h, r.k, r.amp_obs, wrap_degrees(r.phase_obs)});
        if (with_sym) sym.push_back({r.h, r.k, *r.amp_sym, wrap_degrees(*r.phase_sym)});
    }
    if (with_sym) return model_from_pairs(std::move(obs), std::move(sym), g);
    return build_group_model(obs, g, origin_steps);
}

/// Group files named <basename>_<group>.hka found in dir. Other files are ignored.
inline std::map<PlaneGroup, std::filesystem::path> find_hka_files(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::map<PlaneGroup, fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".hka") continue;
        const std::string stem = e.path().stem().string();
        const auto us = stem.rfind('_');
        if (us == std::string::npos) continue;
        auto g = group_from_name(std::string_view(stem).substr(us + 1));
        if (!g) continue;
        if (out.count(*g))
            throw InvalidArgumentError("more than one file for " + std::string(name(*g)) + " in " + dir.string());
        out[*g] = e.path();
    }
    return out;
}

/// N unit-amplitude records whose symmetrized partners differ only in phase so that the
/// complex SSR of the pair set is exactly J. Spreads J over ceil(J/3) records.
inline std::vector<HkaRecord> synthetic_hka_records(double J, int N) {
    if (N <= 0) throw InvalidArgumentError("N must be positive");
    if (!(J >= 0.0)) throw InvalidArgumentError("J must be non-negative");
    const int n = J > 0.0 ? static_cast<int>(std::ceil(J / 3.0)) : 0;
    if (n > N) throw InvalidArgumentError("J too large for N records");
    const double theta = n > 0 ? rad2deg(std::acos(1.0 - J / (2.0 * n))) : 0.0;
    std::vector<HkaRecord> out;
    out.reserve(N);
    for (int i = 0; i < N; ++i) out.push_back({i + 1, 0, 1.0, 0.0, 1.0, i < n ? theta : 0.0});
    return out;
}

}  // namespace planesym
