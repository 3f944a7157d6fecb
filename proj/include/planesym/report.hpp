#pragma once

// Table-style CSV and JSON output of a classification report.

#include <nlohmann/json.hpp>

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "planesym/core.hpp"
#include "planesym/selection.hpp"

namespace planesym {

inline const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> c{"group", "J_FC",   "F_res",        "phi_res",  "crisp_like_suggestion",
                                            "kl_best", "G-AIC", "G-AW(full)", "G-AW(subset)", "E_best_j",
                                            "N",     "epsilon_sq"};
    return c;
}

/// Evidence ratio of p6 against p3 when both were scored.
inline std::optional<double> evidence_p6_p3(const ClassificationReport& rep) {
    const ModelScore* p6 = rep.find(PlaneGroup::p6);
    const ModelScore* p3 = rep.find(PlaneGroup::p3);
    if (!p6 || !p3) return std::nullopt;
    return evidence_ratio(p6->gaic, p3->gaic);
}

namespace detail {

inline std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string kl_best_label(const ClassificationReport& rep) {
    return rep.indeterminate ? "p1-indeterminate" : std::string(name(rep.kl_best));
}

}  // namespace detail

inline void write_report_csv(std::ostream& os, const ClassificationReport& rep) {
    const auto& cols = report_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    const std::string crisp(name(rep.crisp_like_suggestion));
    const std::string best = detail::kl_best_label(rep);
    for (const auto& s : rep.scores) {
        using detail::fmt_real;
        os << name(s.group) << ',' << fmt_real(s.J) << ',' << fmt_real(s.F_res) << ',' << fmt_real(s.phi_res) << ','
           << crisp << ',' << best << ',' << fmt_real(s.gaic) << ',' << fmt_real(s.weight_full) << ','
           << (s.weight_subset ? fmt_real(*s.weight_subset) : "") << ',' << fmt_real(s.E_best) << ',' << s.N << ','
           << fmt_real(rep.epsilon_sq) << '\n';
    }
}

inline nlohmann::json report_to_json(const ClassificationReport& rep) {
    using nlohmann::json;
    json rows = json::array();
    for (const auto& s : rep.scores) {
        json r;
        r["group"] = name(s.group);
        r["J_FC"] = s.J;
        r["F_res"] = s.F_res;
        r["phi_res"] = s.phi_res;
        r["crisp_like_suggestion"] = name(rep.crisp_like_suggestion);
        r["kl_best"] = detail::kl_best_label(rep);
        r["G-AIC"] = s.gaic;
        r["G-AW(full)"] = s.weight_full;
        r["G-AW(subset)"] = s.weight_subset ? json(*s.weight_subset) : json(nullptr);
        r["E_best_j"] = s.E_best;
        r["N"] = s.N;
        r["epsilon_sq"] = rep.epsilon_sq;
        r["Ao_over_Ae"] = s.Ao_over_Ae ? json(*s.Ao_over_Ae) : json(nullptr);
        rows.push_back(std::move(r));
    }
    json conf = json::array();
    for (const auto& c : rep.confidences)
        conf.push_back({{"higher", name(c.higher)}, {"lower", name(c.lower)}, {"K", c.K}, {"K_crit", c.K_crit},
                        {"C", c.C}});
    json subset = json::array();
    for (auto g : rep.subset) subset.push_back(name(g));
    const auto e63 = evidence_p6_p3(rep);
    return {{"kl_best", detail::kl_best_label(rep)},
            {"indeterminate", rep.indeterminate},
            {"epsilon_sq", rep.epsilon_sq},
            {"crisp_like_suggestion", name(rep.crisp_like_suggestion)},
            {"subset", subset},
            {"E_p6_p3", e63 ? json(*e63) : json(nullptr)},
            {"rows", rows},
            {"confidences", conf},
            {"warnings", rep.warnings}};
}

inline void write_report_json(std::ostream& os, const ClassificationReport& rep) {
    os << report_to_json(rep).dump(2) << '\n';
}

}  // namespace planesym
