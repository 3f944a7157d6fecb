#pragma once

// Geometric AIC model selection over the plane group hierarchy: climb tests, noise
// estimate, G-AIC, Akaike weights, evidence ratios and confidence levels.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "planesym/core.hpp"
#include "planesym/error.hpp"

namespace planesym {

/// Per-model input to the selection stage.
struct ModelInput {
    PlaneGroup group = PlaneGroup::p2;
    double J = 0.0;  // sum of squared complex residuals
    int N = 0;
    double F_res = 0.0;
    double phi_res = 0.0;
    std::optional<double> Ao_over_Ae;
};

struct ModelScore {
    PlaneGroup group = PlaneGroup::p2;
    double J = 0.0;
    int N = 0;
    int k = 0;
    double F_res = 0.0;
    double phi_res = 0.0;
    std::optional<double> Ao_over_Ae;
    double gaic = 0.0;
    double delta = 0.0;
    double likelihood = 0.0;
    double weight_full = 0.0;            // percent
    std::optional<double> weight_subset;  // percent, members of the subset only
    double E_best = 1.0;                 // evidence ratio of the K-L-best model against this one
};

struct ConfidenceLevel {
    PlaneGroup higher = PlaneGroup::p2;  // more symmetric model m
    PlaneGroup lower = PlaneGroup::p2;   // maximal subgroup l
    double K = 0.0;
    double K_crit = 0.0;
    double C = 0.0;  // percent
};

struct ClassificationReport {
    std::vector<ModelScore> scores;
    PlaneGroup kl_best = PlaneGroup::p1;
    bool indeterminate = false;
    double epsilon_sq = 0.0;
    PlaneGroup crisp_like_suggestion = PlaneGroup::p1;
    std::vector<PlaneGroup> subset;
    std::vector<ConfidenceLevel> confidences;
    std::vector<std::string> warnings;

    const ModelScore* find(PlaneGroup g) const {
        for (const auto& s : scores)
            if (s.group == g) return &s;
        return nullptr;
    }
};

/// J_m/J_l < 1 + 2 (k_m - (N_m/N_l) k_l) / (k_m (k_l - 1)).
inline bool climb_allowed(double J_m, double J_l, int k_m, int k_l, int N_m, int N_l) {
    if (k_l < 2) throw InvalidArgumentError("climb test undefined for k_l < 2");
    if (k_m <= 0 || N_m <= 0 || N_l <= 0) throw InvalidArgumentError("climb test needs positive k and N");
    if (J_l == 0.0) throw DegenerateBaselineError("climb test undefined: subgroup residual is zero");
    if (J_l < 0.0 || J_m < 0.0) throw InvalidArgumentError("residuals must be non-negative");
    const double threshold =
        1.0 + 2.0 * (k_m - (static_cast<double>(N_m) / N_l) * k_l) / (static_cast<double>(k_m) * (k_l - 1));
    return J_m / J_l < threshold;
}

/// Equal-N form.
inline double climb_threshold(int k_m, int k_l) {
    return 1.0 + 2.0 * (k_m - k_l) / (static_cast<double>(k_m) * (k_l - 1));
}

inline constexpr double perfect_fit_tolerance = 1e-12;

namespace detail {

inline bool climb_or_perfect(const ModelInput& m, const ModelInput& l) {
    try {
        return climb_allowed(m.J, l.J, multiplicity(m.group), multiplicity(l.group), m.N, l.N);
    } catch (const DegenerateBaselineError&) {
        return m.J < perfect_fit_tolerance;
    }
}

}  // namespace detail

/// Starts from the k = 2 or 3 model with the smallest residual and climbs to a supergroup
/// when the test passes against every scored maximal subgroup and at least one of those is
/// reachable. Returns the reachable model of largest k, ties to the smaller residual; nullopt
/// when no start exists or every residual vanishes.
inline std::optional<PlaneGroup> find_kl_best(const std::vector<ModelInput>& models) {
    std::map<PlaneGroup, const ModelInput*> by;
    for (const auto& m : models) {
        require_primitive(m.group);
        by[m.group] = &m;
    }
    bool all_zero = true;
    for (const auto& m : models) all_zero = all_zero && m.J < perfect_fit_tolerance;
    if (models.empty() || all_zero) return std::nullopt;

    const ModelInput* start = nullptr;
    for (const auto& m : models) {
        const int k = multiplicity(m.group);
        if ((k == 2 || k == 3) && (!start || m.J < start->J)) start = &m;
    }
    if (!start) return std::nullopt;

    std::set<PlaneGroup> reachable{start->group};
    // supergroups have strictly larger k, so visiting by increasing k settles every node once
    std::vector<const ModelInput*> order;
    for (const auto& m : models) order.push_back(&m);
    std::stable_sort(order.begin(), order.end(), [](const ModelInput* a, const ModelInput* b) {
        return multiplicity(a->group) < multiplicity(b->group);
    });
    for (const ModelInput* m : order) {
        if (multiplicity(m->group) < 4) continue;
        bool any_reachable = false, all_pass = true;
        for (auto sub : maximal_subgroups(m->group)) {
            auto it = by.find(sub);
            if (it == by.end()) continue;
            any_reachable = any_reachable || reachable.count(sub);
            all_pass = all_pass && detail::climb_or_perfect(*m, *it->second);
        }
        if (any_reachable && all_pass) reachable.insert(m->group);
    }
    const ModelInput* best = nullptr;
    for (auto g : reachable) {
        const ModelInput* m = by[g];
        if (!best || multiplicity(m->group) > multiplicity(best->group) ||
            (multiplicity(m->group) == multiplicity(best->group) && m->J < best->J))
            best = m;
    }
    return best->group;
}

/// J / (N - N/k).
inline double estimate_noise(double J_best, int N, int k) {
    if (k <= 1 || N <= 0) throw InvalidArgumentError("noise estimate needs k > 1 and N > 0");
    return J_best / (N - static_cast<double>(N) / k);
}

/// J + 2 (N/k) eps^2.
inline double gaic(double J, int N, int k, double epsilon_sq) {
    if (k <= 0) throw InvalidArgumentError("multiplicity must be positive");
    return J + 2.0 * (static_cast<double>(N) / k) * epsilon_sq;
}

struct AkaikeWeights {
    std::vector<double> deltas;
    std::vector<double> likelihoods;
    std::vector<double> weights;  // percent
};

inline AkaikeWeights akaike_weights(const std::vector<double>& gaics) {
    if (gaics.empty()) throw InvalidArgumentError("Akaike weights need at least one model");
    AkaikeWeights w;
    const double mn = *std::min_element(gaics.begin(), gaics.end());
    double total = 0.0;
    for (double g : gaics) {
        w.deltas.push_back(g - mn);
        w.likelihoods.push_back(std::exp(-0.5 * (g - mn)));
        total += w.likelihoods.back();
    }
    for (double l : w.likelihoods) w.weights.push_back(100.0 * l / total);
    return w;
}

/// exp(-(gaic_i - gaic_j)/2): evidence for model i over model j.
inline double evidence_ratio(double gaic_i, double gaic_j) { return std::exp(-0.5 * (gaic_i - gaic_j)); }

/// Information content K of the data for model m over its subgroup l, the critical value and the
/// confidence level C = 100 (1 - K)/(1 - K_crit).
inline ConfidenceLevel confidence(double J_m, double J_l, int k_m, int k_l) {
    if (J_l == 0.0) throw DegenerateBaselineError("confidence undefined: subgroup residual is zero");
    if (k_l < 2 || k_m <= k_l) throw InvalidArgumentError("confidence needs 2 <= k_l < k_m");
    const double kl = k_l, km = k_m;
    ConfidenceLevel c;
    c.K = std::sqrt((J_m + 2.0 * J_l * kl / (km * (kl - 1.0))) / (J_l * (kl + 1.0) / (kl - 1.0)));
    c.K_crit = std::sqrt((km - km / kl + 2.0) / (km + km / kl));
    c.C = 100.0 * (1.0 - c.K) / (1.0 - c.K_crit);
    return c;
}

inline const std::vector<PlaneGroup>& default_subset() {
    static const std::vector<PlaneGroup> s{PlaneGroup::p2, PlaneGroup::p3, PlaneGroup::p6};
    return s;
}

/// Full selection pass over the scored models.
inline ClassificationReport classify(const std::vector<ModelInput>& models,
                                     const std::vector<PlaneGroup>& subset = default_subset()) {
    if (models.empty()) throw InvalidArgumentError("nothing to classify");
    std::set<PlaneGroup> seen;
    for (const auto& m : models) {
        require_primitive(m.group);
        if (m.group == PlaneGroup::p1) throw InvalidArgumentError("p1 takes no part in the selection");
        if (!seen.insert(m.group).second) throw InvalidArgumentError("duplicate model " + std::string(name(m.group)));
        if (m.N <= 0) throw InvalidArgumentError("model " + std::string(name(m.group)) + " has no coefficients");
    }

    ClassificationReport rep;
    auto best = find_kl_best(models);
    const ModelInput* best_model = nullptr;
    if (best) {
        rep.kl_best = *best;
        for (const auto& m : models)
            if (m.group == *best) best_model = &m;
        rep.epsilon_sq = estimate_noise(best_model->J, best_model->N, multiplicity(best_model->group));
    } else {
        rep.indeterminate = true;
        rep.kl_best = PlaneGroup::p1;
        rep.warnings.push_back("no K-L-best model could be determined (p1-indeterminate)");
    }

    std::vector<double> gaics;
    for (const auto& m : models) {
        ModelScore s;
        s.group = m.group;
        s.J = m.J;
        s.N = m.N;
        s.k = multiplicity(m.group);
        s.F_res = m.F_res;
        s.phi_res = m.phi_res;
        s.Ao_over_Ae = m.Ao_over_Ae;
        s.gaic = gaic(m.J, m.N, s.k, rep.epsilon_sq);
        gaics.push_back(s.gaic);
        rep.scores.push_back(s);
    }
    const auto full = akaike_weights(gaics);
    for (std::size_t i = 0; i < rep.scores.size(); ++i) {
        rep.scores[i].delta = full.deltas[i];
        rep.scores[i].likelihood = full.likelihoods[i];
        rep.scores[i].weight_full = full.weights[i];
    }

    std::vector<std::size_t> members;
    for (auto g : subset)
        for (std::size_t i = 0; i < rep.scores.size(); ++i)
            if (rep.scores[i].group == g && std::find(members.begin(), members.end(), i) == members.end())
                members.push_back(i);
    for (auto i : members) rep.subset.push_back(rep.scores[i].group);
    if (!members.empty()) {
        std::vector<double> sg;
        for (auto i : members) sg.push_back(rep.scores[i].gaic);
        const auto sw = akaike_weights(sg);
        for (std::size_t j = 0; j < members.size(); ++j) rep.scores[members[j]].weight_subset = sw.weights[j];
    }

    const double gaic_best = best_model ? gaic(best_model->J, best_model->N, multiplicity(best_model->group), rep.epsilon_sq)
                                        : *std::min_element(gaics.begin(), gaics.end());
    for (auto& s : rep.scores) s.E_best = evidence_ratio(gaic_best, s.gaic);

    const ModelInput* crisp = &models.front();
    for (const auto& m : models)
        if (m.phi_res < crisp->phi_res) crisp = &m;
    rep.crisp_like_suggestion = crisp->group;

    std::map<PlaneGroup, const ModelInput*> by;
    for (const auto& m : models) by[m.group] = &m;
    for (const auto& [g, m] : by)
        for (auto sub : maximal_subgroups(g)) {
            auto it = by.find(sub);
            if (it == by.end() || it->second->J == 0.0) continue;
            const ModelInput& l = *it->second;
            if (!climb_allowed(m->J, l.J, multiplicity(g), multiplicity(sub), m->N, l.N)) continue;
            ConfidenceLevel c = confidence(m->J, l.J, multiplicity(g), multiplicity(sub));
            c.higher = g;
            c.lower = sub;
            rep.confidences.push_back(c);
        }

    if (best) {
        const auto argmin = std::min_element(rep.scores.begin(), rep.scores.end(),
                                             [](const ModelScore& a, const ModelScore& b) { return a.gaic < b.gaic; });
        if (argmin->group != rep.kl_best && argmin->gaic < gaic_best - 1e-12 * std::max(1.0, std::abs(gaic_best)))
            rep.warnings.push_back("smallest G-AIC model " + std::string(name(argmin->group)) +
                                   " differs from the K-L-best model " + std::string(name(rep.kl_best)));
    }
    return rep;
}

}  // namespace planesym
