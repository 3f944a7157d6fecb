#pragma once

// Amplitude and phase residuals, extinction ratios and the sums of squared residuals
// used by the information criterion.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "planesym/core.hpp"
#include "planesym/error.hpp"
#include "planesym/geometry.hpp"
#include "planesym/spectrum.hpp"
#include "planesym/symmetry.hpp"

namespace planesym {

struct ResidualSet {
    double F_res = 0.0;    // percent
    double phi_res = 0.0;  // degrees
    std::optional<double> Ao_over_Ae;
    double J_FC = 0.0;
    double J_L = 0.0;
    int N = 0;
};

namespace detail {

inline void require_paired(const std::vector<IndexedFC>& obs, const std::vector<IndexedFC>& sym) {
    if (obs.size() != sym.size()) throw InvalidArgumentError("observed and symmetrized lists differ in length");
}

}  // namespace detail

/// 100 * sum ||F_obs| - |F_sym|| / sum |F_obs|.
inline double amp_residual(const std::vector<IndexedFC>& obs, const std::vector<IndexedFC>& sym) {
    detail::require_paired(obs, sym);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        num += std::abs(obs[i].amplitude - sym[i].amplitude);
        den += obs[i].amplitude;
    }
    if (!(den > 0.0)) throw InvalidArgumentError("amplitude residual undefined: observed amplitudes are all zero");
    return 100.0 * num / den;
}

/// sum |F_obs| |dphi| / sum |F_obs| with dphi wrapped to [-180, 180). Entries with a zero in
/// `skip` are used; `skip` may be empty.
inline double phase_residual(const std::vector<IndexedFC>& obs, const std::vector<IndexedFC>& sym,
                             const std::vector<char>& skip = {}) {
    detail::require_paired(obs, sym);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (!skip.empty() && skip[i]) continue;
        num += obs[i].amplitude * std::abs(wrap_degrees(obs[i].phase - sym[i].phase));
        den += obs[i].amplitude;
    }
    if (!(den > 0.0)) throw InvalidArgumentError("phase residual undefined: zero total weight");
    return num / den;
}

/// Mean observed amplitude of forbidden coefficients over the mean observed amplitude of the
/// allowed ones on the same conditioned index lines. Absent for groups without conditions.
inline std::optional<double> extinction_ratio(const std::vector<IndexedFC>& obs, PlaneGroup g) {
    if (!has_reflection_conditions(g)) return std::nullopt;
    double fsum = 0.0, esum = 0.0;
    int fn = 0, en = 0;
    for (const auto& f : obs) {
        if (!in_condition_class(g, f.index())) continue;
        if (is_systematically_absent(g, f.index())) {
            fsum += f.amplitude;
            ++fn;
        } else {
            esum += f.amplitude;
            ++en;
        }
    }
    if (fn == 0) return 0.0;
    if (en == 0 || esum == 0.0) return std::numeric_limits<double>::infinity();
    return (fsum / fn) / (esum / en);
}

/// Divides observed and symmetrized amplitudes by the largest observed amplitude.
inline void normalize_amplitudes(std::vector<IndexedFC>& obs, std::vector<IndexedFC>& sym) {
    double mx = 0.0;
    for (const auto& f : obs) mx = std::max(mx, f.amplitude);
    if (!(mx > 0.0)) throw InvalidArgumentError("cannot normalize: largest observed amplitude is zero");
    for (auto& f : obs) f.amplitude /= mx;
    for (auto& f : sym) f.amplitude /= mx;
}

inline void normalize_amplitudes(std::vector<IndexedFC>& obs) {
    double mx = 0.0;
    for (const auto& f : obs) mx = std::max(mx, f.amplitude);
    if (!(mx > 0.0)) throw InvalidArgumentError("cannot normalize: largest observed amplitude is zero");
    for (auto& f : obs) f.amplitude /= mx;
}

/// sum |F_obs - F_sym|^2 over complex coefficients.
inline double ssr_fc(const std::vector<IndexedFC>& obs, const std::vector<IndexedFC>& sym) {
    detail::require_paired(obs, sym);
    double s = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) s += std::norm(obs[i].value() - sym[i].value());
    return s;
}

/// sum (|F_obs| - |F_sym|)^2.
inline double ssr_laue(const std::vector<IndexedFC>& obs, const std::vector<IndexedFC>& sym) {
    detail::require_paired(obs, sym);
    double s = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) s += std::pow(obs[i].amplitude - sym[i].amplitude, 2);
    return s;
}

/// All residuals of one model; the SSRs use amplitudes normalized by the largest observed one.
inline ResidualSet compute_residuals(const std::vector<IndexedFC>& obs, const std::vector<IndexedFC>& sym,
                                     PlaneGroup g, const std::vector<char>& extinct = {}) {
    ResidualSet r;
    r.F_res = amp_residual(obs, sym);
    bool any_phase = false;
    for (std::size_t i = 0; i < obs.size(); ++i) any_phase = any_phase || extinct.empty() || !extinct[i];
    r.phi_res = any_phase ? phase_residual(obs, sym, extinct) : 0.0;
    r.Ao_over_Ae = extinction_ratio(obs, g);
    auto no = obs;
    auto ns = sym;
    normalize_amplitudes(no, ns);
    r.J_FC = ssr_fc(no, ns);
    r.J_L = ssr_laue(no, ns);
    r.N = static_cast<int>(obs.size());
    return r;
}

}  // namespace planesym
