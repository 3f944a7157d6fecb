#pragma once

// One fitted plane-group model: origin refinement, symmetrization and residuals.

#include <vector>

#include "planesym/core.hpp"
#include "planesym/residuals.hpp"
#include "planesym/selection.hpp"
#include "planesym/spectrum.hpp"
#include "planesym/symmetry.hpp"

namespace planesym {

struct GroupModel {
    PlaneGroup group = PlaneGroup::p1;
    double x0 = 0.0;  // origin shift, fractional cell coordinates
    double y0 = 0.0;
    std::vector<IndexedFC> fcs_obs;  // observed, after the origin shift
    std::vector<IndexedFC> fcs_sym;
    std::vector<char> extinct;
    std::vector<char> flagged;
    int N = 0;
    ResidualSet residuals;
};

/// Refines the origin for the group, shifts the observed coefficients there and enforces the group.
inline GroupModel build_group_model(const std::vector<IndexedFC>& fcs, PlaneGroup g, int origin_steps = 200) {
    require_primitive(g);
    if (fcs.empty()) throw InvalidArgumentError("no Fourier coefficients to model");
    GroupModel m;
    m.group = g;
    if (g != PlaneGroup::p1) {
        const OriginResult o = refine_origin(fcs, g, origin_steps);
        m.x0 = o.x0;
        m.y0 = o.y0;
    }
    m.fcs_obs = apply_origin_shift(fcs, m.x0, m.y0);
    auto sym = symmetrize(m.fcs_obs, g);
    m.fcs_sym = std::move(sym.fcs);
    m.extinct = std::move(sym.extinct);
    m.flagged = std::move(sym.flagged);
    m.residuals = compute_residuals(m.fcs_obs, m.fcs_sym, g, m.extinct);
    m.N = m.residuals.N;
    return m;
}

/// Residuals of a model whose symmetrized coefficients are given, e.g. read from a file.
inline GroupModel model_from_pairs(std::vector<IndexedFC> obs, std::vector<IndexedFC> sym, PlaneGroup g) {
    require_primitive(g);
    if (obs.empty()) throw InvalidArgumentError("no Fourier coefficients to model");
    if (obs.size() != sym.size()) throw InvalidArgumentError("observed and symmetrized lists differ in length");
    GroupModel m;
    m.group = g;
    m.extinct.assign(obs.size(), 0);
    m.flagged.assign(obs.size(), 0);
    for (std::size_t i = 0; i < obs.size(); ++i)
        m.extinct[i] = sym[i].amplitude == 0.0 && is_systematically_absent(g, obs[i].index());
    m.fcs_obs = std::move(obs);
    m.fcs_sym = std::move(sym);
    m.residuals = compute_residuals(m.fcs_obs, m.fcs_sym, g, m.extinct);
    m.N = m.residuals.N;
    return m;
}

inline ModelInput to_model_input(const GroupModel& m) {
    ModelInput in;
    in.group = m.group;
    in.J = m.residuals.J_FC;
    in.N = m.N;
    in.F_res = m.residuals.F_res;
    in.phi_res = m.residuals.phi_res;
    in.Ao_over_Ae = m.residuals.Ao_over_Ae;
    return in;
}

inline std::vector<ModelInput> to_model_inputs(const std::vector<GroupModel>& ms) {
    std::vector<ModelInput> out;
    out.reserve(ms.size());
    for (const auto& m : ms) out.push_back(to_model_input(m));
    return out;
}

}  // namespace planesym
