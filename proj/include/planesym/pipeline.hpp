#pragma once

// Image to classification: selection, DFT, peaks, lattice, extraction, per-group models, selection stage.

#include <optional>
#include <string>
#include <vector>

#include "planesym/core.hpp"
#include "planesym/image.hpp"
#include "planesym/model.hpp"
#include "planesym/parallel.hpp"
#include "planesym/selection.hpp"
#include "planesym/spectrum.hpp"

namespace planesym {

struct AnalysisConfig {
    SelectionShape shape = SelectionShape::square;
    int size = 1024;
    std::optional<PixelCoord> center;  // default: image center
    std::optional<double> radius_cut;  // default: size / 8
    double min_amp = default_min_amp;
    std::vector<PlaneGroup> groups{scored_groups.begin(), scored_groups.end()};
    std::vector<PlaneGroup> subset = default_subset();
    int origin_steps = 200;
};

struct AnalysisResult {
    ReciprocalLattice reciprocal;
    DirectLattice direct;
    std::vector<Peak> peaks;
    std::vector<IndexedFC> fcs;
    std::vector<GroupModel> models;
    ClassificationReport report;
};

/// Fits every requested group to an already extracted coefficient set and classifies.
inline std::vector<GroupModel> build_models(const std::vector<IndexedFC>& fcs, const std::vector<PlaneGroup>& groups,
                                            int origin_steps = 200) {
    std::vector<GroupModel> models(groups.size());
    parallel_for(groups.size(), [&](std::size_t i) { models[i] = build_group_model(fcs, groups[i], origin_steps); });
    return models;
}

/// Extraction stages on a selected power-of-two square.
inline AnalysisResult analyze_selection(const GrayImage& sel, const AnalysisConfig& cfg) {
    if (sel.width() != sel.height() || !is_power_of_two(sel.width()))
        throw InvalidArgumentError("selection must be a power-of-two square");
    const int q = sel.width();
    const double rc = cfg.radius_cut.value_or(default_radius_cut(q));
    AnalysisResult r;
    const Spectrum s = dft2_centered(sel);
    r.peaks = detect_peaks(amplitude_map(s), cfg.min_amp, rc);
    try {
        r.reciprocal = fit_reciprocal_lattice(r.peaks);
    } catch (const DegenerateLatticeError& e) {
        throw InsufficientPeriodicityError(std::string("insufficient periodic repeats: ") + e.what());
    }
    r.direct = direct_lattice(r.reciprocal, q);
    r.fcs = index_and_extract(s, r.reciprocal, rc, cfg.min_amp);
    if (r.fcs.size() < 4)
        throw InsufficientPeriodicityError("insufficient periodic repeats: only " + std::to_string(r.fcs.size()) +
                                           " structure-bearing coefficients extracted");
    r.models = build_models(r.fcs, cfg.groups, cfg.origin_steps);
    r.report = classify(to_model_inputs(r.models), cfg.subset);
    return r;
}

inline AnalysisResult analyze_image(const GrayImage& img, const AnalysisConfig& cfg = {}) {
    const PixelCoord c = cfg.center.value_or(PixelCoord{img.width() / 2, img.height() / 2});
    return analyze_selection(select_region(img, cfg.shape, cfg.size, c), cfg);
}

}  // namespace planesym
