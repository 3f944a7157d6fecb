#pragma once

// Orbits of Fourier coefficient indices, amplitude/phase symmetrization, origin
// refinement, reflection conditions and Fourier synthesis.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <vector>

#include "planesym/core.hpp"
#include "planesym/error.hpp"
#include "planesym/geometry.hpp"
#include "planesym/image.hpp"
#include "planesym/spectrum.hpp"

namespace planesym {

/// F(target) = F(source) * exp(i phase_shift), conjugated afterwards when `friedel` is set.
struct OrbitElement {
    Index2 source;
    Index2 target;
    double phase_shift = 0.0;  // degrees, [-180, 180)
    bool friedel = false;
};

/// -360 (h t1 + k t2) reduced to [-180, 180).
inline double translation_phase_shift(Index2 hk, const std::array<double, 2>& t) {
    return wrap_degrees(-360.0 * (hk.h * t[0] + hk.k * t[1]));
}

/// One element per operation (k of them), followed by the Friedel mates of each.
inline std::vector<OrbitElement> orbit(PlaneGroup g, Index2 hk) {
    require_primitive(g);
    if (hk.h == 0 && hk.k == 0) throw InvalidArgumentError("the origin of reciprocal space has no orbit");
    std::vector<OrbitElement> out;
    const auto ops = operations(g);
    out.reserve(2 * ops.size());
    for (const auto& op : ops) out.push_back({hk, apply_reciprocal(op.rot, hk), translation_phase_shift(hk, op.trans), false});
    for (std::size_t i = 0; i < ops.size(); ++i) {
        OrbitElement e = out[i];
        e.target = -e.target;
        e.friedel = true;
        out.push_back(e);
    }
    return out;
}

/// Distinct indices of the orbit, ignoring Friedel mates.
inline std::vector<Index2> orbit_indices(PlaneGroup g, Index2 hk) {
    std::vector<Index2> out;
    for (const auto& e : orbit(g, hk))
        if (!e.friedel && std::find(out.begin(), out.end(), e.target) == out.end()) out.push_back(e.target);
    return out;
}

/// True when some operation maps hk onto itself with a non-zero phase shift.
inline bool is_systematically_absent(PlaneGroup g, Index2 hk) {
    if (hk.h == 0 && hk.k == 0) return false;
    for (const auto& op : operations(g))
        if (apply_reciprocal(op.rot, hk) == hk && std::abs(translation_phase_shift(hk, op.trans)) > 1e-9) return true;
    return false;
}

/// True when hk lies on an index line on which some glide imposes a parity condition.
inline bool in_condition_class(PlaneGroup g, Index2 hk) {
    if (hk.h == 0 && hk.k == 0) return false;
    const int d = std::gcd(std::abs(hk.h), std::abs(hk.k));
    const Index2 prim{hk.h / d, hk.k / d};
    for (const auto& op : operations(g))
        if (!op.rot.is_identity() && apply_reciprocal(op.rot, hk) == hk &&
            std::abs(translation_phase_shift(prim, op.trans)) > 1e-9)
            return true;
    return false;
}

inline bool has_reflection_conditions(PlaneGroup g) {
    for (const auto& op : operations(g)) {
        if (op.rot.is_identity()) continue;
        if (op.rot.det() != -1) continue;
        for (int h = -2; h <= 2; ++h)
            for (int k = -2; k <= 2; ++k)
                if ((h || k) && apply_reciprocal(op.rot, {h, k}) == Index2{h, k} &&
                    std::abs(translation_phase_shift({h, k}, op.trans)) > 1e-9)
                    return true;
    }
    return false;
}

/// Predicate returning true for systematically absent (forbidden) indices.
inline std::function<bool(Index2)> reflection_conditions(PlaneGroup g) {
    require_primitive(g);
    return [g](Index2 hk) { return is_systematically_absent(g, hk); };
}

namespace detail {

/// Precomputed orbit structure of a fixed index list under one group.
class OrbitTable {
public:
    struct Link {
        std::size_t pos;  // position of the observed member
        double shift;     // radians
        bool friedel;
        cplx to_rep;    // exp(-i shift)
        cplx from_rep;  // exp(+i shift)
    };
    struct Orbit {
        std::vector<Link> elements;             // every element whose target is observed
        std::vector<std::size_t> members;        // distinct observed positions
        std::vector<Link> outputs;               // one link per member, same order as members
        bool extinct = false;
    };

    OrbitTable(const std::vector<Index2>& indices, PlaneGroup g) {
        require_primitive(g);
        std::map<Index2, std::size_t> where;
        for (std::size_t i = 0; i < indices.size(); ++i) where.emplace(indices[i], i);
        orbit_of_.assign(indices.size(), npos);
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (orbit_of_[i] != npos) continue;
            const Index2 rep = indices[i];
            if (rep.h == 0 && rep.k == 0) throw InvalidArgumentError("the (0,0) coefficient cannot be symmetrized");
            Orbit o;
            for (const auto& e : orbit(g, rep)) {
                if (!e.friedel && e.target == rep && std::abs(e.phase_shift) > 1e-9) o.extinct = true;
                auto it = where.find(e.target);
                if (it == where.end()) continue;
                const double sh = deg2rad(e.phase_shift);
                const Link l{it->second, sh, e.friedel, std::polar(1.0, -sh), std::polar(1.0, sh)};
                o.elements.push_back(l);
                if (orbit_of_[it->second] == npos) {
                    orbit_of_[it->second] = orbits_.size();
                    o.members.push_back(it->second);
                    o.outputs.push_back(l);
                }
            }
            orbits_.push_back(std::move(o));
        }
    }

    const std::vector<Orbit>& orbits() const { return orbits_; }
    std::size_t orbit_of(std::size_t pos) const { return orbit_of_[pos]; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<Orbit> orbits_;
    std::vector<std::size_t> orbit_of_;
};

/// Implied value of the representative from an observed member.
inline cplx implied(cplx member, const OrbitTable::Link& l) {
    const cplx z = l.friedel ? std::conj(member) : member;
    return z * l.to_rep;
}

inline cplx broadcast(cplx rep, const OrbitTable::Link& l) {
    const cplx z = rep * l.from_rep;
    return l.friedel ? std::conj(z) : z;
}

struct SymmetrizeOutput {
    std::vector<cplx> values;
    std::vector<double> amplitudes;
    std::vector<char> extinct;
    std::vector<char> flagged;  // vanishing weighted sum on a non-extinct orbit
};

/// Amplitudes: mean over present members. Phases: argument of the amplitude-weighted
/// complex sum of the implied representative values.
inline SymmetrizeOutput symmetrize_values(const std::vector<cplx>& obs, const OrbitTable& table,
                                          const std::vector<double>* amplitudes = nullptr) {
    SymmetrizeOutput out;
    out.values.assign(obs.size(), cplx{});
    out.amplitudes.assign(obs.size(), 0.0);
    out.extinct.assign(obs.size(), 0);
    out.flagged.assign(obs.size(), 0);
    for (const auto& o : table.orbits()) {
        if (o.extinct) {
            for (auto m : o.members) out.extinct[m] = 1;
            continue;
        }
        double amp = 0.0;
        for (auto m : o.members) amp += amplitudes ? (*amplitudes)[m] : std::abs(obs[m]);
        amp /= static_cast<double>(o.members.size());
        cplx sum{};
        double scale = 0.0;
        for (const auto& l : o.elements) {
            sum += implied(obs[l.pos], l);
            scale += std::abs(obs[l.pos]);
        }
        cplx rep;
        if (std::abs(sum) <= 1e-12 * scale || scale == 0.0) {
            rep = amp;
            for (auto m : o.members) out.flagged[m] = scale > 0.0;
        } else {
            rep = amp * sum / std::abs(sum);
        }
        for (std::size_t j = 0; j < o.members.size(); ++j) {
            out.values[o.members[j]] = broadcast(rep, o.outputs[j]);
            out.amplitudes[o.members[j]] = amp;
        }
    }
    return out;
}

}  // namespace detail

struct SymmetrizedSet {
    std::vector<IndexedFC> fcs;
    std::vector<char> extinct;  // forbidden by the group, symmetrized amplitude set to zero
    std::vector<char> flagged;  // phase undetermined (vanishing weighted sum), set to 0
};

/// Enforces the group on a Friedel-closed coefficient list. Output order matches input.
inline SymmetrizedSet symmetrize(const std::vector<IndexedFC>& fcs, PlaneGroup g) {
    std::vector<Index2> idx;
    std::vector<cplx> vals;
    std::vector<double> amps;
    idx.reserve(fcs.size());
    vals.reserve(fcs.size());
    amps.reserve(fcs.size());
    for (const auto& f : fcs) {
        idx.push_back(f.index());
        vals.push_back(f.value());
        amps.push_back(f.amplitude);
    }
    const detail::OrbitTable table(idx, g);
    auto res = detail::symmetrize_values(vals, table, &amps);
    SymmetrizedSet out;
    out.fcs.resize(fcs.size());
    for (std::size_t i = 0; i < fcs.size(); ++i) {
        out.fcs[i] = make_fc(idx[i], res.values[i]);
        out.fcs[i].amplitude = res.amplitudes[i];
    }
    // Friedel mates copied from their representatives so that pairs are exact conjugates
    std::map<Index2, std::size_t> where;
    for (std::size_t i = 0; i < idx.size(); ++i) where.emplace(idx[i], i);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (is_friedel_representative(idx[i])) continue;
        auto it = where.find(-idx[i]);
        if (it == where.end()) continue;
        const auto& m = out.fcs[it->second];
        out.fcs[i].amplitude = m.amplitude;
        out.fcs[i].phase = m.amplitude > 0.0 ? wrap_degrees(-m.phase) : 0.0;
    }
    out.extinct = std::move(res.extinct);
    out.flagged = std::move(res.flagged);
    return out;
}

inline std::vector<double> symmetrize_amplitudes(const std::vector<IndexedFC>& fcs, PlaneGroup g) {
    auto s = symmetrize(fcs, g);
    std::vector<double> out;
    for (const auto& f : s.fcs) out.push_back(f.amplitude);
    return out;
}

inline std::vector<double> symmetrize_phases(const std::vector<IndexedFC>& fcs, PlaneGroup g) {
    auto s = symmetrize(fcs, g);
    std::vector<double> out;
    for (const auto& f : s.fcs) out.push_back(f.phase);
    return out;
}

/// Symmetrized phase of one orbit in the trigonometric form: shifts removed, then
/// atan(S/C) with 180 degrees added when C < 0.
inline double trig_symmetrized_phase(const std::vector<double>& amplitudes, const std::vector<double>& phases,
                                     const std::vector<double>& shifts) {
    double s = 0.0, c = 0.0;
    for (std::size_t j = 0; j < phases.size(); ++j) {
        const double p = deg2rad(phases[j] - shifts[j]);
        s += amplitudes[j] * std::sin(p);
        c += amplitudes[j] * std::cos(p);
    }
    double deg;
    if (c > 0.0)
        deg = rad2deg(std::atan(s / c));
    else if (c < 0.0)
        deg = rad2deg(std::atan(s / c)) + 180.0;
    else
        deg = s > 0.0 ? 90.0 : s < 0.0 ? -90.0 : 0.0;
    return wrap_degrees(deg);
}

/// Same quantity in the complex form: arg sum |F_j| exp(i (phi_j - shift_j)).
inline double complex_symmetrized_phase(const std::vector<double>& amplitudes, const std::vector<double>& phases,
                                        const std::vector<double>& shifts) {
    cplx sum{};
    for (std::size_t j = 0; j < phases.size(); ++j) sum += std::polar(amplitudes[j], deg2rad(phases[j] - shifts[j]));
    return std::abs(sum) > 0.0 ? wrap_degrees(rad2deg(std::arg(sum))) : 0.0;
}

/// phi -> phi + 360 (h x0 + k y0).
inline std::vector<IndexedFC> apply_origin_shift(const std::vector<IndexedFC>& fcs, double x0, double y0) {
    std::vector<IndexedFC> out = fcs;
    for (auto& f : out) {
        const double turns = f.h * x0 + f.k * y0;
        f.phase = wrap_degrees(f.phase + 360.0 * (turns - std::round(turns)));
    }
    return out;
}

struct OriginResult {
    double x0 = 0.0;
    double y0 = 0.0;
    double residual = 0.0;  // degrees
};

namespace detail {

/// Phase residual after an origin shift, evaluated on one Friedel half (mates contribute equally).
class OriginObjective {
public:
    OriginObjective(const std::vector<IndexedFC>& fcs, PlaneGroup g) {
        for (const auto& f : fcs) {
            idx_.push_back(f.index());
            vals_.push_back(f.value());
            amps_.push_back(std::abs(vals_.back()));
        }
        table_ = std::make_unique<OrbitTable>(idx_, g);
        work_.resize(vals_.size());
        for (std::size_t i = 0; i < idx_.size(); ++i) {
            const auto& o = table_->orbits()[table_->orbit_of(i)];
            const bool counted = !o.extinct && is_friedel_representative(idx_[i]);
            if (counted) {
                half_.push_back(i);
                weight_ += std::abs(vals_[i]);
            }
        }
    }

    bool empty() const { return half_.empty() || weight_ == 0.0; }

    /// ramp(i) = exp(2 pi i (h x0 + k y0)) for every coefficient.
    template <typename RampFn>
    double evaluate_with(RampFn&& ramp) {
        for (std::size_t i = 0; i < vals_.size(); ++i) work_[i] = vals_[i] * ramp(i);
        double acc = 0.0;
        for (const auto& o : table_->orbits()) {
            if (o.extinct) continue;
            cplx sum{};
            for (const auto& l : o.elements) sum += implied(work_[l.pos], l);
            const bool vanishing = std::norm(sum) == 0.0;
            for (std::size_t j = 0; j < o.members.size(); ++j) {
                const std::size_t m = o.members[j];
                if (!is_friedel_representative(idx_[m])) continue;
                const double a = amps_[m];
                if (a == 0.0) continue;
                const cplx sym = broadcast(vanishing ? cplx{1.0} : sum, o.outputs[j]);
                acc += a * std::abs(std::arg(sym * std::conj(work_[m])));
            }
        }
        return rad2deg(acc / weight_);
    }

    double evaluate(double x0, double y0) {
        return evaluate_with([&](std::size_t i) {
            const double turns = idx_[i].h * x0 + idx_[i].k * y0;
            return std::polar(1.0, 2.0 * std::numbers::pi * (turns - std::round(turns)));
        });
    }

    const std::vector<Index2>& indices() const { return idx_; }

private:
    std::vector<Index2> idx_;
    std::vector<cplx> vals_;
    std::vector<double> amps_;
    std::vector<cplx> work_;
    std::unique_ptr<OrbitTable> table_;
    std::vector<std::size_t> half_;
    double weight_ = 0.0;
};

inline double centered_unit(double v) {
    double w = v - std::round(v);
    return w <= -0.5 ? w + 1.0 : w;
}

}  // namespace detail

/// Grid search over the cell at 1/steps resolution, then golden-section refinement along
/// each axis. Returns the shift in (-1/2, 1/2]; among equal residuals the smallest shift wins.
inline OriginResult refine_origin(const std::vector<IndexedFC>& fcs, PlaneGroup g, int steps = 200) {
    require_primitive(g);
    if (g == PlaneGroup::p1) throw InvalidArgumentError("p1 has no origin to refine");
    if (steps < 2) throw InvalidArgumentError("origin grid needs at least 2 steps");
    detail::OriginObjective obj(fcs, g);
    if (obj.empty()) return {0.0, 0.0, 0.0};

    const auto& idx = obj.indices();
    std::vector<cplx> table(static_cast<std::size_t>(steps));
    for (int s = 0; s < steps; ++s) table[static_cast<std::size_t>(s)] = std::polar(1.0, 2.0 * std::numbers::pi * s / steps);
    std::vector<long> hmod(idx.size()), kmod(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        hmod[i] = ((idx[i].h % steps) + steps) % steps;
        kmod[i] = ((idx[i].k % steps) + steps) % steps;
    }
    std::vector<double> grid(static_cast<std::size_t>(steps) * static_cast<std::size_t>(steps));
    double best = 1e300;
    for (int j = 0; j < steps; ++j)
        for (int i = 0; i < steps; ++i) {
            const double v = obj.evaluate_with([&](std::size_t n) {
                return table[static_cast<std::size_t>((hmod[n] * i + kmod[n] * j) % steps)];
            });
            grid[static_cast<std::size_t>(j) * static_cast<std::size_t>(steps) + static_cast<std::size_t>(i)] = v;
            best = std::min(best, v);
        }
    const double tie = 1e-9 * std::max(1.0, best);
    double bx = 0.0, by = 0.0, bnorm = 1e300;
    for (int j = 0; j < steps; ++j)
        for (int i = 0; i < steps; ++i) {
            if (grid[static_cast<std::size_t>(j) * static_cast<std::size_t>(steps) + static_cast<std::size_t>(i)] > best + tie) continue;
            const double x = detail::centered_unit(static_cast<double>(i) / steps);
            const double y = detail::centered_unit(static_cast<double>(j) / steps);
            const double n = x * x + y * y;
            if (n < bnorm - 1e-15) {
                bnorm = n;
                bx = x;
                by = y;
            }
        }

    OriginResult res{bx, by, obj.evaluate(bx, by)};
    const double h = 1.0 / steps;
    auto golden = [&](double lo, double hi, auto&& f) {
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
        double fc = f(c), fd = f(d);
        for (int it = 0; it < 40; ++it) {
            if (fc < fd) {
                hi = d;
                d = c;
                fd = fc;
                c = hi - phi * (hi - lo);
                fc = f(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + phi * (hi - lo);
                fd = f(d);
            }
        }
        return fc < fd ? c : d;
    };
    for (int round = 0; round < 2; ++round) {
        const double x = golden(res.x0 - h, res.x0 + h, [&](double v) { return obj.evaluate(v, res.y0); });
        const double vx = obj.evaluate(x, res.y0);
        if (vx < res.residual - tie) res = {x, res.y0, vx};
        const double y = golden(res.y0 - h, res.y0 + h, [&](double v) { return obj.evaluate(res.x0, v); });
        const double vy = obj.evaluate(res.x0, y);
        if (vy < res.residual - tie) res = {res.x0, y, vy};
    }
    res.x0 = detail::centered_unit(res.x0);
    res.y0 = detail::centered_unit(res.y0);
    return res;
}

inline bool is_friedel_closed(const std::vector<IndexedFC>& fcs, double tol = 1e-9) {
    std::map<Index2, const IndexedFC*> where;
    for (const auto& f : fcs) where.emplace(f.index(), &f);
    for (const auto& f : fcs) {
        auto it = where.find(-f.index());
        if (it == where.end()) return false;
        const cplx a = f.value(), b = std::conj(it->second->value());
        if (std::abs(a - b) > tol * std::max(1.0, std::abs(a))) return false;
    }
    return true;
}

/// (1/Q^2) sum F exp(-2 pi i (f . r)/Q) with f = h a* + k b* and r measured from pixel (Q/2, Q/2).
inline GrayImage synthesize_image_on_lattice(const std::vector<IndexedFC>& fcs, const ReciprocalLattice& lat, int q) {
    if (q <= 0) throw InvalidArgumentError("synthesis size must be positive");
    if (!is_friedel_closed(fcs))
        throw InvalidArgumentError("coefficient list is not Friedel closed, synthesis would be complex valued");
    GrayImage out(q, q);
    const auto n = static_cast<std::size_t>(q);
    std::vector<cplx> px(n), py(n);
    const double scale = 1.0 / (static_cast<double>(q) * q);
    for (const auto& f : fcs) {
        const bool dc = f.h == 0 && f.k == 0;
        if (!dc && !is_friedel_representative(f.index())) continue;
        const Vec2 fr = lat.node(f.index());
        for (int i = 0; i < q; ++i) {
            px[static_cast<std::size_t>(i)] = std::polar(1.0, -2.0 * std::numbers::pi * fr.x * (i - q / 2) / q);
            py[static_cast<std::size_t>(i)] = std::polar(1.0, -2.0 * std::numbers::pi * fr.y * (i - q / 2) / q);
        }
        const cplx v = f.value() * (dc ? scale : 2.0 * scale);
        for (int y = 0; y < q; ++y) {
            const cplx vy = v * py[static_cast<std::size_t>(y)];
            for (int x = 0; x < q; ++x) out.at(x, y) += (vy * px[static_cast<std::size_t>(x)]).real();
        }
    }
    return out;
}

/// Real-valued synthesis (1/Q^2) sum F exp(-2 pi i (x h + y k)/Q) with (h,k) taken as
/// integer frequencies of a Q x Q grid. Throws when the list is not Friedel closed.
inline GrayImage synthesize_image(const std::vector<IndexedFC>& fcs, int q) {
    return synthesize_image_on_lattice(fcs, ReciprocalLattice{{1.0, 0.0}, {0.0, 1.0}}, q);
}

}  // namespace planesym
