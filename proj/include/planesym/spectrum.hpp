#pragma once

// Centered DFT, amplitude maps, peak detection, reciprocal lattice fitting and
// extraction of the structure-bearing Fourier coefficients.

#include <algorithm>
#include <cmath>
#include <map>
#include <complex>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "planesym/core.hpp"
#include "planesym/error.hpp"
#include "planesym/fft.hpp"
#include "planesym/geometry.hpp"
#include "planesym/image.hpp"
#include "planesym/imageio.hpp"

namespace planesym {

using cplx = std::complex<double>;

/// Square grid indexed by (h,k) in [-Q/2, Q/2-1]^2 with (0,0) at the center.
template <typename T>
class CenteredGrid {
public:
    CenteredGrid() = default;
    explicit CenteredGrid(int q, T fill = T{}) : q_(q), data_(static_cast<std::size_t>(q) * static_cast<std::size_t>(q), fill) {}

    int size() const { return q_; }
    int lo() const { return -q_ / 2; }
    int hi() const { return q_ / 2 - 1; }
    bool contains(int h, int k) const { return h >= lo() && h <= hi() && k >= lo() && k <= hi(); }

    T& at(int h, int k) { return data_[offset(h, k)]; }
    const T& at(int h, int k) const { return data_[offset(h, k)]; }

    std::vector<T>& raw() { return data_; }
    const std::vector<T>& raw() const { return data_; }

private:
    std::size_t offset(int h, int k) const {
        return static_cast<std::size_t>(k + q_ / 2) * static_cast<std::size_t>(q_) + static_cast<std::size_t>(h + q_ / 2);
    }

    int q_ = 0;
    std::vector<T> data_;
};

/// R(h,k); h runs along image x (columns), k along image y (rows).
using Spectrum = CenteredGrid<cplx>;
using RealGrid = CenteredGrid<double>;

/// R(h,k) = sum_{x,y=-Q/2}^{Q/2-1} D(x,y) exp(+2 pi i (xh + yk)/Q), pixel (Q/2,Q/2) at x=y=0.
inline Spectrum dft2_centered(const GrayImage& img) {
    if (img.width() != img.height()) throw InvalidArgumentError("DFT input must be square");
    const int q = img.width();
    if (!is_power_of_two(q)) throw InvalidArgumentError("DFT size must be a power of two");
    const auto n = static_cast<std::size_t>(q);
    std::vector<cplx> buf(n * n);
    auto px = img.pixels();
    for (std::size_t i = 0; i < n * n; ++i) buf[i] = px[i];
    fft::transform2d(buf, n, +1);
    Spectrum s(q);
    for (int k = s.lo(); k <= s.hi(); ++k)
        for (int h = s.lo(); h <= s.hi(); ++h) {
            const std::size_t r = static_cast<std::size_t>((k + q) % q);
            const std::size_t c = static_cast<std::size_t>((h + q) % q);
            const double sgn = ((h + k) & 1) ? -1.0 : 1.0;
            s.at(h, k) = sgn * buf[r * n + c];
        }
    return s;
}

/// D(x,y) = Q^-2 sum_{h,k} R(h,k) exp(-2 pi i (xh + yk)/Q); returns the real part.
inline GrayImage inverse_dft2_centered(const Spectrum& s) {
    const int q = s.size();
    const auto n = static_cast<std::size_t>(q);
    std::vector<cplx> buf(n * n);
    for (int k = s.lo(); k <= s.hi(); ++k)
        for (int h = s.lo(); h <= s.hi(); ++h) {
            const double sgn = ((h + k) & 1) ? -1.0 : 1.0;
            buf[static_cast<std::size_t>((k + q) % q) * n + static_cast<std::size_t>((h + q) % q)] = sgn * s.at(h, k);
        }
    fft::transform2d(buf, n, -1);
    GrayImage out(q, q);
    const double scale = 1.0 / (static_cast<double>(q) * static_cast<double>(q));
    auto px = out.pixels();
    for (std::size_t i = 0; i < n * n; ++i) px[i] = buf[i].real() * scale;
    return out;
}

inline RealGrid amplitude_map(const Spectrum& s) {
    RealGrid g(s.size());
    for (std::size_t i = 0; i < s.raw().size(); ++i) g.raw()[i] = std::abs(s.raw()[i]);
    return g;
}

inline RealGrid power_spectrum(const Spectrum& s) {
    RealGrid g(s.size());
    for (std::size_t i = 0; i < s.raw().size(); ++i) g.raw()[i] = std::norm(s.raw()[i]);
    return g;
}

/// Writes log(1+|R|) scaled to the full 16-bit range.
inline void write_amplitude_png(const std::string& path, const RealGrid& amp) {
    const int q = amp.size();
    double mx = 0.0;
    for (double v : amp.raw()) mx = std::max(mx, std::log1p(v));
    GrayImage img(q, q);
    for (int k = amp.lo(); k <= amp.hi(); ++k)
        for (int h = amp.lo(); h <= amp.hi(); ++h)
            img.at(h + q / 2, k + q / 2) = mx > 0.0 ? std::log1p(amp.at(h, k)) / mx : 0.0;
    write_png16(path, img);
}

struct Peak {
    Vec2 pos;  // subpixel (h,k) position
    double amp = 0.0;
};

/// Local maxima of the amplitude map above min_amp times the largest off-center amplitude
/// inside radius_cut, refined by a 3x3 amplitude-weighted centroid.
inline std::vector<Peak> detect_peaks(const RealGrid& amp, double min_amp, double radius_cut) {
    if (!(min_amp > 0.0)) throw InvalidArgumentError("min_amp must be positive");
    const int lo = amp.lo() + 1;
    const int hi = amp.hi() - 1;
    const double r2 = radius_cut * radius_cut;
    auto inside = [&](int h, int k) { return (h != 0 || k != 0) && double(h) * h + double(k) * k <= r2; };

    double mx = 0.0;
    for (int k = lo; k <= hi; ++k)
        for (int h = lo; h <= hi; ++h)
            if (inside(h, k)) mx = std::max(mx, amp.at(h, k));
    const double q2 = static_cast<double>(amp.size()) * amp.size();
    std::vector<Peak> peaks;
    if (mx > 1e-7 * q2) {
        const double thr = min_amp * mx;
        for (int k = lo; k <= hi; ++k)
            for (int h = lo; h <= hi; ++h) {
                if (!inside(h, k)) continue;
                const double v = amp.at(h, k);
                if (v < thr) continue;
                bool is_max = true;
                for (int dk = -1; dk <= 1 && is_max; ++dk)
                    for (int dh = -1; dh <= 1; ++dh) {
                        if (dh == 0 && dk == 0) continue;
                        const double w = amp.at(h + dh, k + dk);
                        // plateau ties resolved towards the first pixel in raster order
                        if (w > v || (w == v && (dk < 0 || (dk == 0 && dh < 0)))) {
                            is_max = false;
                            break;
                        }
                    }
                if (!is_max) continue;
                double sw = 0.0, sx = 0.0, sy = 0.0;
                for (int dk = -1; dk <= 1; ++dk)
                    for (int dh = -1; dh <= 1; ++dh) {
                        const double w = amp.at(h + dh, k + dk);
                        sw += w;
                        sx += w * (h + dh);
                        sy += w * (k + dk);
                    }
                peaks.push_back({{sx / sw, sy / sw}, v});
            }
    }
    if (peaks.size() < 5)
        throw InsufficientPeriodicityError("insufficient periodic repeats: " + std::to_string(peaks.size()) +
                                           " amplitude peaks found, at least 5 needed");
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.amp > b.amp; });
    return peaks;
}

struct DirectLattice {
    Vec2 a;  // pixels
    Vec2 b;
    double a_len = 0.0;
    double b_len = 0.0;
    double gamma = 0.0;  // degrees
};

struct ReciprocalLattice {
    Vec2 a_star;  // cycles per image width
    Vec2 b_star;

    double gamma_star() const { return angle_between(a_star, b_star); }
    Vec2 node(int h, int k) const { return double(h) * a_star + double(k) * b_star; }
    Vec2 node(Index2 i) const { return node(i.h, i.k); }
};

/// Lattice coordinates of a reciprocal-space position in the basis (a*, b*).
inline Vec2 lattice_coords(const ReciprocalLattice& r, Vec2 p) {
    const double det = cross(r.a_star, r.b_star);
    if (std::abs(det) < 1e-12) throw DegenerateLatticeError("reciprocal basis vectors are collinear");
    return {cross(p, r.b_star) / det, cross(r.a_star, p) / det};
}

/// Reduced basis (shortest vectors), a* closest in direction to +x, gamma* <= 90 degrees.
inline ReciprocalLattice reduce_lattice(ReciprocalLattice r) {
    Vec2 a = r.a_star, b = r.b_star;
    if (std::abs(cross(a, b)) < 1e-9 * std::max(1.0, dot(a, a) + dot(b, b)))
        throw DegenerateLatticeError("reciprocal basis vectors are collinear");
    for (int it = 0; it < 100; ++it) {
        if (dot(b, b) < dot(a, a)) std::swap(a, b);
        const double mu = std::round(dot(a, b) / dot(a, a));
        if (mu == 0.0) break;
        b = b - mu * a;
    }
    // a* = the one of +-a, +-b (b only when as short as a) with the smallest angle to +x
    const double tol = 1e-6 * norm(b);
    Vec2 cands[4] = {a, -a, b, -b};
    Vec2 best_a = a;
    double best_ang = 1e9;
    for (int i = 0; i < 4; ++i) {
        if (i >= 2 && norm(b) > norm(a) + tol) break;
        const double ang = std::abs(std::atan2(cands[i].y, cands[i].x));
        if (ang < best_ang - 1e-12) {
            best_ang = ang;
            best_a = cands[i];
        }
    }
    Vec2 other = (best_a == a || best_a == -a) ? b : a;
    if (dot(best_a, other) < 0.0) other = -other;
    return {best_a, other};
}

namespace detail {

inline bool near_integer(Vec2 c, double tol) {
    return std::abs(c.x - std::round(c.x)) <= tol && std::abs(c.y - std::round(c.y)) <= tol;
}

/// Peak lies within min(abs_tol pixels, rel_tol of the shorter basis vector) of a lattice node.
inline bool near_node(const ReciprocalLattice& lat, Vec2 p, double rel_tol, double abs_tol) {
    const Vec2 c = lattice_coords(lat, p);
    const Vec2 node = lat.node(static_cast<int>(std::lround(c.x)), static_cast<int>(std::lround(c.y)));
    const double tol = std::min(abs_tol, rel_tol * std::min(norm(lat.a_star), norm(lat.b_star)));
    return norm(p - node) <= tol;
}

/// Weighted least squares a*, b* from p_i ~ h_i a* + k_i b*.
inline bool lsq_basis(const std::vector<Vec2>& pts, const std::vector<Index2>& idx, const std::vector<double>& w,
                      ReciprocalLattice& out) {
    double shh = 0, shk = 0, skk = 0, shx = 0, shy = 0, skx = 0, sky = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double h = idx[i].h, k = idx[i].k, wi = w[i];
        shh += wi * h * h;
        shk += wi * h * k;
        skk += wi * k * k;
        shx += wi * h * pts[i].x;
        shy += wi * h * pts[i].y;
        skx += wi * k * pts[i].x;
        sky += wi * k * pts[i].y;
    }
    const double det = shh * skk - shk * shk;
    if (std::abs(det) < 1e-9 * std::max(1.0, shh + skk)) return false;
    out.a_star = {(skk * shx - shk * skx) / det, (skk * shy - shk * sky) / det};
    out.b_star = {(shh * skx - shk * shx) / det, (shh * sky - shk * shy) / det};
    return true;
}

}  // namespace detail

/// Robust basis search over pairs of short vectors taken from strong peaks and their
/// differences, followed by two rounds of integer assignment and linear least squares.
inline ReciprocalLattice fit_reciprocal_lattice(const std::vector<Peak>& peaks_in) {
    if (peaks_in.size() < 5) throw InsufficientPeriodicityError("insufficient periodic repeats: at least 5 peaks are needed to fit a lattice");
    std::vector<Peak> peaks = peaks_in;
    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.amp > b.amp; });
    // scoring set: the strongest 400 peaks, and only those above a tenth of the strongest (at least 8)
    std::size_t n_score = std::min<std::size_t>(peaks.size(), 400);
    while (n_score > 8 && peaks[n_score - 1].amp < 0.1 * peaks.front().amp) --n_score;
    const std::size_t n_cand = std::min<std::size_t>(peaks.size(), 60);
    constexpr double tol = 0.15;

    struct Cand {
        ReciprocalLattice lat;
        double score;  // chance-corrected explained share of peak power
        double area;
    };
    // candidate basis vectors: strong peak positions and their pairwise differences, shortest first
    std::vector<Vec2> vecs;
    auto add = [&](Vec2 v) {
        if (norm(v) < 1.5) return;
        if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = -v;
        for (const auto& w : vecs)
            if (norm(v - w) < 0.75) return;
        vecs.push_back(v);
    };
    for (std::size_t i = 0; i < n_cand; ++i) {
        add(peaks[i].pos);
        for (std::size_t j = i + 1; j < n_cand; ++j) add(peaks[i].pos - peaks[j].pos);
    }
    // keep vectors that translate many peaks onto other peaks, then the shortest of those
    std::map<std::pair<long, long>, std::vector<Vec2>> bins;
    for (std::size_t m = 0; m < n_score; ++m)
        bins[{std::lround(peaks[m].pos.x), std::lround(peaks[m].pos.y)}].push_back(peaks[m].pos);
    auto has_peak_near = [&](Vec2 p) {
        const long bx = std::lround(p.x), by = std::lround(p.y);
        for (long dy = -2; dy <= 2; ++dy)
            for (long dx = -2; dx <= 2; ++dx) {
                auto it = bins.find({bx + dx, by + dy});
                if (it == bins.end()) continue;
                for (const auto& q : it->second)
                    if (norm(q - p) <= 1.5) return true;
            }
        return false;
    };
    std::vector<int> support(vecs.size(), 0);
    int max_support = 0;
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        for (std::size_t m = 0; m < n_score; ++m) support[i] += has_peak_near(peaks[m].pos + vecs[i]);
        max_support = std::max(max_support, support[i]);
    }
    std::vector<Vec2> kept;
    for (std::size_t i = 0; i < vecs.size(); ++i)
        if (support[i] >= 0.3 * max_support) kept.push_back(vecs[i]);
    std::stable_sort(kept.begin(), kept.end(), [](Vec2 a, Vec2 b) { return norm(a) < norm(b); });
    if (kept.size() > 32) kept.resize(32);
    vecs = std::move(kept);

    double total = 0.0;
    for (std::size_t m = 0; m < n_score; ++m) total += peaks[m].amp * peaks[m].amp;
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < vecs.size(); ++i)
        for (std::size_t j = i + 1; j < vecs.size(); ++j) {
            const Vec2 p = vecs[i], q = vecs[j];
            if (std::abs(cross(p, q)) < 0.2 * norm(p) * norm(q)) continue;
            ReciprocalLattice lat;
            try {
                lat = reduce_lattice({p, q});
            } catch (const DegenerateLatticeError&) {
                continue;
            }
            {
                // one least-squares pass removes the centroid bias of the seed vectors
                std::vector<Vec2> pts;
                std::vector<Index2> idx;
                std::vector<double> w;
                for (std::size_t m = 0; m < n_score; ++m) {
                    const Vec2 c = lattice_coords(lat, peaks[m].pos);
                    if (!detail::near_integer(c, 0.2)) continue;
                    pts.push_back(peaks[m].pos);
                    idx.push_back({static_cast<int>(std::lround(c.x)), static_cast<int>(std::lround(c.y))});
                    w.push_back(peaks[m].amp * peaks[m].amp);
                }
                ReciprocalLattice refined;
                if (pts.size() >= 3 && detail::lsq_basis(pts, idx, w, refined) &&
                    std::abs(cross(refined.a_star, refined.b_star)) > 1e-9)
                    lat = refined;
            }
            double score = 0.0;
            for (std::size_t m = 0; m < n_score; ++m)
                if (detail::near_node(lat, peaks[m].pos, tol, 1.5)) score += peaks[m].amp * peaks[m].amp;
            // explained share above the share uniformly scattered peaks would hit by chance
            const double area = std::abs(cross(lat.a_star, lat.b_star));
            const double t = std::min(1.5, tol * std::min(norm(lat.a_star), norm(lat.b_star)));
            const double chance = std::min(0.99, std::numbers::pi * t * t / area);
            cands.push_back({lat, (score / total - chance) / (1.0 - chance), area});
        }
    if (cands.empty()) throw DegenerateLatticeError("all candidate peak pairs are collinear");
    double best = 0.0;
    for (const auto& c : cands) best = std::max(best, c.score);
    // coarsest reciprocal cell among the near-best candidates
    const Cand* pick = nullptr;
    for (const auto& c : cands)
        if (c.score >= best - 0.1 * std::abs(best) && (!pick || c.area > pick->area * (1 + 1e-6) ||
                                      (std::abs(c.area - pick->area) <= pick->area * 1e-6 && c.score > pick->score)))
            pick = &c;
    ReciprocalLattice lat = pick->lat;

    for (int round = 0; round < 2; ++round) {
        std::vector<Vec2> pts;
        std::vector<Index2> idx;
        std::vector<double> w;
        for (const auto& p : peaks) {
            const Vec2 c = lattice_coords(lat, p.pos);
            if (!detail::near_node(lat, p.pos, 0.2, 2.0)) continue;
            pts.push_back(p.pos);
            idx.push_back({static_cast<int>(std::lround(c.x)), static_cast<int>(std::lround(c.y))});
            w.push_back(p.amp * p.amp);
        }
        ReciprocalLattice refined;
        if (pts.size() < 3 || !detail::lsq_basis(pts, idx, w, refined)) break;
        lat = refined;
    }
    return reduce_lattice(lat);
}

/// Direct basis with a*.a = b*.b = Q and a*.b = b*.a = 0, i.e. unit dot products in cycles per image.
inline DirectLattice direct_lattice(const ReciprocalLattice& r, int q) {
    const double det = cross(r.a_star, r.b_star);
    if (std::abs(det) < 1e-12) throw DegenerateLatticeError("singular reciprocal basis");
    const double s = static_cast<double>(q) / det;
    DirectLattice d;
    d.a = {s * r.b_star.y, -s * r.b_star.x};
    d.b = {-s * r.a_star.y, s * r.a_star.x};
    d.a_len = norm(d.a);
    d.b_len = norm(d.b);
    d.gamma = angle_between(d.a, d.b);
    return d;
}

/// Inverse of direct_lattice.
inline ReciprocalLattice reciprocal_from_direct(Vec2 a, Vec2 b, int q) {
    const double det = cross(a, b);
    if (std::abs(det) < 1e-12) throw DegenerateLatticeError("singular direct basis");
    const double s = static_cast<double>(q) / det;
    return {{s * b.y, -s * b.x}, {-s * a.y, s * a.x}};
}

struct IndexedFC {
    int h = 0;
    int k = 0;
    double amplitude = 0.0;
    double phase = 0.0;  // degrees, [-180, 180)

    Index2 index() const { return {h, k}; }
    cplx value() const { return std::polar(amplitude, deg2rad(phase)); }
    friend bool operator==(const IndexedFC&, const IndexedFC&) = default;
};

inline IndexedFC make_fc(Index2 i, cplx v) {
    return {i.h, i.k, std::abs(v), std::abs(v) > 0.0 ? wrap_degrees(rad2deg(std::arg(v))) : 0.0};
}

/// One representative of each Friedel pair: h > 0, or h == 0 and k > 0.
constexpr bool is_friedel_representative(Index2 i) { return i.h > 0 || (i.h == 0 && i.k > 0); }

/// Complex 3x3 window sums at every lattice node inside radius_cut, thresholded at
/// min_amp times the largest, Friedel-closed by conjugation. Sorted by (h,k).
inline std::vector<IndexedFC> index_and_extract(const Spectrum& s, const ReciprocalLattice& lat, double radius_cut,
                                                double min_amp) {
    const DirectLattice d = direct_lattice(lat, s.size());
    const int hmax = static_cast<int>(std::ceil(radius_cut * d.a_len / s.size())) + 1;
    const int kmax = static_cast<int>(std::ceil(radius_cut * d.b_len / s.size())) + 1;
    std::vector<IndexedFC> half;
    double mx = 0.0;
    for (int h = 0; h <= hmax; ++h)
        for (int k = -kmax; k <= kmax; ++k) {
            if (!is_friedel_representative({h, k})) continue;
            const Vec2 p = lat.node(h, k);
            if (norm(p) > radius_cut) continue;
            const int ch = static_cast<int>(std::lround(p.x));
            const int ck = static_cast<int>(std::lround(p.y));
            if (!s.contains(ch - 1, ck - 1) || !s.contains(ch + 1, ck + 1)) continue;
            cplx sum = 0.0;
            for (int dk = -1; dk <= 1; ++dk)
                for (int dh = -1; dh <= 1; ++dh) sum += s.at(ch + dh, ck + dk);
            IndexedFC fc = make_fc({h, k}, sum);
            mx = std::max(mx, fc.amplitude);
            half.push_back(fc);
        }
    std::vector<IndexedFC> out;
    const double thr = min_amp * mx;
    for (const auto& fc : half) {
        if (fc.amplitude < thr || fc.amplitude <= 0.0) continue;
        out.push_back(fc);
        out.push_back({-fc.h, -fc.k, fc.amplitude, wrap_degrees(-fc.phase)});
    }
    std::sort(out.begin(), out.end(), [](const IndexedFC& a, const IndexedFC& b) { return a.index() < b.index(); });
    return out;
}

inline void write_fc_csv(std::ostream& os, const std::vector<IndexedFC>& fcs) {
    os << "h,k,amp,phase\n" << std::setprecision(17);
    for (const auto& f : fcs) os << f.h << ',' << f.k << ',' << f.amplitude << ',' << f.phase << '\n';
}

inline void write_peak_csv(std::ostream& os, const std::vector<Peak>& peaks) {
    os << "h,k,amp\n" << std::setprecision(17);
    for (const auto& p : peaks) os << p.pos.x << ',' << p.pos.y << ',' << p.amp << '\n';
}

/// Default radius cut: Q/8 (128 px for Q=1024, 256 px for Q=2048).
constexpr double default_radius_cut(int q) { return q / 8.0; }
inline constexpr double default_min_amp = 5e-3;

}  // namespace planesym
